"""Kinematic merging and roundabout episodes driven by one joint decision.

Each episode samples initial states, takes a single (EV action, IV action)
pair at t=0, and integrates forward at a fixed timestep. The IV holds its
commanded acceleration for the whole episode; the EV runs a small maneuver
state machine:

  merging     Merge     hold speed, change lane on crossing the merge-section
                        entry, then follow IDM on the main lane.
              NotMerge  brake on the ramp until the IV has passed the EV's
                        projected main-lane position (plus clearance), then
                        resume under IDM and merge inside the section.
  roundabout  Accelerate  accelerate to the entry line, enter, then IDM on
                          the circulating lane.
              Decelerate  brake before the yield line until the IV has
                          passed, then resume under IDM and enter.

Own-path coordinates differ per lane; `common_position` projects both
vehicles onto the shared exit path (the entry lane carries a fixed offset).
Geometry defaults are tuned so that, over the default initial ranges, the
contested joint action (EV goes + IV accelerates) always produces a
collision and every other joint action never does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

EV_LANE_START = {"merging": "ramp", "roundabout": "approach"}
EV_LANE_TARGET = {"merging": "main", "roundabout": "inside"}
IV_LANE = {"merging": "main", "roundabout": "inside"}


@dataclass(frozen=True)
class VehicleState:
    lane: str
    s: float        # longitudinal position along own path, m
    v: float        # speed, m/s
    length: float = 5.0


@dataclass(frozen=True)
class IdmParams:
    """Intelligent Driver Model constants (standard highway values)."""

    v0: float = 25.0        # desired speed, m/s
    T: float = 1.5          # desired time headway, s
    s0: float = 2.0         # standstill jam distance, m
    a: float = 1.5          # maximum comfortable acceleration, m/s^2
    b: float = 2.0          # comfortable deceleration, m/s^2
    delta: float = 4.0      # speed exponent


@dataclass(frozen=True)
class MobilParams:
    """MOBIL lane-change constants."""

    politeness: float = 0.3
    a_threshold: float = 0.1    # minimum incentive gain, m/s^2
    b_safe: float = 4.0         # maximum braking imposed on the new follower


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str                      # "merging" | "roundabout"
    dt: float = 0.1
    horizon: int = 150             # steps per episode
    a_nominal: float = 2.0         # commanded accel magnitude, m/s^2
    vehicle_length: float = 5.0
    # uniform sampling ranges (lo, hi)
    ev_s_range: tuple[float, float] = (0.0, 0.0)
    ev_v_range: tuple[float, float] = (0.0, 0.0)
    iv_s_range: tuple[float, float] = (0.0, 0.0)
    iv_v_range: tuple[float, float] = (0.0, 0.0)
    # geometry, own-path coordinates of the EV's entry lane
    merge_point: float = 0.0       # lane change becomes available / yield line
    section_end: float = 0.0       # last own-path position allowing the change
    lane_offset: float = 0.0       # own-path -> common-path additive offset
    conflict_zone_length: float = 0.0
    pass_clearance: float = 10.0   # IV must be this far past the EV to release a yield
    # re-take the joint decision every pre-maneuver step instead of holding
    # the episode-start decision; needs a decide callback in run_episode
    decision_replay: bool = False
    idm: IdmParams = IdmParams()
    mobil: MobilParams = MobilParams()

    def __post_init__(self):
        if self.kind not in EV_LANE_START:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.dt <= 0 or self.horizon <= 0:
            raise ValueError("dt and horizon must be positive")


def merging_scenario(**overrides) -> ScenarioConfig:
    """Highway on-ramp joining a main lane.

    Ramp position x projects to main-lane position x + 20, so the EV enters
    the main lane 15..35 m ahead of the IV's start window. A yielding IV can
    never reach it; an accelerating IV always runs it down inside the
    horizon.
    """
    base = dict(
        kind="merging",
        ev_s_range=(105.0, 115.0),
        ev_v_range=(18.0, 22.0),
        iv_s_range=(100.0, 110.0),
        iv_v_range=(18.0, 22.0),
        merge_point=125.0,
        section_end=255.0,
        lane_offset=20.0,
        conflict_zone_length=130.0,
        idm=IdmParams(v0=25.0),
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def roundabout_scenario(**overrides) -> ScenarioConfig:
    """Single-lane roundabout entry against one circulating vehicle.

    Approach position x projects to circulating-lane position x - 90; the
    yield line at 140 maps onto the conflict point at 50. Default approach
    speeds stop within the 18 m to the line, so a yielding EV never overruns
    it.
    """
    base = dict(
        kind="roundabout",
        ev_s_range=(118.0, 122.0),
        ev_v_range=(4.0, 8.0),
        iv_s_range=(0.0, 10.0),
        iv_v_range=(6.0, 10.0),
        merge_point=140.0,
        section_end=140.0,
        lane_offset=-90.0,
        conflict_zone_length=15.0,
        idm=IdmParams(v0=10.0),
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def builtin_scenario(kind: str, **overrides) -> ScenarioConfig:
    if kind == "merging":
        return merging_scenario(**overrides)
    if kind == "roundabout":
        return roundabout_scenario(**overrides)
    raise ValueError(f"unknown scenario {kind!r}; expected 'merging' or 'roundabout'")


def action_semantics(config: ScenarioConfig) -> dict:
    """Human-readable meaning of each action index per agent."""
    if config.kind == "merging":
        return {
            "ev": {0: "Merge: hold speed, change to the main lane at the merge section",
                   1: "NotMerge: brake on the ramp, merge after the IV has passed"},
            "iv": {0: "Accelerate: +a_nominal on the main lane",
                   1: "Decelerate: -a_nominal on the main lane"},
        }
    return {
        "ev": {0: "Accelerate: +a_nominal through the entry line into the ring",
               1: "Decelerate: brake before the yield line, enter after the IV has passed"},
        "iv": {0: "Accelerate: +a_nominal around the ring",
               1: "Idle: hold speed around the ring"},
    }


def sample_initial(config: ScenarioConfig, rng: np.random.Generator) -> tuple[VehicleState, VehicleState]:
    """Draw (EV, IV) uniformly from the configured ranges.

    Draw order is fixed (ev_s, ev_v, iv_s, iv_v) so seeded runs are stable.
    Zero-width ranges produce the endpoint deterministically.
    """
    ev_s = float(rng.uniform(*config.ev_s_range))
    ev_v = float(rng.uniform(*config.ev_v_range))
    iv_s = float(rng.uniform(*config.iv_s_range))
    iv_v = float(rng.uniform(*config.iv_v_range))
    ev = VehicleState(lane=EV_LANE_START[config.kind], s=ev_s, v=ev_v, length=config.vehicle_length)
    iv = VehicleState(lane=IV_LANE[config.kind], s=iv_s, v=iv_v, length=config.vehicle_length)
    return ev, iv


def common_position(config: ScenarioConfig, state: VehicleState) -> float:
    """Project an own-path position onto the shared exit path."""
    if state.lane == EV_LANE_START[config.kind]:
        return state.s + config.lane_offset
    return state.s


def kinematic_step(state: VehicleState, accel: float, dt: float) -> VehicleState:
    """Constant-acceleration update over one step; speed saturates at zero.

    When the commanded deceleration would cross v=0 inside the step the
    acceleration is rescaled so the vehicle stops exactly, keeping position
    monotone.
    """
    a = accel
    if state.v + a * dt < 0.0:
        a = -state.v / dt
    v_next = state.v + a * dt
    s_next = state.s + state.v * dt + 0.5 * a * dt * dt
    return replace(state, s=s_next, v=v_next)


def detect_collision(config: ScenarioConfig, ev: VehicleState, iv: VehicleState) -> bool:
    """Same lane and center distance below half the summed lengths."""
    if ev.lane != iv.lane:
        return False
    gap = abs(common_position(config, ev) - common_position(config, iv))
    return gap < 0.5 * (ev.length + iv.length)


def classify_outcome(collided: bool, completed: bool, violation: bool) -> str:
    """Exactly one of collision / success / timeout."""
    if collided:
        return "collision"
    if completed and not violation:
        return "success"
    return "timeout"


# ---------------------------------------------------------------------------
# Driver models (baseline plumbing)

def idm_accel(v: float, gap: "float | None", v_lead: float, p: IdmParams) -> float:
    """IDM acceleration. gap is the net (bumper) distance to the leader;
    None means free road."""
    free = 1.0 - (v / p.v0) ** p.delta if p.v0 > 0 else 0.0
    if gap is None:
        return p.a * free
    if gap <= 0.1:
        return -p.b * 4.0
    s_star = p.s0 + max(0.0, v * p.T + v * (v - v_lead) / (2.0 * math.sqrt(p.a * p.b)))
    return p.a * (free - (s_star / gap) ** 2)


def mobil_decide(
    ego_a_old: float,
    ego_a_new: float,
    follower_a_old: float,
    follower_a_new: float,
    p: MobilParams,
) -> bool:
    """MOBIL criterion: safe for the new follower, and the politeness-weighted
    acceleration gain clears the threshold."""
    if follower_a_new < -p.b_safe:
        return False
    gain = (ego_a_new - ego_a_old) + p.politeness * (follower_a_new - follower_a_old)
    return gain > p.a_threshold


def mobil_merge_decision(config: ScenarioConfig, ev: VehicleState, iv: VehicleState) -> int:
    """MOBIL-style one-shot merge decision on the merging scenario.

    Staying on the ramp means eventually braking for the section end;
    merging puts the EV ahead of or behind the IV on the main lane. Returns
    action 0 (Merge) or 1 (NotMerge).
    """
    if config.kind != "merging":
        raise ValueError("MOBIL merge decision applies to the merging scenario only")
    idm = config.idm
    end_gap = max(config.section_end - ev.s - ev.length, 0.1)
    ego_a_old = idm_accel(ev.v, end_gap, 0.0, idm)

    ev_c = common_position(config, ev)
    iv_c = common_position(config, iv)
    half = 0.5 * (ev.length + iv.length)
    if iv_c > ev_c:
        # IV would be the EV's leader after the change
        gap = iv_c - ev_c - half
        ego_a_new = idm_accel(ev.v, max(gap, 0.1), iv.v, idm)
        fol_old = fol_new = idm_accel(iv.v, None, 0.0, idm)
    else:
        ego_a_new = idm_accel(ev.v, None, 0.0, idm)
        gap = ev_c - iv_c - half
        fol_old = idm_accel(iv.v, None, 0.0, idm)
        fol_new = idm_accel(iv.v, max(gap, 0.1), ev.v, idm)
    return 0 if mobil_decide(ego_a_old, ego_a_new, fol_old, fol_new, config.mobil) else 1


def idm_entry_decision(
    config: ScenarioConfig,
    ev: VehicleState,
    iv: VehicleState,
    t_accept: float = 2.5,
) -> int:
    """Gap-acceptance entry decision for the roundabout baseline.

    Enter (action 0) when the circulating vehicle has already passed the
    conflict point, or arrives at constant speed at least t_accept seconds
    after the EV would clear it when accelerating. Otherwise yield.
    """
    if config.kind != "roundabout":
        raise ValueError("IDM entry decision applies to the roundabout scenario only")
    conflict = config.merge_point + config.lane_offset
    iv_dist = conflict - iv.s
    if iv_dist <= 0.0:
        return 0
    tau_iv = iv_dist / max(iv.v, 0.1)
    # time for the EV to pass the conflict point plus one vehicle length;
    # an EV already past the line commits (d = 0)
    d = max(config.merge_point - ev.s + ev.length, 0.0)
    a = config.a_nominal
    tau_ev = (-ev.v + math.sqrt(ev.v * ev.v + 2.0 * a * d)) / a
    return 0 if tau_iv - tau_ev >= t_accept else 1


# ---------------------------------------------------------------------------
# Episode integration

@dataclass(frozen=True)
class TracePoint:
    t: float
    ev_lane: str
    ev_s: float
    ev_v: float
    iv_lane: str
    iv_s: float
    iv_v: float
    headway: float


@dataclass(frozen=True)
class EpisodeResult:
    ev_action: int
    iv_action: int
    outcome: str               # "collision" | "success" | "timeout"
    collided: bool
    completed: bool            # EV reached the target lane
    violation: bool            # yield-line overrun while yielding (roundabout)
    completed_at: "float | None"
    steps_run: int
    mean_headway: float        # mean |common-path separation| over run steps
    trace: tuple[TracePoint, ...]


_GO, _YIELD, _RESUME, _DONE = 0, 1, 2, 3


def run_episode(
    config: ScenarioConfig,
    ev0: VehicleState,
    iv0: VehicleState,
    ev_action: int,
    iv_action: int,
    record_trace: bool = False,
    decide=None,
    rng=None,
) -> EpisodeResult:
    """Integrate one episode under a joint decision.

    The EV phase machine and the IV's held acceleration are described in the
    module docstring. The episode stops at the first collision step or after
    config.horizon steps. With config.decision_replay and a decide callback
    `(rng, ev_state, iv_state) -> (ev_action, iv_action)`, the joint decision
    is re-taken at every step until the EV's maneuver is underway; the
    result then records the last commanded pair.
    """
    if ev_action not in (0, 1) or iv_action not in (0, 1):
        raise ValueError("actions must be 0 or 1")
    kind = config.kind
    dt = config.dt
    a_nom = config.a_nominal
    idm = config.idm
    offset = config.lane_offset
    half = 0.5 * (ev0.length + iv0.length)
    entry_lane = EV_LANE_START[kind]
    target_lane = EV_LANE_TARGET[kind]
    replay = config.decision_replay and decide is not None

    ev_s, ev_v, ev_lane = ev0.s, ev0.v, ev0.lane
    iv_s, iv_v = iv0.s, iv0.v

    def _iv_accel(action):
        if kind == "merging":
            return a_nom if action == 0 else -a_nom
        return a_nom if action == 0 else 0.0

    iv_a = _iv_accel(iv_action)
    phase = _GO if ev_action == 0 else _YIELD
    collided = False
    violation = False
    completed_at = None
    headway_sum = 0.0
    headway_steps = 0
    steps = 0
    trace: list[TracePoint] = []
    t = 0.0

    for _ in range(config.horizon):
        if replay and steps and phase in (_GO, _YIELD):
            ev_action, iv_action = decide(
                rng,
                VehicleState(ev_lane, ev_s, ev_v, ev0.length),
                VehicleState(IV_LANE[kind], iv_s, iv_v, iv0.length),
            )
            iv_a = _iv_accel(iv_action)
            phase = _GO if ev_action == 0 else _YIELD

        ev_common = ev_s + offset if ev_lane == entry_lane else ev_s

        # phase transitions on the current state
        if phase == _YIELD:
            if kind == "roundabout" and ev_s >= config.merge_point:
                violation = True
            if iv_s >= ev_common + config.pass_clearance:
                phase = _RESUME
        if phase in (_GO, _RESUME) and ev_lane == entry_lane:
            reached = ev_s >= config.merge_point
            within = ev_s <= config.section_end if kind == "merging" else True
            if reached and within:
                ev_lane = target_lane
                ev_s = ev_s + offset
                ev_common = ev_s
                completed_at = t
                phase = _DONE

        # EV acceleration for this step
        if phase == _GO:
            ev_a = 0.0 if kind == "merging" else a_nom
        elif phase == _YIELD:
            ev_a = -a_nom
        else:  # _RESUME or _DONE: IDM, IV as leader when it is ahead on the shared path
            if iv_s > ev_common:
                gap = iv_s - ev_common - half
                ev_a = idm_accel(ev_v, max(gap, 0.1), iv_v, idm)
            else:
                ev_a = idm_accel(ev_v, None, 0.0, idm)

        # integrate both vehicles
        if ev_v + ev_a * dt < 0.0:
            ev_a = -ev_v / dt
        ev_s += ev_v * dt + 0.5 * ev_a * dt * dt
        ev_v += ev_a * dt

        iv_a_step = iv_a
        if iv_v + iv_a_step * dt < 0.0:
            iv_a_step = -iv_v / dt
        iv_s += iv_v * dt + 0.5 * iv_a_step * dt * dt
        iv_v += iv_a_step * dt

        t += dt
        steps += 1
        ev_common = ev_s + offset if ev_lane == entry_lane else ev_s
        headway = abs(iv_s - ev_common)

        if record_trace:
            trace.append(TracePoint(
                t=t, ev_lane=ev_lane, ev_s=ev_s, ev_v=ev_v,
                iv_lane=IV_LANE[kind], iv_s=iv_s, iv_v=iv_v, headway=headway,
            ))

        if ev_lane == target_lane and headway < half:
            collided = True
            break

        # the colliding step is excluded from the headway average
        headway_sum += headway
        headway_steps += 1

    completed = completed_at is not None
    outcome = classify_outcome(collided, completed, violation)
    return EpisodeResult(
        ev_action=ev_action,
        iv_action=iv_action,
        outcome=outcome,
        collided=collided,
        completed=completed,
        violation=violation,
        completed_at=completed_at,
        steps_run=steps,
        mean_headway=headway_sum / headway_steps if headway_steps else 0.0,
        trace=tuple(trace),
    )


def write_trace_csv(result: EpisodeResult, path) -> None:
    """Trace rows as t,ev_lane,ev_s,ev_v,iv_lane,iv_s,iv_v,headway."""
    if not result.trace:
        raise ValueError("episode was run without record_trace=True; no trace to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,ev_lane,ev_s,ev_v,iv_lane,iv_s,iv_v,headway\n")
        for p in result.trace:
            fh.write(
                f"{p.t!r},{p.ev_lane},{p.ev_s!r},{p.ev_v!r},"
                f"{p.iv_lane},{p.iv_s!r},{p.iv_v!r},{p.headway!r}\n"
            )
