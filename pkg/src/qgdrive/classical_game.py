"""2x2 normal-form games and their classical solution concepts.

Players are A (ego vehicle, row player) and B (interacting vehicle, column
player). A joint outcome s_jk means A played action j and B played action k,
matching the amplitude ordering in clinalg. Payoff tables are row-major:
payoff_a[j][k] is A's utility at s_jk.
"""

from __future__ import annotations

from dataclasses import dataclass


class DegenerateGameError(ValueError):
    """Mixed-strategy denominator is zero: player payoffs cannot support an
    interior indifference point."""


class NoInteriorEquilibriumError(ValueError):
    """Indifference probabilities fall outside [0, 1]; the game has no fully
    mixed equilibrium. Values are reported, never clamped."""

    def __init__(self, p: float, q: float):
        super().__init__(f"indifference probabilities outside [0, 1]: p={p}, q={q}")
        self.p = p
        self.q = q


@dataclass(frozen=True)
class TwoPlayerGame:
    name: str
    actions_a: tuple[str, str]
    actions_b: tuple[str, str]
    payoff_a: tuple[tuple[float, float], tuple[float, float]]
    payoff_b: tuple[tuple[float, float], tuple[float, float]]

    def u_a(self, j: int, k: int) -> float:
        return self.payoff_a[j][k]

    def u_b(self, j: int, k: int) -> float:
        return self.payoff_b[j][k]


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over the four joint outcomes (s00, s01, s10, s11)."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        tol = 1e-9
        for p in self.as_tuple():
            if not -tol <= p <= 1.0 + tol:
                raise ValueError(f"probability {p!r} outside [0, 1]")
        total = sum(self.as_tuple())
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    def prob(self, j: int, k: int) -> float:
        return self.as_tuple()[2 * j + k]

    def marginal_a(self) -> float:
        """Probability that A plays action 0."""
        return self.p00 + self.p01

    def marginal_b(self) -> float:
        """Probability that B plays action 0."""
        return self.p00 + self.p10


@dataclass(frozen=True)
class MixedStrategy:
    """Interior equilibrium. p: probability that B plays action 0, which
    makes A indifferent; q: probability that A plays action 0, which makes
    B indifferent."""

    p: float
    q: float


def merging_game() -> TwoPlayerGame:
    """Highway on-ramp game. A: Merge / NotMerge; B: Accelerate / Decelerate."""
    return TwoPlayerGame(
        name="merging",
        actions_a=("Merge", "NotMerge"),
        actions_b=("Accelerate", "Decelerate"),
        payoff_a=((0.0, 10.0), (4.0, 1.0)),
        payoff_b=((0.0, 4.0), (10.0, 1.0)),
    )


def roundabout_game() -> TwoPlayerGame:
    """Roundabout entry game. A: Accelerate / Decelerate; B: Accelerate / Idle."""
    return TwoPlayerGame(
        name="roundabout",
        actions_a=("Accelerate", "Decelerate"),
        actions_b=("Accelerate", "Idle"),
        payoff_a=((0.0, 10.0), (4.0, 4.0)),
        payoff_b=((0.0, 4.0), (10.0, 4.0)),
    )


_BUILTIN = {"merging": merging_game, "roundabout": roundabout_game}


def builtin_game(name: str) -> TwoPlayerGame:
    try:
        return _BUILTIN[name]()
    except KeyError:
        raise ValueError(
            f"unknown built-in game {name!r}; expected one of {sorted(_BUILTIN)}"
        ) from None


def pure_nash_equilibria(game: TwoPlayerGame) -> tuple[tuple[int, int], ...]:
    """All pure equilibria under weak best-response inequalities, in s_jk order."""
    out = []
    for j in (0, 1):
        for k in (0, 1):
            a_ok = game.u_a(j, k) >= game.u_a(1 - j, k)
            b_ok = game.u_b(j, k) >= game.u_b(j, 1 - k)
            if a_ok and b_ok:
                out.append((j, k))
    return tuple(out)


def mixed_strategy(game: TwoPlayerGame) -> MixedStrategy:
    """Interior mixed equilibrium from the indifference conditions.

    p is derived from A's payoffs and is the weight B must put on action 0
    to make A indifferent; q, from B's payoffs, is A's weight on action 0
    that makes B indifferent. Raises DegenerateGameError on a zero
    denominator and NoInteriorEquilibriumError when either value leaves
    [0, 1].
    """
    ua, ub = game.payoff_a, game.payoff_b
    den_p = ua[0][0] - ua[0][1] - ua[1][0] + ua[1][1]
    den_q = ub[0][0] - ub[0][1] - ub[1][0] + ub[1][1]
    if den_p == 0.0 or den_q == 0.0:
        raise DegenerateGameError(
            f"degenerate payoff structure: denominators ({den_p}, {den_q})"
        )
    p = (ua[1][1] - ua[0][1]) / den_p
    q = (ub[1][1] - ub[1][0]) / den_q
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise NoInteriorEquilibriumError(p, q)
    return MixedStrategy(p=p, q=q)


def cg_epd_distribution() -> OutcomeDistribution:
    """Equal-probability baseline: every joint outcome with probability 1/4."""
    return OutcomeDistribution(0.25, 0.25, 0.25, 0.25)


def cg_ms_distribution(game: TwoPlayerGame) -> OutcomeDistribution:
    """Joint distribution of independent play of the mixed equilibrium.

    A plays action 0 with probability q, B with probability p (each player
    mixes with the probabilities that keep the opponent indifferent).
    """
    ms = mixed_strategy(game)
    p, q = ms.p, ms.q
    return OutcomeDistribution(q * p, q * (1.0 - p), (1.0 - q) * p, (1.0 - q) * (1.0 - p))


def expected_payoff(dist: OutcomeDistribution, game: TwoPlayerGame, player: str) -> float:
    """Probability-weighted utility for player 'a' or 'b' under dist."""
    table = {"a": game.u_a, "b": game.u_b}[player]
    return sum(dist.prob(j, k) * table(j, k) for j in (0, 1) for k in (0, 1))


def load_game(path) -> TwoPlayerGame:
    """Parse a game file: 'key = value' lines, '#' comments.

    Required keys: label_a0, label_a1, label_b0, label_b1, ua, ub. The ua/ub
    values are four reals, row-major (s00 s01 s10 s11), space or comma
    separated. An optional 'name' key labels the game.
    """
    fields: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip()

    required = ["label_a0", "label_a1", "label_b0", "label_b1", "ua", "ub"]
    missing = [k for k in required if k not in fields]
    if missing:
        raise ValueError(f"{path}: missing keys: {', '.join(missing)}")

    def parse_table(key: str) -> tuple[tuple[float, float], tuple[float, float]]:
        parts = fields[key].replace(",", " ").split()
        if len(parts) != 4:
            raise ValueError(f"{path}: {key} needs 4 reals, got {len(parts)}")
        v = [float(x) for x in parts]
        return ((v[0], v[1]), (v[2], v[3]))

    return TwoPlayerGame(
        name=fields.get("name", "custom"),
        actions_a=(fields["label_a0"], fields["label_a1"]),
        actions_b=(fields["label_b0"], fields["label_b1"]),
        payoff_a=parse_table("ua"),
        payoff_b=parse_table("ub"),
    )
