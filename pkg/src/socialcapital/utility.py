"""Type-specific utility model and the quantities derived from it.

Every agent type carries a concave benefit-aggregation curve ``v``, per-link
benefits for same-type and different-type followees, and a constant link
cost.  Gregariousness (the number of links an agent forms when it only meets
same-type agents) and the exogenous homophily index both follow from these
primitives and are never supplied directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

__all__ = [
    "ConfigError",
    "CurveFamily",
    "AggregationCurve",
    "TypeProfile",
    "SocietyConfig",
    "eval_v",
    "marginal_link_utility",
    "link_decision",
    "compute_L_star",
    "compute_Lbar_star",
    "exogenous_homophily_index",
    "reachable_counts",
    "cost_for_gregariousness",
]

# Hard ceiling for the argmax scans; concavity makes the true optimum finite,
# this only guards against pathological parameters (tiny cost, huge scale).
SCAN_LIMIT = 1_000_000


class ConfigError(ValueError):
    """Raised when a profile or society violates its invariants.

    ``errors`` lists every violation as ``"<field path>: <message>"``.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class CurveFamily(str, Enum):
    SQRT = "sqrt"
    LOG = "log"


@dataclass(frozen=True)
class AggregationCurve:
    """Concave benefit aggregation ``v`` with ``v(0) = 0``.

    ``sqrt``: ``v(x) = scale * sqrt(x)``; ``log``: ``v(x) = scale * log(1 + x)``.
    """

    family: CurveFamily = CurveFamily.SQRT
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", CurveFamily(self.family))
        if not self.scale > 0:
            raise ConfigError([f"curve.scale: must be positive, got {self.scale}"])

    def __call__(self, x: float) -> float:
        return eval_v(self, x)


def eval_v(curve: AggregationCurve, x: float) -> float:
    """Evaluate the aggregation curve at a nonnegative benefit level."""
    if x < 0:
        raise ValueError(f"aggregation curve is defined on x >= 0, got {x}")
    if curve.family is CurveFamily.SQRT:
        return curve.scale * math.sqrt(x)
    return curve.scale * math.log1p(x)


@dataclass(frozen=True)
class TypeProfile:
    """Exogenous parameters of one social group.

    Attributes
    ----------
    alpha_same, alpha_diff : float
        Per-link benefit of a same-type / different-type followee.
    link_cost : float
        Constant marginal cost of a link.
    curve : AggregationCurve
    opportunism : float
        Probability of meeting inside the followees-of-followees set when
        that set is non-empty.
    pop_share : float
        Probability that a newborn agent has this type.
    name : str
        Free-form label used in reports.
    """

    alpha_same: float
    alpha_diff: float
    link_cost: float
    curve: AggregationCurve = field(default_factory=AggregationCurve)
    opportunism: float = 0.0
    pop_share: float = 1.0
    name: str = ""

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigError(errors)

    def validate(self, path: str = "profile") -> list[str]:
        errs = []
        if not self.alpha_same > 0:
            errs.append(f"{path}.alpha_same: must be positive, got {self.alpha_same}")
        if not self.alpha_diff >= 0:
            errs.append(f"{path}.alpha_diff: must be nonnegative, got {self.alpha_diff}")
        elif self.alpha_diff > self.alpha_same:
            errs.append(
                f"{path}.alpha_diff: must not exceed alpha_same "
                f"({self.alpha_diff} > {self.alpha_same})"
            )
        if not self.link_cost > 0:
            errs.append(f"{path}.link_cost: must be positive, got {self.link_cost}")
        if not 0.0 <= self.opportunism <= 1.0:
            errs.append(f"{path}.opportunism: must lie in [0, 1], got {self.opportunism}")
        if not 0.0 <= self.pop_share <= 1.0:
            errs.append(f"{path}.pop_share: must lie in [0, 1], got {self.pop_share}")
        return errs

    def v(self, x: float) -> float:
        return eval_v(self.curve, x)

    def utility(self, n_same: int, n_diff: int) -> float:
        """Net utility of an ego network with the given followee counts."""
        return (
            self.v(self.alpha_same * n_same + self.alpha_diff * n_diff)
            - self.link_cost * (n_same + n_diff)
        )

    @property
    def gregariousness(self) -> int:
        return compute_L_star(self, 0.0)

    @property
    def homophily(self) -> float:
        return exogenous_homophily_index(self)


@dataclass(frozen=True)
class SocietyConfig:
    """A society: ordered type profiles plus run controls.

    The position of a profile in ``profiles`` is its type id.
    """

    profiles: tuple[TypeProfile, ...]
    horizon: int = 1000
    seed: int = 0
    replication_count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        errors = self.validate()
        if errors:
            raise ConfigError(errors)

    def validate(self) -> list[str]:
        errs = []
        if not self.profiles:
            errs.append("profiles: at least one profile is required")
        shares = [p.pop_share for p in self.profiles]
        if self.profiles and abs(math.fsum(shares) - 1.0) > 1e-12:
            errs.append(f"profiles[*].pop_share: shares must sum to 1, got {math.fsum(shares)!r}")
        if not (isinstance(self.horizon, int) and self.horizon >= 2):
            errs.append(f"horizon: must be an integer >= 2, got {self.horizon!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            errs.append(f"seed: must be a 64-bit nonnegative integer, got {self.seed!r}")
        if not (isinstance(self.replication_count, int) and self.replication_count >= 1):
            errs.append(
                f"replication_count: must be a positive integer, got {self.replication_count!r}"
            )
        return errs

    @property
    def n_types(self) -> int:
        return len(self.profiles)

    @property
    def shares(self) -> list[float]:
        return [p.pop_share for p in self.profiles]


def marginal_link_utility(
    profile: TypeProfile, n_same: int, n_diff: int, candidate_same_type: bool
) -> float:
    """Utility change from adding one followee to an ego network."""
    if n_same < 0 or n_diff < 0:
        raise ValueError("followee counts must be nonnegative")
    a_s, a_d = profile.alpha_same, profile.alpha_diff
    base = a_s * n_same + a_d * n_diff
    new = base + (a_s if candidate_same_type else a_d)
    return profile.v(new) - profile.v(base) - profile.link_cost


def link_decision(
    profile: TypeProfile, n_same: int, n_diff: int, candidate_same_type: bool
) -> bool:
    """Myopic linking rule: link iff the marginal utility is strictly positive."""
    return marginal_link_utility(profile, n_same, n_diff, candidate_same_type) > 0


def _scan(profile: TypeProfile, alpha: float, offset: float) -> int:
    if offset < 0:
        raise ValueError(f"benefit offset must be nonnegative, got {offset}")
    if alpha <= 0:
        return 0
    v, c = profile.v, profile.link_cost
    x = 0
    while v((x + 1) * alpha + offset) - v(x * alpha + offset) > c:
        x += 1
        if x > SCAN_LIMIT:
            raise RuntimeError("link-count scan did not saturate; check cost and curve scale")
    return x


def compute_L_star(profile: TypeProfile, alpha_offset: float = 0.0) -> int:
    """Number of same-type links worth forming on top of ``alpha_offset`` benefit.

    This is the smallest maximiser of ``v(x * alpha_same + offset) - x * c``
    over nonnegative integers ``x``.
    """
    return _scan(profile, profile.alpha_same, alpha_offset)


def compute_Lbar_star(profile: TypeProfile, alpha_offset: float = 0.0) -> int:
    """Like :func:`compute_L_star` with different-type links only."""
    return _scan(profile, profile.alpha_diff, alpha_offset)


def exogenous_homophily_index(profile: TypeProfile) -> float:
    """Minimum long-run fraction of same-type followees the type accepts."""
    if profile.alpha_diff == 0:
        return 1.0
    if profile.alpha_diff == profile.alpha_same:
        return 0.0
    lbar = compute_Lbar_star(profile, 0.0)
    lsame = compute_L_star(profile, profile.alpha_diff * lbar)
    if lsame + lbar == 0:
        # no link of any kind is ever worth its cost
        return 1.0
    return lsame / (lsame + lbar)


def reachable_counts(profile: TypeProfile) -> set[tuple[int, int]]:
    """All ``(n_same, n_diff)`` states reachable under the linking rule.

    Used to size the decision tables of the simulator.
    """
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        ns, nd = stack.pop()
        for same, nxt in ((True, (ns + 1, nd)), (False, (ns, nd + 1))):
            if nxt not in seen and link_decision(profile, ns, nd, same):
                seen.add(nxt)
                stack.append(nxt)
    return seen


def cost_for_gregariousness(curve: AggregationCurve, alpha: float, links: int) -> float:
    """Link cost placing ``L*(0)`` exactly at ``links`` for benefit ``alpha``.

    Picks the midpoint between the marginal gains of link ``links`` and link
    ``links + 1`` so the scan result is robust to rounding.
    """
    if links < 0:
        raise ValueError("links must be nonnegative")

    def gain(x):
        return eval_v(curve, (x + 1) * alpha) - eval_v(curve, x * alpha)

    upper = gain(links - 1) if links > 0 else 2 * gain(0)
    return 0.5 * (upper + gain(links))
