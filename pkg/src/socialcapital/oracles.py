"""Closed-form predictions used to check Monte Carlo output.

Every function returns an :class:`OraclePrediction` that records where the
formula comes from and the parameter regime in which it holds.  Predictions
evaluated outside their regime are still returned, with ``in_regime=False``,
so callers can refuse to score them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
from scipy import optimize, stats

from .metrics import EmpiricalPmf, Verdict
from .utility import SocietyConfig, TypeProfile, compute_L_star, exogenous_homophily_index

__all__ = [
    "OraclePrediction",
    "lambert_wm1",
    "eeft_closed_form",
    "eft_pmf_closed_form",
    "optimal_bonding_bound",
    "mean_gregariousness",
    "growth_exponent",
    "popularity_log_curve",
    "popularity_sublinear_bound",
    "crossover_time_bound",
    "crossover_time_bisection",
    "intolerant_exponent",
    "intolerant_growth_curves",
    "meanfield_popularity_cdf",
    "connectedness_predicate",
    "eft_fosd_prediction",
    "all_predictions",
]


@dataclass
class OraclePrediction:
    """A closed-form value together with its provenance and validity regime.

    ``value`` is a float (scalar, bound), a bool (predicate), an
    :class:`EmpiricalPmf` (pmf), a :class:`Verdict`, or a callable of ``t``
    or ``d`` (curve).  ``params`` holds the inputs so curves can be
    serialised and re-evaluated.
    """

    kind: str
    value: Any
    provenance: str
    validity: str
    in_regime: bool = True
    params: dict = field(default_factory=dict)
    notes: str = ""

    def __call__(self, x):
        if not callable(self.value):
            raise TypeError(f"{self.kind} prediction is not a curve")
        return self.value(x)

    def to_dict(self) -> dict:
        v = self.value
        if isinstance(v, EmpiricalPmf):
            v = {"support": v.support.tolist(), "mass": v.mass.tolist(), "tail": v.tail}
        elif isinstance(v, Verdict):
            v = v.value
        elif callable(v):
            v = None
        elif isinstance(v, (np.floating, np.integer)):
            v = v.item()
        return {
            "kind": self.kind,
            "value": v,
            "provenance": self.provenance,
            "validity": self.validity,
            "in_regime": bool(self.in_regime),
            "params": {k: (p.item() if isinstance(p, np.generic) else p) for k, p in self.params.items()},
            "notes": self.notes,
        }


# -- Lambert W, lower branch ----------------------------------------------


def lambert_wm1(x: float, tol: float = 1e-12, maxiter: int = 100) -> float:
    """Lower real branch ``W_{-1}`` of the Lambert W function.

    Solves ``w * exp(w) = x`` with ``w <= -1`` for ``x`` in ``[-1/e, 0)``.
    The start value is the branch-point series near ``-1/e`` and the
    asymptotic ``log(-x) - log(-log(-x))`` near zero; Halley steps then
    refine it until the residual is below ``tol`` (relative to ``|x|``).

    Raises
    ------
    ValueError
        If ``x`` lies outside ``[-1/e, 0)``.
    """
    x = float(x)
    branch = -math.exp(-1.0)
    if not branch - 1e-15 <= x < 0.0:
        raise ValueError(f"W_-1 is real only on [-1/e, 0), got {x}")
    if x <= branch:
        return -1.0
    if x < -0.25:
        p = -math.sqrt(2.0 * (1.0 + math.e * x))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    for _ in range(maxiter):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol * abs(x):
            break
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w = min(w - step, -1.0)
        if abs(step) <= 1e-16 * abs(w):
            break
    return w


# -- bonding capital ------------------------------------------------------


def _h1(profile: TypeProfile) -> bool:
    return exogenous_homophily_index(profile) == 1.0


def _second_stage_prob(profile: TypeProfile) -> float:
    g, p = profile.opportunism, profile.pop_share
    return (1.0 - g) * p + g


def eeft_closed_form(profile: TypeProfile) -> OraclePrediction:
    """Expected formation time of a fully homophilic type in a large network.

    ``1/p + L*(alpha_s) / ((1 - gamma) p + gamma)``: a geometric wait for the
    first same-type meeting, then ``L*(alpha_s) = L*(0) - 1`` further links
    each found with the second-stage success probability.
    """
    p = profile.pop_share
    rest = compute_L_star(profile, profile.alpha_same)
    L0 = compute_L_star(profile, 0.0)
    if L0 == 0:
        val = 0.0
    elif p == 0:
        val = math.inf
    else:
        val = 1.0 / p + rest / _second_stage_prob(profile)
    return OraclePrediction(
        "scalar",
        val,
        "expected ego-network formation time, homophilic types",
        "h = 1 for the type, large t",
        in_regime=_h1(profile),
        params={"p": p, "gamma": profile.opportunism, "L0": L0, "L_rest": rest},
    )


def eft_pmf_closed_form(profile: TypeProfile, max_T: int = 200) -> OraclePrediction:
    """Formation-time pmf of a homophilic type, truncated at ``max_T``.

    The formation time is ``N1 + N2`` with ``N1 ~ Geometric(p)`` (trials to
    the first same-type meeting) and ``N2`` the number of trials to collect
    ``L*(0) - 1`` successes at rate ``(1 - gamma) p + gamma``.  Mass beyond
    ``max_T`` is reported in ``tail``.
    """
    p = profile.pop_share
    L0 = compute_L_star(profile, 0.0)
    rest = compute_L_star(profile, profile.alpha_same)
    meta = dict(
        provenance="formation-time pmf as geometric / negative binomial convolution",
        validity="h = 1 for the type, large t",
        in_regime=_h1(profile),
        params={"p": p, "gamma": profile.opportunism, "L0": L0, "max_T": max_T},
    )
    if L0 == 0:
        return OraclePrediction("pmf", EmpiricalPmf(np.array([0.0]), np.array([1.0])), **meta)
    if not 0 < p <= 1:
        raise ValueError("pop_share must be positive for a finite formation time")
    n = np.arange(max_T + 1)
    g1 = np.zeros(max_T + 1)
    g1[1:] = stats.geom.pmf(n[1:], p)
    if rest == 0:
        total = g1
    else:
        q = _second_stage_prob(profile)
        g2 = np.zeros(max_T + 1)
        # scipy's nbinom counts failures before the r-th success
        g2[rest:] = stats.nbinom.pmf(n[rest:] - rest, rest, q)
        total = np.convolve(g1, g2)[: max_T + 1]
    support = n[total > 0]
    mass = total[total > 0]
    tail = max(0.0, 1.0 - float(mass.sum()))
    return OraclePrediction("pmf", EmpiricalPmf(support.astype(float), mass, tail=tail), **meta)


def optimal_bonding_bound(config: SocietyConfig, shares=None) -> OraclePrediction:
    """Largest achievable average utility, reached iff every type is homophilic.

    ``sum_k p_k (v_k(alpha_s L*_k(0)) - c_k L*_k(0))``.  ``shares`` may
    override the population shares, e.g. with realised ones.
    """
    shares = config.shares if shares is None else list(shares)
    total = 0.0
    for p, prof in zip(shares, config.profiles):
        L0 = compute_L_star(prof, 0.0)
        total += p * prof.utility(L0, 0)
    attained = all(_h1(p) for p in config.profiles)
    return OraclePrediction(
        "bound",
        total,
        "optimal average bonding utility",
        "any society; U^t tends to the bound iff all h = 1",
        params={"attained": attained, "shares": [float(s) for s in shares]},
    )


# -- popularity capital ---------------------------------------------------


def mean_gregariousness(config: SocietyConfig) -> float:
    """``L_bar = sum_k p_k L*_k(0)``."""
    return math.fsum(p.pop_share * compute_L_star(p, 0.0) for p in config.profiles)


def growth_exponent(config: SocietyConfig) -> float:
    """``b = sum_k p_k / L*_k(0)`` of the opportunistic lower bound.

    Types with ``L*(0) = 0`` never link and are skipped.
    """
    out = 0.0
    for p in config.profiles:
        L0 = compute_L_star(p, 0.0)
        if L0 > 0:
            out += p.pop_share / L0
    return out


def _tolerant(config: SocietyConfig) -> bool:
    return all(exogenous_homophily_index(p) == 0.0 for p in config.profiles)


def popularity_log_curve(i: int, L_bar: float, config: Optional[SocietyConfig] = None) -> OraclePrediction:
    """Expected popularity ``L_bar * log(t / (i - 1))`` of agent ``i``.

    Valid in tolerant societies without opportunism.  ``i = 1`` is singular
    and flagged out of regime.
    """
    ok = i >= 2
    reg = ok
    if config is not None:
        reg = ok and _tolerant(config) and all(p.opportunism == 0 for p in config.profiles)

    def curve(t):
        t = np.asarray(t, dtype=float)
        return L_bar * np.log(t / (i - 1)) if ok else np.full_like(t, np.nan)

    return OraclePrediction(
        "curve",
        curve,
        "logarithmic popularity growth, tolerant and non-opportunistic",
        "h = 0 and gamma = 0 for all types, t >= i >= 2",
        in_regime=reg,
        params={"i": i, "L_bar": L_bar},
    )


def popularity_sublinear_bound(i: int, b: float, config: Optional[SocietyConfig] = None) -> OraclePrediction:
    """Lower bound ``((t / i)^b - 1) / b`` on the expected popularity of agent ``i``.

    Valid in tolerant, fully opportunistic societies.
    """
    if not b > 0:
        raise ValueError(f"growth exponent must be positive, got {b}")
    reg = True
    if config is not None:
        reg = _tolerant(config) and all(p.opportunism == 1 for p in config.profiles)

    def curve(t):
        t = np.asarray(t, dtype=float)
        return ((t / i) ** b - 1.0) / b

    return OraclePrediction(
        "curve",
        curve,
        "sublinear popularity lower bound, tolerant and opportunistic",
        "h = 0 and gamma = 1 for all types, t >= i",
        in_regime=reg,
        params={"i": i, "b": b},
    )


def crossover_time_bound(i: int, L_bar: float, b: float) -> OraclePrediction:
    """Upper bound on when opportunism starts to pay off in popularity.

    ``i * (-L_bar * W_{-1}(-(1/L_bar) exp(-1/L_bar)))^(1/b)``.  Needs
    ``L_bar > 1`` so the Lambert W argument sits inside the lower branch.
    """
    params = {"i": i, "L_bar": L_bar, "b": b}
    meta = dict(
        provenance="crossover time of opportunistic vs non-opportunistic popularity (Lambert W form)",
        validity="tolerant society, L_bar > 1",
    )
    if not L_bar > 1:
        return OraclePrediction("bound", math.nan, in_regime=False, params=params,
                                notes="L_bar <= 1: W_-1 argument outside its branch", **meta)
    x = -math.exp(-1.0 / L_bar) / L_bar
    w = lambert_wm1(x)
    params["w"] = w
    val = i * (-L_bar * w) ** (1.0 / b)
    return OraclePrediction("bound", val, params=params, **meta)


def crossover_time_bisection(i: int, L_bar: float, b: float, lag: int = 1, xtol: float = 1e-9) -> float:
    """Nontrivial root of ``L_bar log(t / (i - lag)) = ((t / i)^b - 1) / b`` by bisection.

    ``lag=1`` is the non-opportunistic mean popularity as derived;
    ``lag=0`` drops the lag, which is the equation the Lambert W form solves
    exactly.  Independent of :func:`crossover_time_bound`.
    """

    def f(t):
        return ((t / i) ** b - 1.0) / b - L_bar * math.log(t / (i - lag))

    # f decreases until (t/i)^b = L_bar, then increases without bound
    lo = i * L_bar ** (1.0 / b)
    if f(lo) >= 0:
        raise ValueError("no sign change: crossover equation has no nontrivial root")
    hi = 2.0 * lo
    while f(hi) <= 0:
        hi *= 2.0
    return optimize.bisect(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)


def intolerant_exponent(L: int) -> float:
    """Per-type growth exponent of opportunistic homophilic agents.

    ``sum_{m=0}^{L-1} L / ((m+1) L - m) * prod_{v=1}^{m} (1 - 1 / (v L - (v - 1)))``.
    """
    if L < 1:
        raise ValueError("exponent defined for L*(0) >= 1")
    total = 0.0
    prod = 1.0
    for m in range(L):
        if m >= 1:
            prod *= 1.0 - 1.0 / (m * L - (m - 1))
        total += L / ((m + 1) * L - m) * prod
    return total


def intolerant_growth_curves(profile: TypeProfile, i: int) -> dict[str, OraclePrediction]:
    """Popularity growth of a homophilic type: log curve and opportunistic bound."""
    L0 = compute_L_star(profile, 0.0)
    h1 = _h1(profile)
    bth = intolerant_exponent(L0) if L0 >= 1 else math.nan

    def log_curve(t):
        t = np.asarray(t, dtype=float)
        return L0 * np.log(t / (i - 1))

    def pow_curve(t):
        t = np.asarray(t, dtype=float)
        return ((t / i) ** bth - 1.0) / bth

    return {
        "log": OraclePrediction(
            "curve", log_curve, "logarithmic popularity growth, homophilic non-opportunistic",
            "h = 1, gamma = 0, i >= 2", in_regime=h1 and profile.opportunism == 0 and i >= 2,
            params={"i": i, "L0": L0},
        ),
        "power": OraclePrediction(
            "curve", pow_curve, "power-law popularity lower bound, homophilic opportunistic",
            "h = 1, gamma = 1", in_regime=h1 and profile.opportunism == 1 and L0 >= 1,
            params={"i": i, "L0": L0, "b": bth},
        ),
    }


def meanfield_popularity_cdf(profile: TypeProfile) -> OraclePrediction:
    """Mean-field in-degree CDF ``1 - exp(-d / L*(0))`` of a homophilic type."""
    L0 = compute_L_star(profile, 0.0)

    def cdf(d):
        d = np.asarray(d, dtype=float)
        if L0 == 0:
            return np.where(d >= 0, 1.0, 0.0)
        return np.where(d >= 0, 1.0 - np.exp(-d / L0), 0.0)

    return OraclePrediction(
        "curve", cdf, "mean-field popularity distribution",
        "h = 1, gamma = 0", in_regime=_h1(profile) and profile.opportunism == 0,
        params={"L0": L0},
    )


def connectedness_predicate(config: SocietyConfig) -> OraclePrediction:
    """Whether the network ends up connected almost surely.

    True iff some type is both tolerant to some degree (``h < 1``) and not
    fully opportunistic (``gamma < 1``).
    """
    val = any(
        exogenous_homophily_index(p) < 1.0 and p.opportunism < 1.0 for p in config.profiles
    )
    return OraclePrediction(
        "predicate", val, "asymptotic connectedness",
        "any society, t -> infinity",
        params={"min_components_if_disconnected": config.n_types if not val else 1},
    )


def eft_fosd_prediction(a: TypeProfile, b: TypeProfile) -> OraclePrediction:
    """Predicted dominance between the formation times of two homophilic types.

    Formation time grows with gregariousness and shrinks with population
    share and opportunism.  Returns ``a_dominates`` when ``a`` is predicted
    to take longer, ``neither`` when the parameters pull both ways or agree.
    """
    signs = set()
    La, Lb = compute_L_star(a, 0.0), compute_L_star(b, 0.0)
    if La != Lb:
        signs.add(1 if La > Lb else -1)
    if a.pop_share != b.pop_share:
        signs.add(1 if a.pop_share < b.pop_share else -1)
    if a.opportunism != b.opportunism:
        signs.add(1 if a.opportunism < b.opportunism else -1)
    if signs == {1}:
        v = Verdict.A_DOMINATES
    elif signs == {-1}:
        v = Verdict.B_DOMINATES
    else:
        v = Verdict.NEITHER
    return OraclePrediction(
        "predicate", v, "formation-time ordering in gregariousness, share and opportunism",
        "h = 1 for both types", in_regime=_h1(a) and _h1(b),
        notes="conflicting parameter changes" if len(signs) > 1 else "",
    )


def all_predictions(config: SocietyConfig, i: int = 10) -> list[OraclePrediction]:
    """Every closed-form prediction that can be evaluated for ``config``."""
    out = []
    for prof in config.profiles:
        out.append(eeft_closed_form(prof))
        out.append(eft_pmf_closed_form(prof))
        out.append(meanfield_popularity_cdf(prof))
        out.extend(intolerant_growth_curves(prof, i).values())
    out.append(optimal_bonding_bound(config))
    out.append(connectedness_predicate(config))
    L_bar, b = mean_gregariousness(config), growth_exponent(config)
    out.append(popularity_log_curve(i, L_bar, config))
    if b > 0:
        out.append(popularity_sublinear_bound(i, b, config))
        cb = crossover_time_bound(i, L_bar, b)
        cb.in_regime = cb.in_regime and _tolerant(config)
        out.append(cb)
    return out
