"""Named experiment presets at desk scale.

Network sizes and replication counts are our own choices and are recorded
in each preset.  Every preset names the acceptance criteria it backs and
scores them in its ``score`` function.

Profiles use ``v(x) = sqrt(x)`` and ``alpha_same = 1``; the link cost sets the
gregariousness and ``alpha_diff`` the homophily index.  Intermediate indices
come from the calibration table :data:`PARTIAL`, found by exhaustive scan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..metrics import EmpiricalPmf, Verdict, fosd_test, preferential_attachment_check_arrays
from ..oracles import (
    crossover_time_bisection,
    crossover_time_bound,
    eeft_closed_form,
    eft_fosd_prediction,
    eft_pmf_closed_form,
    growth_exponent,
    mean_gregariousness,
    meanfield_popularity_cdf,
    popularity_log_curve,
    popularity_sublinear_bound,
)
from ..utility import (
    AggregationCurve,
    ConfigError,
    SocietyConfig,
    TypeProfile,
    compute_L_star,
    cost_for_gregariousness,
    exogenous_homophily_index,
)
from .runner import Comparison, GridPoint, PointResult, bootstrap_ci

__all__ = [
    "PARTIAL",
    "ExperimentPreset",
    "PRESETS",
    "get_preset",
    "custom_preset",
    "homophilic",
    "tolerant",
    "partial",
]

SQRT = AggregationCurve("sqrt", 1.0)

# homophily index -> (alpha_diff, link_cost, L*(0), Lbar*(0)) for alpha_same = 1
PARTIAL = {
    "1/3": (0.775, 0.222, 5, 4),
    "2/5": (0.715, 0.247, 4, 3),
    "1/2": (0.62, 0.227, 5, 3),
}


def homophilic(L: int, gamma: float, share: float, name: str = "") -> TypeProfile:
    """Type with h = 1 and gregariousness ``L``."""
    return TypeProfile(1.0, 0.0, cost_for_gregariousness(SQRT, 1.0, L), SQRT, gamma, share, name)


def tolerant(L: int, gamma: float, share: float, name: str = "") -> TypeProfile:
    """Type with h = 0 (same benefit from any followee) and gregariousness ``L``."""
    return TypeProfile(1.0, 1.0, cost_for_gregariousness(SQRT, 1.0, L), SQRT, gamma, share, name)


def partial(h: str, gamma: float, share: float, name: str = "") -> TypeProfile:
    """Type with an intermediate homophily index from :data:`PARTIAL`."""
    a_d, c, _, _ = PARTIAL[h]
    return TypeProfile(1.0, a_d, c, SQRT, gamma, share, name)


ScoreFn = Callable[[list, int], tuple]


@dataclass
class ExperimentPreset:
    """A named sweep of societies with the measures and checks to run.

    ``points`` is the parameter grid (one society per point); ``score``
    turns the reduced results into oracle comparisons and plot series.
    """

    name: str
    description: str
    criteria: tuple
    points: list[GridPoint]
    score: Optional[ScoreFn] = None
    seed: int = 0
    checkpoints: tuple = ()
    oracles: tuple = ()
    outputs: tuple = ("csv", "json", "svg")
    plots: dict = field(default_factory=dict)

    def __post_init__(self):
        errs = []
        if not self.points:
            errs.append(f"preset {self.name}: sweep grid is empty")
        for pt in self.points:
            for c in self.checkpoints:
                if c > pt.society.horizon:
                    errs.append(f"preset {self.name}: checkpoint {c} beyond horizon of {pt.label}")
        if errs:
            raise ConfigError(errs)

    @property
    def sweep(self) -> list[str]:
        return [p.label for p in self.points]


def _society(profiles, horizon, reps, seed) -> SocietyConfig:
    return SocietyConfig(tuple(profiles), horizon=horizon, seed=seed, replication_count=reps)


def _cdf_series(plot, label, x):
    x = np.asarray(x, dtype=float)
    x = x[np.isfinite(x)]
    pmf = EmpiricalPmf.from_samples(x)
    return {"plot": plot, "series": label, "x": pmf.support.tolist(), "y": np.cumsum(pmf.mass).tolist()}


def _pooled(res: PointResult, key_prefix: str, types=None) -> np.ndarray:
    keys = sorted(k for k in res.samples if k.startswith(key_prefix))
    if types is not None:
        keys = [f"{key_prefix}{k}" for k in types]
    return np.concatenate([res.samples[k] for k in keys])


# -- fig3a: formation time, homophily ------------------------------------------


def _score_fig3a(results, seed):
    tol_res, hom_res = results
    comps, series = [], []
    mism = int(tol_res.values["eft_not_L0"].sum())
    comps.append(Comparison(
        "eft_equals_gregariousness", 1, 0, mism, 0, mism == 0,
        provenance="deterministic formation time in tolerant societies",
        detail=f"{tol_res.reps} replications, horizon {tol_res.society.horizon}",
    ))
    prof = hom_res.society.profiles[0]
    pred = eeft_closed_form(prof)
    x = _pooled(hom_res, "eft_type")
    done = x[np.isfinite(x)]
    mean = float(done.mean())
    rel = abs(mean - pred.value) / pred.value
    comps.append(Comparison(
        "eeft_closed_form", 2, pred.value, mean, 0.03, rel <= 0.03, pred.in_regime, pred.provenance,
        detail=f"relative error {rel:.4f}; {done.size} agents, {x.size - done.size} unsatisfied",
    ))
    pmf_pred = eft_pmf_closed_form(prof, max_T=int(done.max()) + 50)
    emp = EmpiricalPmf.from_samples(done)
    tv = emp.total_variation(pmf_pred.value)
    comps.append(Comparison(
        "eft_pmf_total_variation", 3, 0.0, tv, 0.05, tv < 0.05, pmf_pred.in_regime, pmf_pred.provenance,
    ))
    series.append(_cdf_series("eft_cdf", "h=0 empirical", _pooled(tol_res, "eft_type")))
    series.append(_cdf_series("eft_cdf", "h=1 empirical", done))
    pv = pmf_pred.value
    series.append({"plot": "eft_cdf", "series": "h=1 oracle", "x": pv.support.tolist(),
                   "y": np.cumsum(pv.mass).tolist()})
    return comps, series


def _fig3a(seed=3):
    m_tol = (("eft", {"cohort": (1, 2000)}),)
    m_hom = (("eft", {"cohort": (1000, 4500)}),)
    return ExperimentPreset(
        "fig3a",
        "Formation time under h = 0 vs h = 1 (two types, p = 0.5, gamma = 0.5, L*(0) = 5).",
        (1, 2, 3),
        [
            GridPoint("h=0", _society([tolerant(5, 0.5, 0.5), tolerant(5, 0.5, 0.5)], 2000, 20, seed), m_tol),
            GridPoint("h=1", _society([homophilic(5, 0.5, 0.5), homophilic(5, 0.5, 0.5)], 5000, 300, seed), m_hom),
        ],
        _score_fig3a,
        seed,
        oracles=("eeft_closed_form", "eft_pmf_closed_form"),
        plots={"eft_cdf": ("T", "CDF")},
    )


# -- fig3b / fig3c: formation time orderings ----------------------------------


def _eft_order(res: PointResult, name: str, seed: int):
    a_prof, b_prof = res.society.profiles
    pred = eft_fosd_prediction(a_prof, b_prof)
    xa, xb = res.samples["eft_type0"], res.samples["eft_type1"]
    a = EmpiricalPmf.from_samples(xa[np.isfinite(xa)])
    b = EmpiricalPmf.from_samples(xb[np.isfinite(xb)])
    got = fosd_test(a, b)
    comp = Comparison(
        f"eft_fosd_{name}", 4, pred.value.value, got.value, 2.0 / math.sqrt(min(a.n, b.n)),
        got is pred.value, pred.in_regime, pred.provenance,
        detail=f"type 0 mean {a.mean():.3f}, type 1 mean {b.mean():.3f}",
    )
    return comp, [_cdf_series(f"eft_cdf_{name}", f"type {k}", x) for k, x in ((0, xa), (1, xb))]


def _score_orderings(results, seed):
    comps, series = [], []
    for res in results:
        c, s = _eft_order(res, res.label, seed)
        comps.append(c)
        series.extend(s)
    return comps, series


def _fig3b(seed=5):
    m = (("eft", {"cohort": (500, 1800)}),)
    return ExperimentPreset(
        "fig3b",
        "Formation-time CDFs for gamma = 0 vs 1 and for L*(0) = 4 vs 8 (h = 1).",
        (4,),
        [
            GridPoint("opportunism", _society([homophilic(5, 0.0, 0.5), homophilic(5, 1.0, 0.5)], 2000, 20, seed), m),
            GridPoint("gregariousness", _society([homophilic(4, 0.5, 0.5), homophilic(8, 0.5, 0.5)], 2000, 20, seed), m),
        ],
        _score_orderings,
        seed,
        oracles=("eft_fosd_prediction",),
        plots={"eft_cdf_opportunism": ("T", "CDF"), "eft_cdf_gregariousness": ("T", "CDF")},
    )


def _fig3c(seed=7):
    m = (("eft", {"cohort": (500, 1800)}),)
    return ExperimentPreset(
        "fig3c",
        "Formation-time CDFs for population shares 0.2 vs 0.8 (h = 1).",
        (4,),
        [GridPoint("share", _society([homophilic(5, 0.5, 0.2), homophilic(5, 0.5, 0.8)], 2000, 20, seed), m)],
        _score_orderings,
        seed,
        oracles=("eft_fosd_prediction",),
        plots={"eft_cdf_share": ("T", "CDF")},
    )


# -- fig4: bonding capital vs homophily ----------------------------------------


def _score_fig4(results, seed):
    comps, series = [], []
    xs, ys, yb = [], [], []
    for res in results:
        h = exogenous_homophily_index(res.society.profiles[0])
        U = res.values["U_total"]
        Ub = res.values["U_bar"]
        xs.append(h)
        ys.append(float(U.mean()))
        yb.append(float(Ub.mean()))
        if h == 1.0:
            rel = np.abs(U - Ub) / Ub
            worst = float(rel.max())
            comps.append(Comparison(
                "utility_reaches_optimum", 5, 0.0, worst, 0.02, worst <= 0.02,
                provenance="optimal bonding utility attained iff all h = 1",
                detail=f"max relative gap over {res.reps} replications at t = {res.society.horizon}",
            ))
            t0 = res.values["t0"]
            om = res.values["omega_min_after_t0"]
            cross = int(res.values["cross_edges"].sum())
            ok = bool(np.all(t0 > 0) and np.all(om >= 2) and cross == 0)
            comps.append(Comparison(
                "structural_holes", 5, 2, int(om.min()), 0, ok,
                provenance="at least one non-singleton component per type",
                detail=f"omega >= 2 from step max(t0) = {int(t0.max())} on; cross-type links {cross}",
            ))
        else:
            gap = Ub - U
            lo, hi = bootstrap_ci(gap, seed=seed)
            comps.append(Comparison(
                f"utility_below_optimum_h={h:.3f}", 5, "> 0", float(gap.mean()), "95% bootstrap",
                lo > 0, in_regime=h > 0, provenance="optimal bonding utility attained iff all h = 1",
                detail=f"gap CI [{lo:.5f}, {hi:.5f}]" + ("" if h > 0 else "; h = 0 lies outside the h > 0 premise"),
            ))
    order = np.argsort(xs)
    series.append({"plot": "utility_vs_h", "series": "U^t", "x": [xs[i] for i in order], "y": [ys[i] for i in order]})
    series.append({"plot": "utility_vs_h", "series": "optimum", "x": [xs[i] for i in order], "y": [yb[i] for i in order]})
    return comps, series


def _fig4(seed=11):
    m = (("bonding", {}), ("omega", {}))
    pts = [GridPoint("h=1", _society([homophilic(5, 0.5, 0.5)] * 2, 3000, 20, seed), m)]
    for h in ("1/2", "2/5", "1/3"):
        pts.append(GridPoint(f"h={h}", _society([partial(h, 0.5, 0.5)] * 2, 3000, 20, seed), m))
    pts.append(GridPoint("h=0", _society([tolerant(5, 0.5, 0.5)] * 2, 3000, 20, seed), m))
    return ExperimentPreset(
        "fig4",
        "Average utility against the homophily index (two identical types).",
        (5,),
        pts,
        _score_fig4,
        seed,
        oracles=("optimal_bonding_bound",),
        plots={"utility_vs_h": ("h", "average utility")},
    )


# -- fig5: popularity growth and opportunism -------------------------------------

FOCUS_AGENT = 10


def _score_fig5(results, seed):
    r0, r1 = results
    comps, series = [], []
    i = FOCUS_AGENT
    cfg0 = r0.society
    P0 = r0.values["pop_agent"].astype(float)
    P1 = r1.values["pop_agent"].astype(float)
    T = P0.shape[1]
    t = np.arange(1, T + 1)
    m0, m1 = P0.mean(0), P1.mean(0)
    se1 = P1.std(0, ddof=1) / math.sqrt(P1.shape[0])
    L_bar = mean_gregariousness(cfg0)
    logc = popularity_log_curve(i, L_bar, cfg0)
    sel = t >= i
    slope = float(np.polyfit(np.log(t[sel] / (i - 1)), m0[sel], 1)[0])
    rel = abs(slope - L_bar) / L_bar
    comps.append(Comparison(
        "log_growth_slope", 7, L_bar, slope, 0.10, rel <= 0.10, logc.in_regime, logc.provenance,
        detail=f"relative error {rel:.4f}, {r0.reps} replications, agent {i}",
    ))
    b = growth_exponent(r1.society)
    lb = popularity_sublinear_bound(i, b, r1.society)
    bound = lb(t)
    late = t > 2 * i
    margin = (m1 - bound + 3 * se1)[late]
    comps.append(Comparison(
        "sublinear_lower_bound", 8, "mean >= bound - 3 se", float(margin.min()), 0.0,
        bool(np.all(margin >= 0)), lb.in_regime, lb.provenance,
        detail=f"b = {b:.4f}; worst margin at t = {int(t[late][np.argmin(margin)])}",
    ))
    cb = crossover_time_bound(i, L_bar, b)
    below = np.nonzero(m1 <= m0)[0]
    cross = int(below.max()) + 2 if below.size else 1
    observed_cross = cross if cross <= T else math.inf
    comps.append(Comparison(
        "crossover_below_bound", 9, cb.value, observed_cross, 0.0,
        bool(cross <= T and cross <= cb.value), cb.in_regime, cb.provenance,
        detail="first step after which the gamma = 1 mean stays above the gamma = 0 mean",
    ))
    root = crossover_time_bisection(i, L_bar, b, lag=1)
    rel = abs(cb.value - root) / root
    comps.append(Comparison(
        "crossover_closed_form_vs_bisection", 9, root, cb.value, 1e-6, rel <= 1e-6, cb.in_regime,
        cb.provenance,
        detail=f"relative gap {rel:.3e}; root of the lag-0 equation = "
        f"{crossover_time_bisection(i, L_bar, b, lag=0):.6f}",
    ))
    rep = preferential_attachment_check_arrays(
        r1.samples["pa_deg"], r1.samples["pa_inc"], strata=r1.samples["pa_t"]
    )
    frac = rep.fraction_monotone
    comps.append(Comparison(
        "preferential_attachment", 10, ">= 0.9 monotone", frac, 0.9, frac >= 0.9,
        provenance="preferential attachment under full opportunism",
        detail=f"{len(rep.verdicts)} adjacent pairs over checkpoints {sorted(set(r1.samples['pa_t'].tolist()))}; "
        f"bins {[(b_.lo, b_.hi) for b_ in rep.bins]}; {len(rep.flags)} merged",
    ))
    stride = max(1, T // 200)
    idx = np.arange(i - 1, T, stride)
    series += [
        {"plot": "popularity", "series": "gamma=0", "x": t[idx].tolist(), "y": m0[idx].tolist()},
        {"plot": "popularity", "series": "gamma=1", "x": t[idx].tolist(), "y": m1[idx].tolist()},
        {"plot": "popularity", "series": "log oracle", "x": t[idx].tolist(), "y": logc(t[idx]).tolist()},
        {"plot": "popularity", "series": "sublinear bound", "x": t[idx].tolist(), "y": bound[idx].tolist()},
    ]
    return comps, series


def _fig5(seed=13):
    pop = ("popularity", {"agent": FOCUS_AGENT})
    pts = [
        GridPoint("gamma=0", _society([tolerant(5, 0.0, 1.0)], 2000, 300, seed), (pop,)),
        GridPoint("gamma=1", _society([tolerant(5, 1.0, 1.0)], 2000, 300, seed),
                  (pop, ("attachment", {"checkpoints": (500, 1000), "window": 500}))),
    ]
    return ExperimentPreset(
        "fig5",
        "Popularity of agent 10 in a tolerant society, gamma = 0 vs 1 (paired seeds).",
        (7, 8, 9, 10),
        pts,
        _score_fig5,
        seed,
        oracles=("popularity_log_curve", "popularity_sublinear_bound", "crossover_time_bound"),
        plots={"popularity": ("t", "mean in-degree")},
    )


# -- fig6: popularity inequality --------------------------------------------------


def _score_fig6(results, seed):
    (res,) = results
    p3, p6 = res.society.profiles
    a = EmpiricalPmf.from_samples(res.samples["indeg_type1"])
    b = EmpiricalPmf.from_samples(res.samples["indeg_type0"])
    got = fosd_test(a, b)
    F6, F3 = meanfield_popularity_cdf(p6), meanfield_popularity_cdf(p3)
    d = np.arange(0, int(max(a.support.max(), b.support.max())) + 1)
    mf = bool(np.all(F6(d) <= F3(d)) and np.any(F6(d) < F3(d)))
    comps = [
        Comparison("popularity_fosd_gregarious", 11, Verdict.A_DOMINATES.value, got.value,
                   2.0 / math.sqrt(min(a.n, b.n)), got is Verdict.A_DOMINATES,
                   provenance="popularity inequality in homophilic societies",
                   detail=f"means {a.mean():.3f} (L*=6) vs {b.mean():.3f} (L*=3)"),
        Comparison("meanfield_predicts_order", 11, True, mf, 0, mf, F6.in_regime and F3.in_regime, F6.provenance),
    ]
    series = [
        _cdf_series("indegree_cdf", "L*=3", res.samples["indeg_type0"]),
        _cdf_series("indegree_cdf", "L*=6", res.samples["indeg_type1"]),
        {"plot": "indegree_cdf", "series": "mean-field L*=3", "x": d.tolist(), "y": F3(d).tolist()},
        {"plot": "indegree_cdf", "series": "mean-field L*=6", "x": d.tolist(), "y": F6(d).tolist()},
    ]
    return comps, series


def _fig6(seed=17):
    return ExperimentPreset(
        "fig6",
        "In-degree distributions of L*(0) = 3 vs 6 in a homophilic society (gamma = 0).",
        (11,),
        [GridPoint("L3-vs-L6", _society([homophilic(3, 0.0, 0.5), homophilic(6, 0.0, 0.5)], 3000, 10, seed),
                   (("indegree", {}),))],
        _score_fig6,
        seed,
        oracles=("meanfield_popularity_cdf",),
        plots={"indegree_cdf": ("in-degree", "CDF")},
    )


# -- fig8: centrality comparative statics ------------------------------------------

BTW_CHECKPOINTS = (250, 500, 1000)


def _btw_series(res, plot):
    out = []
    for k in range(res.society.n_types):
        v = res.values[f"btw_type{k}"].mean(0)
        out.append({"plot": plot, "series": f"type {k}", "x": list(BTW_CHECKPOINTS), "y": v.tolist()})
    return out


def _score_btw_pair(label, criterion, expect_first_larger):
    name = f"betweenness_{label}"

    def score(results, seed):
        (res,) = results
        b0 = res.values["btw_type0"][:, -1]
        b1 = res.values["btw_type1"][:, -1]
        diff = (b0 - b1) if expect_first_larger else (b1 - b0)
        lo, hi = bootstrap_ci(diff, seed=seed)
        comp = Comparison(
            name, criterion, "> 0", float(diff.mean()), "95% bootstrap", lo > 0,
            provenance="average betweenness comparative statics",
            detail=f"CI [{lo:.2f}, {hi:.2f}]; means {b0.mean():.2f} vs {b1.mean():.2f}",
        )
        return [comp], _btw_series(res, name)

    return score


def _fig8(which, seed=19):
    m = (("betweenness", {"checkpoints": BTW_CHECKPOINTS}),)
    setup = {
        "a": ("gregariousness", [homophilic(3, 0.5, 0.5), homophilic(6, 0.5, 0.5)],
              "less gregarious type is more central (L*(0) = 3 vs 6)"),
        "b": ("share", [homophilic(5, 0.5, 0.7), homophilic(5, 0.5, 0.3)],
              "majority type is more central (p = 0.7 vs 0.3)"),
        "c": ("opportunism", [homophilic(5, 0.0, 0.5), homophilic(5, 1.0, 0.5)],
              "less opportunistic type is more central (gamma = 0 vs 1)"),
    }[which]
    label, profiles, desc = setup
    return ExperimentPreset(
        f"fig8{which}",
        f"Average betweenness of two homophilic types: {desc}.",
        (13,),
        [GridPoint(label, _society(profiles, 1000, 50, seed), m)],
        _score_btw_pair(label, 13, True),
        seed,
        checkpoints=BTW_CHECKPOINTS,
        plots={f"betweenness_{label}": ("t", "average betweenness")},
    )


# -- fig9 / fig10: structural holes and their filling --------------------------------


def _margin(res):
    b = np.stack([res.values[f"btw_type{k}"][:, -1] for k in range(3)], axis=1)
    return b[:, 2] - b[:, :2].max(axis=1)


def _score_fig9(results, seed):
    by = {r.label: r for r in results}
    comps, series = [], []
    m0 = _margin(by["gamma3=0"])
    lo, hi = bootstrap_ci(m0, seed=seed)
    comps.append(Comparison(
        "tolerant_type_most_central_gamma3=0", 14, "> 0", float(m0.mean()), "95% bootstrap", lo > 0,
        provenance="tolerant agents fill structural holes",
        detail=f"b3 - max(b1, b2) CI [{lo:.2f}, {hi:.2f}]",
    ))
    m1 = _margin(by["gamma3=1"])
    rng = np.random.Generator(np.random.Philox(seed + 1))
    boots = np.array([
        m0[rng.integers(0, m0.size, m0.size)].mean() - m1[rng.integers(0, m1.size, m1.size)].mean()
        for _ in range(2000)
    ])
    lo2, hi2 = np.quantile(boots, [0.025, 0.975])
    comps.append(Comparison(
        "ordering_weakens_gamma3=1", 14, "> 0", float(m0.mean() - m1.mean()), "95% bootstrap",
        bool(lo2 > 0),
        provenance="tolerant agents fill structural holes only when they explore",
        detail=f"margin at gamma3=1: {m1.mean():.2f}; drop CI [{lo2:.2f}, {hi2:.2f}]",
    ))
    for r in results:
        series += _btw_series(r, f"betweenness_{r.label}")
    return comps, series


def _fig9_society(g3, horizon, reps, seed):
    return _society(
        [homophilic(5, 1.0, 0.4, "A"), homophilic(5, 1.0, 0.4, "B"), partial("1/3", g3, 0.2, "bridge")],
        horizon, reps, seed,
    )


def _fig9(seed=23):
    m = (("betweenness", {"checkpoints": BTW_CHECKPOINTS}), ("bonding", {}))
    return ExperimentPreset(
        "fig9",
        "Two homophilic types (gamma = 1) and a tolerant minority (h = 1/3) with gamma3 in {0, 0.1, 1}.",
        (14,),
        [GridPoint(f"gamma3={g}", _fig9_society(g, 1000, 50, seed), m) for g in (0, 0.1, 1)],
        _score_fig9,
        seed,
        checkpoints=BTW_CHECKPOINTS,
    )


def _score_fig10(results, seed):
    by = {r.label: r for r in results}
    comps = []
    from ..oracles import connectedness_predicate

    for label, expect in (("bridge", True), ("control", False)):
        res = by[label]
        pred = connectedness_predicate(res.society)
        conn = res.values["connected_satisfied"].astype(bool)
        if expect:
            frac = float(conn.mean())
            ok = bool(pred.value) and frac >= 0.99
            comps.append(Comparison(
                "connected_with_tolerant_explorers", 6, ">= 0.99", frac, 0.99, ok, provenance=pred.provenance,
                detail=f"{int(conn.sum())} of {res.reps} replications connected; predicate {pred.value}",
            ))
        else:
            om = res.values["omega_end"]
            ok = (not pred.value) and not conn.any() and bool(np.all(om >= res.society.n_types))
            comps.append(Comparison(
                "homophilic_control_never_connected", 6, 0, int(conn.sum()), 0, ok, provenance=pred.provenance,
                detail=f"min omega {int(om.min())}; predicate {pred.value}",
            ))
    return comps, []


def _fig10(seed=29):
    m = (("connected", {}),)
    control = _society([homophilic(5, 1.0, 1 / 3), homophilic(5, 1.0, 1 / 3), homophilic(5, 0.5, 1 / 3)], 2000, 200, seed)
    bridge = _society([homophilic(5, 1.0, 1 / 3), homophilic(5, 1.0, 1 / 3), partial("1/3", 0.5, 1 / 3)], 2000, 200, seed)
    return ExperimentPreset(
        "fig10",
        "Connectedness with one tolerant type (h = 1/3, gamma = 0.5) among two homophilic types, plus an all-homophilic control.",
        (6,),
        [GridPoint("bridge", bridge, m), GridPoint("control", control, m)],
        _score_fig10,
        seed,
        oracles=("connectedness_predicate",),
    )


# -- fig11: dominant coalition ---------------------------------------------------------


def _score_fig11(results, seed):
    (res,) = results
    m = _margin(res)
    lo, hi = bootstrap_ci(m, seed=seed)
    comp = Comparison(
        "homophilic_type_most_central", 14, "> 0", float(m.mean()), "95% bootstrap", lo > 0,
        provenance="homophilic group as an information hub",
        detail=f"b3 - max(b1, b2) CI [{lo:.2f}, {hi:.2f}]",
    )
    return [comp], _btw_series(res, "betweenness_fig11")


def _fig11(seed=31):
    m = (("betweenness", {"checkpoints": BTW_CHECKPOINTS}), ("bonding", {}))
    soc = _society([partial("1/3", 0.5, 1 / 3, "A"), partial("1/3", 0.5, 1 / 3, "B"), homophilic(5, 0.5, 1 / 3, "hub")],
                   1000, 50, seed)
    return ExperimentPreset(
        "fig11",
        "Two tolerant types (h = 1/3) and one homophilic type (h = 1), gamma = 0.5.",
        (14,),
        [GridPoint("coalition", soc, m)],
        _score_fig11,
        seed,
        checkpoints=BTW_CHECKPOINTS,
        plots={"betweenness_fig11": ("t", "average betweenness")},
    )


_BUILDERS = {
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig3c": _fig3c,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig8a": lambda: _fig8("a"),
    "fig8b": lambda: _fig8("b"),
    "fig8c": lambda: _fig8("c"),
    "fig9": _fig9,
    "fig10": _fig10,
    "fig11": _fig11,
}
PRESETS = tuple(_BUILDERS)


def get_preset(name: str) -> ExperimentPreset:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ConfigError([f"preset: unknown preset {name!r}; choose from {', '.join(PRESETS)}"]) from None


# -- ad-hoc sweeps from config files ------------------------------------------------------


def _score_generic(results, seed):
    comps = []
    for res in results:
        for k, prof in enumerate(res.society.profiles):
            h = exogenous_homophily_index(prof)
            x = res.samples.get(f"eft_type{k}")
            if x is None:
                continue
            x = x[np.isfinite(x)]
            if not x.size:
                continue
            if h == 0.0:
                L0 = compute_L_star(prof, 0.0)
                bad = int(np.sum(x != L0))
                comps.append(Comparison(f"{res.label}/type{k}/eft_equals_L0", 1, L0, bad, 0, bad == 0))
            pred = eeft_closed_form(prof)
            if pred.in_regime:
                rel = abs(x.mean() - pred.value) / pred.value
                comps.append(Comparison(f"{res.label}/type{k}/eeft", 2, pred.value, float(x.mean()), 0.03,
                                        rel <= 0.03, True, pred.provenance))
    return comps, []


def custom_preset(name: str, base: SocietyConfig, points: list[SocietyConfig], sweep: list) -> ExperimentPreset:
    """Preset for a user sweep: formation times and bonding capital per point."""
    m = (("eft", {"cohort": (1, max(2, base.horizon // 2))}), ("bonding", {}))
    grid = [GridPoint(f"point{n}", soc, m) for n, soc in enumerate(points)]
    return ExperimentPreset(name, f"user sweep over {len(points)} points", (), grid, _score_generic, base.seed)
