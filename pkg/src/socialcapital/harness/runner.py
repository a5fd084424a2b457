"""Replicated Monte Carlo runs, per-replication measures and aggregation.

A run expands every grid point of a preset into ``replication_count``
independent replications.  Replication ``r`` of every grid point uses RNG
stream ``r`` of the preset seed, so grid points share random numbers
(paired comparisons).  Workers return plain arrays; the parent reduces them
in (grid point, replication) order, so results do not depend on the number
of worker processes.
"""
from __future__ import annotations

import math
import multiprocessing as mp
import time
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from ..dynamics import simulate
from ..graph import components_undirected
from ..metrics import avg_betweenness_by_type, bonding_capital, omega_series, popularity_series
from ..oracles import optimal_bonding_bound
from ..utility import SocietyConfig, compute_L_star
from .config import describe

__all__ = [
    "GridPoint",
    "PointResult",
    "Comparison",
    "RunSummary",
    "run_replication",
    "run_experiment",
    "bootstrap_ci",
]

_EVENT_MEASURES = {"omega", "popularity", "attachment"}


@dataclass
class GridPoint:
    """One society of a sweep plus the measures taken on every replication.

    ``measures`` is a tuple of ``(name, params)`` pairs; see
    :func:`run_replication` for the available names.
    """

    label: str
    society: SocietyConfig
    measures: tuple = ()


@dataclass
class PointResult:
    label: str
    society: SocietyConfig
    reps: int
    samples: dict[str, np.ndarray]
    values: dict[str, np.ndarray]


@dataclass
class Comparison:
    """Predicted vs observed quantity with its tolerance and verdict."""

    name: str
    criterion: int
    predicted: Any
    observed: Any
    tolerance: Any
    passed: bool
    in_regime: bool = True
    provenance: str = ""
    detail: str = ""


@dataclass
class RunSummary:
    preset: str
    seed: int
    scale: float
    points: list[dict]
    comparisons: list[Comparison]
    series: list[dict] = field(default_factory=list)
    wall_clock: Optional[float] = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        """True when every in-regime comparison passed."""
        return all(c.passed for c in self.comparisons if c.in_regime)

    def failures(self) -> list[Comparison]:
        return [c for c in self.comparisons if c.in_regime and not c.passed]

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "preset": self.preset,
            "seed": self.seed,
            "scale": self.scale,
            "points": self.points,
            "comparisons": [c.__dict__ for c in self.comparisons],
            "series": self.series,
        }
        if include_timing:
            d["wall_clock"] = self.wall_clock
        return _jsonable(d)

    @classmethod
    def from_dict(cls, d: dict) -> "RunSummary":
        return cls(
            d["preset"],
            d["seed"],
            d["scale"],
            d["points"],
            [Comparison(**c) for c in d["comparisons"]],
            d.get("series", []),
            d.get("wall_clock"),
        )


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else None
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


# -- measures ---------------------------------------------------------------


def run_replication(society: SocietyConfig, measures: Sequence, rep: int) -> dict:
    """Simulate one replication and evaluate the requested measures.

    Measures
    --------
    ``eft`` (cohort)
        samples ``eft_type{k}``: formation times of the cohort, NaN when
        unsatisfied; value ``eft_not_L0``: satisfied agents whose formation
        time differs from ``L*(0)``.
    ``bonding``
        ``U_type{k}``, ``U_total``, ``U_bar`` (optimum at realised shares).
    ``omega``
        ``omega_end``, ``t0`` (first step at which every type has a link),
        ``omega_min_after_t0``, ``cross_edges``.
    ``popularity`` (agent)
        ``pop_agent``: in-degree of the agent after each step.
    ``attachment`` (checkpoints, window)
        samples ``pa_deg``, ``pa_inc`` and the checkpoint ``pa_t``.
    ``indegree``
        samples ``indeg_type{k}``.
    ``betweenness`` (checkpoints)
        ``btw_type{k}``: mean betweenness per type at each checkpoint.
    ``connected``
        ``connected_satisfied``: one non-singleton component holding every
        satisfied agent; ``omega_end``.
    """
    measures = [(m, dict(p)) for m, p in measures]
    names = {m for m, _ in measures}
    nT = society.n_types
    checks: list[int] = []
    for m, p in measures:
        if m == "betweenness":
            checks = sorted(set(checks) | set(p["checkpoints"]))

    def observer(g, t):
        return {"btw": avg_betweenness_by_type(g, nT)}

    traj = simulate(
        society,
        rep,
        record_events=bool(names & _EVENT_MEASURES),
        checkpoints=checks,
        observer=observer if checks else None,
    )
    g = traj.graph
    types = traj.types
    samples: dict[str, np.ndarray] = {}
    values: dict[str, Any] = {}
    for m, p in measures:
        if m == "eft":
            lo, hi = p.get("cohort", (1, g.t))
            eft = traj.eft
            sel = np.zeros(g.t, dtype=bool)
            sel[max(lo, 1) - 1 : min(hi, g.t)] = True
            for k in range(nT):
                samples[f"eft_type{k}"] = eft[sel & (types == k)]
            L0 = np.array([compute_L_star(q, 0.0) for q in society.profiles])
            done = ~np.isnan(eft)
            values["eft_not_L0"] = int(np.sum(done & (eft != L0[types])))
            values["n_unsatisfied"] = int(np.sum(~done))
        elif m == "bonding":
            per_type, total = bonding_capital(g, society)
            for k in range(nT):
                values[f"U_type{k}"] = per_type[k]
            values["U_total"] = total
            shares = np.bincount(types, minlength=nT) / g.t
            values["U_bar"] = optimal_bonding_bound(society, shares).value
        elif m == "omega":
            om = omega_series(traj)
            ev = traj.events[traj.events["linked"]]
            first = np.full(nT, np.iinfo(np.int64).max)
            if ev.size:
                actor_type = types[ev["actor"] - 1]
                for k in range(nT):
                    hit = ev["t"][actor_type == k]
                    if hit.size:
                        first[k] = hit.min()
            t0 = int(first.max())
            values["omega_end"] = int(om[-1])
            values["t0"] = t0 if t0 <= g.t else -1
            values["omega_min_after_t0"] = int(om[t0 - 1 :].min()) if t0 <= g.t else -1
            values["cross_edges"] = int(sum(g.n_diff[1:]))
        elif m == "popularity":
            values["pop_agent"] = popularity_series(traj, int(p["agent"]))
        elif m == "attachment":
            linked = traj.events[traj.events["linked"]]
            degs, incs = [], []
            for c in p["checkpoints"]:
                before = np.bincount(linked["met"][linked["t"] <= c], minlength=g.t + 1)[1 : c + 1]
                after = np.bincount(
                    linked["met"][linked["t"] <= c + p["window"]], minlength=g.t + 1
                )[1 : c + 1]
                degs.append(before)
                incs.append(after - before)
            samples["pa_deg"] = np.concatenate(degs)
            samples["pa_inc"] = np.concatenate(incs)
            samples["pa_t"] = np.repeat(np.asarray(p["checkpoints"]), [len(x) for x in degs])
        elif m == "indegree":
            indeg = g.in_degrees()
            for k in range(nT):
                samples[f"indeg_type{k}"] = indeg[types == k]
        elif m == "betweenness":
            arr = np.array([traj.snapshots[c]["btw"] for c in p["checkpoints"]])
            for k in range(nT):
                values[f"btw_type{k}"] = arr[:, k]
        elif m == "connected":
            omega, labels = components_undirected(g)
            sat = np.array([i for i in g.agents if g.satisfied[i]], dtype=np.int64)
            one = omega == 1 and (sat.size == 0 or np.unique(labels[sat - 1]).size == 1)
            values["connected_satisfied"] = bool(one)
            values["omega_end"] = int(omega)
        else:
            raise ValueError(f"unknown measure {m!r}")
    return {"samples": samples, "values": values}


def _worker(task):
    idx, society, measures, rep = task
    try:
        return idx, rep, run_replication(society, measures, rep), None
    except Exception as exc:  # recorded with the seed for replay
        return idx, rep, None, f"{type(exc).__name__}: {exc}"


def _scaled(n: int, scale: float) -> int:
    return max(1, int(round(n * scale)))


def collect(points: Sequence[GridPoint], scale: float = 1.0, parallelism: int = 1) -> list[PointResult]:
    """Run all replications of all grid points and reduce them in order."""
    tasks = []
    for idx, pt in enumerate(points):
        for rep in range(_scaled(pt.society.replication_count, scale)):
            tasks.append((idx, pt.society, pt.measures, rep))
    if parallelism > 1:
        ctx = mp.get_context("fork")
        with ctx.Pool(parallelism) as pool:
            raw = list(pool.imap(_worker, tasks, chunksize=max(1, len(tasks) // (8 * parallelism))))
    else:
        raw = [_worker(t) for t in tasks]
    raw.sort(key=lambda r: (r[0], r[1]))
    out = []
    for idx, pt in enumerate(points):
        mine = [r for r in raw if r[0] == idx]
        errors = [(rep, err) for _, rep, _, err in mine if err is not None]
        if errors:
            rep, err = errors[0]
            raise RuntimeError(
                f"grid point {pt.label!r} aborted: replication {rep} failed "
                f"(seed={pt.society.seed}, stream={rep}): {err}"
            )
        res = [r[2] for r in mine]
        samples: dict[str, list] = {}
        values: dict[str, list] = {}
        for r in res:
            for k, v in r["samples"].items():
                samples.setdefault(k, []).append(np.asarray(v))
            for k, v in r["values"].items():
                values.setdefault(k, []).append(v)
        out.append(
            PointResult(
                pt.label,
                pt.society,
                len(res),
                {k: np.concatenate(v) for k, v in samples.items()},
                {k: np.array(v) for k, v in values.items()},
            )
        )
    return out


def _stats(res: PointResult) -> dict:
    out = {}
    for k, v in res.values.items():
        v = np.asarray(v, dtype=float)
        n = v.shape[0]
        mean = v.mean(axis=0)
        se = v.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
        if v.ndim > 1 and v.shape[1] > 50:
            # long series: keep the mean only, thinned for the summary
            step = max(1, v.shape[1] // 50)
            out[k] = {"mean": mean[::step], "se": se[::step], "n": n, "stride": step}
        else:
            out[k] = {"mean": mean, "se": se, "n": n}
    for k, v in res.samples.items():
        fin = v[np.isfinite(v)] if v.dtype.kind == "f" else v
        out[f"{k}.pooled"] = {
            "mean": float(fin.mean()) if fin.size else None,
            "n": int(v.size),
            "n_finite": int(fin.size),
        }
    return out


def bootstrap_ci(x, stat=np.mean, n_boot: int = 2000, level: float = 0.95, seed: int = 0):
    """Percentile bootstrap interval of ``stat`` over the rows of ``x``."""
    x = np.asarray(x, dtype=float)
    rng = np.random.Generator(np.random.Philox(seed))
    idx = rng.integers(0, len(x), size=(n_boot, len(x)))
    boots = np.array([stat(x[i]) for i in idx])
    a = (1 - level) / 2
    return float(np.quantile(boots, a)), float(np.quantile(boots, 1 - a))


def run_experiment(preset, parallelism: int = 1, scale: float = 1.0) -> RunSummary:
    """Run a preset, score its oracles and return the summary.

    Aggregate content is independent of ``parallelism``.
    """
    start = time.perf_counter()
    results = collect(preset.points, scale=scale, parallelism=parallelism)
    comparisons, series = preset.score(results, seed=preset.seed) if preset.score else ([], [])
    points = [
        {
            "label": r.label,
            "reps": r.reps,
            "derived": describe(r.society),
            "stats": _stats(r),
        }
        for r in results
    ]
    summary = RunSummary(preset.name, preset.seed, scale, points, comparisons, series)
    summary.points = summary.to_dict()["points"]
    summary.series = summary.to_dict()["series"]
    summary.comparisons = [Comparison(**c) for c in summary.to_dict()["comparisons"]]
    summary.wall_clock = time.perf_counter() - start
    return summary
