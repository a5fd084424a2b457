"""Bonding, popularity and bridging capital measured on simulated networks."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .dynamics import Trajectory
from .graph import DisjointSet, EvolvingGraph, components_undirected
from .utility import SocietyConfig

__all__ = [
    "EmptyResult",
    "EmpiricalPmf",
    "CapitalReport",
    "Verdict",
    "eft_empirical_pmf",
    "agent_utilities",
    "bonding_capital",
    "capital_report",
    "popularity_series",
    "popularity_matrix",
    "popularity_distribution",
    "betweenness",
    "avg_betweenness_by_type",
    "fosd_test",
    "preferential_attachment_check",
    "preferential_attachment_check_arrays",
    "omega_series",
    "bonding_csv",
    "popularity_csv",
    "betweenness_csv",
    "pmf_csv",
    "replication_summary",
]


class EmptyResult(ValueError):
    """A metric was requested over an empty set of agents or samples."""


@dataclass(frozen=True)
class EmpiricalPmf:
    """Probability mass function on a finite sorted support.

    ``n`` is the number of samples behind an empirical pmf (``inf`` for an
    analytic one).  ``excluded`` counts samples left out, e.g. unsatisfied
    agents; ``tail`` is mass beyond the support of a truncated analytic pmf.
    """

    support: np.ndarray
    mass: np.ndarray
    n: float = math.inf
    excluded: int = 0
    tail: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.support, dtype=float)
        m = np.asarray(self.mass, dtype=float)
        if s.shape != m.shape or s.ndim != 1:
            raise ValueError("support and mass must be 1-d arrays of equal length")
        if s.size and np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(m < 0):
            raise ValueError("mass must be nonnegative")
        if s.size and abs(m.sum() + self.tail - 1.0) > 1e-9:
            raise ValueError(f"mass sums to {m.sum() + self.tail}, expected 1")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_samples(cls, samples, excluded: int = 0) -> "EmpiricalPmf":
        x = np.asarray(samples, dtype=float).ravel()
        if x.size == 0:
            raise EmptyResult("no samples")
        vals, counts = np.unique(x, return_counts=True)
        return cls(vals, counts / x.size, n=float(x.size), excluded=excluded)

    def __len__(self):
        return self.support.size

    def mean(self) -> float:
        return float(np.dot(self.support, self.mass))

    def cdf(self, x) -> np.ndarray:
        """Right-continuous CDF evaluated at ``x``."""
        cm = np.cumsum(self.mass)
        idx = np.searchsorted(self.support, np.asarray(x, dtype=float), side="right")
        return np.where(idx > 0, cm[np.maximum(idx - 1, 0)], 0.0)

    def mass_at(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.support, x)
        idx_c = np.minimum(idx, max(self.support.size - 1, 0))
        hit = (idx < self.support.size) & (self.support[idx_c] == x)
        return np.where(hit, self.mass[idx_c], 0.0)

    def total_variation(self, other: "EmpiricalPmf") -> float:
        """Total variation distance; unmatched tail mass counts in full."""
        pts = np.union1d(self.support, other.support)
        d = np.abs(self.mass_at(pts) - other.mass_at(pts)).sum() + self.tail + other.tail
        return 0.5 * float(d)


@dataclass
class CapitalReport:
    t: int
    per_type_bonding: np.ndarray
    total_bonding: float
    per_agent_popularity: np.ndarray
    per_type_betweenness: Optional[np.ndarray] = None
    omega: int = 0

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else [None if not np.isfinite(v) else float(v) for v in a]

        return {
            "t": self.t,
            "per_type_bonding": arr(self.per_type_bonding),
            "total_bonding": float(self.total_bonding),
            "per_agent_popularity": [int(v) for v in self.per_agent_popularity],
            "per_type_betweenness": arr(self.per_type_betweenness),
            "omega": int(self.omega),
        }


class Verdict(str, Enum):
    A_DOMINATES = "a_dominates"
    B_DOMINATES = "b_dominates"
    NEITHER = "neither"


# -- bonding capital ------------------------------------------------------


def eft_empirical_pmf(
    trajs: Trajectory | Sequence[Trajectory], type_id: int, cohort: tuple[int, int]
) -> EmpiricalPmf:
    """EFT distribution of type ``type_id`` agents born in ``cohort`` (inclusive).

    Several replications may be pooled.  Agents still unsatisfied at the end
    of the run are left out and counted in ``excluded``.
    """
    if isinstance(trajs, Trajectory):
        trajs = [trajs]
    lo, hi = cohort
    if hi < lo:
        raise EmptyResult(f"empty cohort {cohort}")
    vals = []
    excluded = 0
    for tr in trajs:
        g = tr.graph
        for i in range(max(lo, 1), min(hi, g.t) + 1):
            if g.types[i] != type_id:
                continue
            if g.eft[i] is None:
                excluded += 1
            else:
                vals.append(g.eft[i])
    if not vals:
        raise EmptyResult(
            f"no satisfied type-{type_id} agents in cohort {cohort} ({excluded} unsatisfied)"
        )
    return EmpiricalPmf.from_samples(vals, excluded=excluded)


def agent_utilities(g: EvolvingGraph, config: SocietyConfig) -> np.ndarray:
    """Net utility of every agent at its current followee counts."""
    out = np.empty(g.t)
    profiles = config.profiles
    for i in g.agents:
        out[i - 1] = profiles[g.types[i]].utility(g.n_same[i], g.n_diff[i])
    return out


def bonding_capital(g: EvolvingGraph, config: SocietyConfig) -> tuple[np.ndarray, float]:
    """Average utility per type and over the whole population.

    Per-type entries are NaN for types with no agents.  The total is the
    plain mean over agents, i.e. the share-weighted mean of per-type values.
    """
    if g.t == 0:
        return np.zeros(config.n_types), 0.0
    u = agent_utilities(g, config)
    types = g.type_array()
    per_type = np.full(config.n_types, np.nan)
    for k in range(config.n_types):
        sel = types == k
        if sel.any():
            per_type[k] = u[sel].mean()
    return per_type, float(u.mean())


def capital_report(g: EvolvingGraph, config: SocietyConfig, with_betweenness: bool = True) -> CapitalReport:
    per_type, total = bonding_capital(g, config)
    omega, _ = components_undirected(g)
    bt = avg_betweenness_by_type(g, config.n_types) if with_betweenness else None
    return CapitalReport(g.t, per_type, total, g.in_degrees(), bt, omega)


# -- popularity capital ---------------------------------------------------


def popularity_matrix(traj: Trajectory, agents: Sequence[int]) -> np.ndarray:
    """In-degree of each listed agent after every step.

    Returns an array of shape ``(len(agents), T)`` whose column ``t - 1``
    holds ``deg^-`` at the end of step ``t``.  Needs the event log.
    """
    T = traj.horizon
    ev = traj.events
    linked = ev[ev["linked"]]
    out = np.zeros((len(agents), T), dtype=np.int64)
    for r, a in enumerate(agents):
        if not 1 <= a <= T:
            raise ValueError(f"agent {a} does not exist")
        ts = linked["t"][linked["met"] == a]
        inc = np.bincount(ts - 1, minlength=T)[:T]
        out[r] = np.cumsum(inc)
    return out


def popularity_series(traj: Trajectory, agent: int) -> np.ndarray:
    """``deg^-`` of ``agent`` after each step ``t = 1..T``."""
    return popularity_matrix(traj, [agent])[0]


def popularity_distribution(g: EvolvingGraph, type_id: int) -> EmpiricalPmf:
    """Normalised histogram of in-degrees over the agents of one type."""
    sel = g.type_array() == type_id
    if not sel.any():
        raise EmptyResult(f"no agents of type {type_id}")
    return EmpiricalPmf.from_samples(g.in_degrees()[sel])


# -- bridging capital -----------------------------------------------------


def _undirected_adjacency(n: int, edges: np.ndarray) -> sp.csr_matrix:
    if len(edges) == 0:
        return sp.csr_matrix((n, n))
    r = np.concatenate([edges[:, 0], edges[:, 1]])
    c = np.concatenate([edges[:, 1], edges[:, 0]])
    A = sp.csr_matrix((np.ones(r.size), (r, c)), shape=(n, n))
    A.data[:] = 1.0  # merge reciprocal links
    return A


def betweenness_from_edges(n: int, edges, batch: int = 256) -> np.ndarray:
    """Betweenness on the undirected simple graph with nodes ``0..n-1``.

    Brandes' accumulation run for a batch of sources at once with sparse
    matrix products: a level-synchronous BFS counts shortest paths, then
    dependencies are pushed back level by level.  Each unordered pair is
    counted once.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if np.any(edges[:, 0] == edges[:, 1]):
        edges = edges[edges[:, 0] != edges[:, 1]]
    A = _undirected_adjacency(n, edges)
    bc = np.zeros(n)
    for s0 in range(0, n, batch):
        src = np.arange(s0, min(n, s0 + batch))
        B = src.size
        cols = np.arange(B)
        sigma = np.zeros((n, B))
        sigma[src, cols] = 1.0
        dist = np.full((n, B), -1, dtype=np.int64)
        dist[src, cols] = 0
        frontier = sigma.copy()
        d = 0
        while True:
            nxt = A @ frontier
            nxt[dist >= 0] = 0.0
            if not nxt.any():
                break
            d += 1
            dist[nxt > 0] = d
            sigma += nxt
            frontier = nxt
        delta = np.zeros((n, B))
        with np.errstate(divide="ignore", invalid="ignore"):
            for lev in range(d, 0, -1):
                coef = np.where(dist == lev, (1.0 + delta) / sigma, 0.0)
                push = A @ coef
                delta += np.where(dist == lev - 1, sigma * push, 0.0)
        delta[src, cols] = 0.0
        bc += delta.sum(axis=1)
    return bc / 2.0


def betweenness(g: EvolvingGraph, batch: int = 256) -> np.ndarray:
    """Betweenness of every agent (``out[i - 1]`` for agent ``i``).

    Directions are dropped and reciprocal links merged; pairs in different
    components contribute nothing.  Scores are unnormalised.
    """
    return betweenness_from_edges(g.t, g.edge_array() - 1, batch=batch)


def avg_betweenness_by_type(
    g: EvolvingGraph, n_types: Optional[int] = None, scores: Optional[np.ndarray] = None
) -> np.ndarray:
    """Mean betweenness per type; NaN marks a type with no agents."""
    if scores is None:
        scores = betweenness(g)
    types = g.type_array()
    if n_types is None:
        n_types = int(types.max()) + 1 if types.size else 0
    out = np.full(n_types, np.nan)
    for k in range(n_types):
        sel = types == k
        if sel.any():
            out[k] = scores[sel].mean()
    return out


# -- stochastic dominance -------------------------------------------------


def default_tolerance(a: EmpiricalPmf, b: EmpiricalPmf) -> float:
    n = min(a.n, b.n)
    return 0.0 if math.isinf(n) else 2.0 / math.sqrt(n)


def fosd_test(a: EmpiricalPmf, b: EmpiricalPmf, tol: Optional[float] = None) -> Verdict:
    """First-order stochastic dominance between two pmfs.

    ``a`` dominates when its CDF never exceeds that of ``b`` by more than
    ``tol`` and lies below it by more than ``tol`` somewhere.  The default
    tolerance is ``2 / sqrt(n)`` with ``n`` the smaller sample size (zero for
    analytic pmfs).
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyResult("fosd_test needs two nonempty pmfs")
    if tol is None:
        tol = default_tolerance(a, b)
    pts = np.union1d(a.support, b.support)
    Fa, Fb = a.cdf(pts), b.cdf(pts)
    if np.all(Fa <= Fb + tol) and np.any(Fa < Fb - tol):
        return Verdict.A_DOMINATES
    if np.all(Fb <= Fa + tol) and np.any(Fb < Fa - tol):
        return Verdict.B_DOMINATES
    return Verdict.NEITHER


@dataclass
class AttachmentBin:
    lo: int
    hi: int
    pmf: EmpiricalPmf
    merged: bool


@dataclass
class AttachmentReport:
    bins: list[AttachmentBin]
    verdicts: list[Verdict]
    fraction_monotone: float
    flags: list[str] = field(default_factory=list)


def preferential_attachment_check(
    trajs: Trajectory | Sequence[Trajectory],
    checkpoints: Sequence[int],
    window: int,
    min_count: int = 200,
    edges: Optional[Sequence[int]] = None,
    tol: Optional[float] = None,
) -> AttachmentReport:
    """Compare in-degree increments across current in-degree bins.

    Agents alive at each checkpoint ``t`` are binned by ``deg^-(t)``; the
    sample for a bin is ``deg^-(t + window) - deg^-(t)``.  Replications are
    pooled; checkpoints are scored separately and their verdicts pooled.  See :func:`preferential_attachment_check_arrays` for binning.
    """
    if isinstance(trajs, Trajectory):
        trajs = [trajs]
    deg_now: list[np.ndarray] = []
    deg_inc: list[np.ndarray] = []
    stratum: list[np.ndarray] = []
    for tr in trajs:
        T = tr.horizon
        linked = tr.events[tr.events["linked"]]
        for c in checkpoints:
            if c + window > T:
                raise ValueError(f"checkpoint {c} + window {window} exceeds horizon {T}")
            before = np.bincount(linked["met"][linked["t"] <= c], minlength=T + 1)[1 : c + 1]
            after = np.bincount(linked["met"][linked["t"] <= c + window], minlength=T + 1)[1 : c + 1]
            deg_now.append(before)
            deg_inc.append(after - before)
            stratum.append(np.full(c, c))
    return preferential_attachment_check_arrays(
        np.concatenate(deg_now), np.concatenate(deg_inc), min_count, edges, tol, np.concatenate(stratum)
    )


def preferential_attachment_check_arrays(
    deg: np.ndarray,
    inc: np.ndarray,
    min_count: int = 200,
    edges: Optional[Sequence[int]] = None,
    tol: Optional[float] = None,
    strata: Optional[np.ndarray] = None,
) -> AttachmentReport:
    """Binned attachment check on paired (current degree, increment) samples.

    ``edges`` gives the lower bin edges (default: 0, 1, 2, 4, 8, ...).  Bins
    with fewer than ``min_count`` samples are merged into their upper
    neighbour (the last one into its lower neighbour) and flagged.  Each
    adjacent pair is scored with :func:`fosd_test`; the higher bin should
    dominate.

    ``strata`` (e.g. the checkpoint of every sample) splits the samples:
    bins are only compared within a stratum and the verdicts are pooled.
    """
    d = np.asarray(deg)
    inc = np.asarray(inc)
    if strata is not None:
        strata = np.asarray(strata)
        bins, verdicts, flags = [], [], []
        for s in np.unique(strata):
            sel = strata == s
            r = preferential_attachment_check_arrays(d[sel], inc[sel], min_count, edges, tol)
            bins += r.bins
            verdicts += r.verdicts
            flags += [f"stratum {s}: {f}" for f in r.flags]
        good = sum(v is Verdict.A_DOMINATES for v in verdicts)
        frac = good / len(verdicts) if verdicts else float("nan")
        return AttachmentReport(bins, verdicts, frac, flags)
    if d.size == 0:
        raise EmptyResult("no attachment samples")
    top = int(d.max()) + 1
    if edges is None:
        edges = [0] + [2**k for k in range(0, max(1, int(math.log2(max(top, 1))) + 2))]
    lows = sorted(set(int(e) for e in edges if e < top))
    groups = [[lo, (lows[k + 1] - 1) if k + 1 < len(lows) else top - 1] for k, lo in enumerate(lows)]
    counts = [int(((d >= lo) & (d <= hi)).sum()) for lo, hi in groups]
    merged_flag = [False] * len(groups)
    flags = []
    while len(groups) > 1:
        small = [k for k, n in enumerate(counts) if n < min_count]
        if not small:
            break
        k = small[0]
        j = k + 1 if k + 1 < len(groups) else k - 1
        flags.append(f"bin [{groups[k][0]}, {groups[k][1]}] merged ({counts[k]} samples)")
        groups[j] = [min(groups[k][0], groups[j][0]), max(groups[k][1], groups[j][1])]
        counts[j] += counts[k]
        merged_flag[j] = True
        del groups[k], counts[k], merged_flag[k]
    bins = []
    for (lo, hi), m in zip(groups, merged_flag):
        sel = (d >= lo) & (d <= hi)
        if sel.any():
            bins.append(AttachmentBin(lo, hi, EmpiricalPmf.from_samples(inc[sel]), m))
    verdicts = [fosd_test(bins[k + 1].pmf, bins[k].pmf, tol) for k in range(len(bins) - 1)]
    good = sum(v is Verdict.A_DOMINATES for v in verdicts)
    frac = good / len(verdicts) if verdicts else float("nan")
    return AttachmentReport(bins, verdicts, frac, flags)


# -- components over time -------------------------------------------------


def omega_series(traj: Trajectory) -> np.ndarray:
    """Number of non-singleton components after every step ``t = 1..T``."""
    T = traj.horizon
    ds = DisjointSet(T + 1)
    out = np.zeros(T, dtype=np.int64)
    omega = 0
    linked = traj.events[traj.events["linked"]]
    rows = list(zip(linked["t"].tolist(), linked["actor"].tolist(), linked["met"].tolist()))
    pos = 0
    for t in range(1, T + 1):
        while pos < len(rows) and rows[pos][0] == t:
            _, a, m = rows[pos]
            _, sa, sb = ds.union(a, m)
            if sa:
                omega += 1 - (sa > 1) - (sb > 1)
            pos += 1
        out[t - 1] = omega
    return out


# -- emitters -------------------------------------------------------------


def _write(rows, header, path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and not math.isfinite(x)) else repr(float(x))


def bonding_csv(rows: Iterable[tuple[int, int, float]], path=None) -> str:
    """CSV ``t,type,U_k``."""
    return _write(((t, k, _fmt(u)) for t, k, u in rows), ["t", "type", "U_k"], path)


def popularity_csv(rows: Iterable[tuple[int, int, int]], path=None) -> str:
    """CSV ``t,agent,deg_minus``."""
    return _write(rows, ["t", "agent", "deg_minus"], path)


def betweenness_csv(rows: Iterable[tuple[int, int, float]], path=None) -> str:
    """CSV ``checkpoint,type,avg_betweenness``."""
    return _write(((c, k, _fmt(b)) for c, k, b in rows), ["checkpoint", "type", "avg_betweenness"], path)


def pmf_csv(pmf: EmpiricalPmf, path=None) -> str:
    """CSV ``T,pmf_mass``."""
    return _write(((int(s) if float(s).is_integer() else s, _fmt(m)) for s, m in zip(pmf.support, pmf.mass)), ["T", "pmf_mass"], path)


def replication_summary(traj: Trajectory, with_betweenness: bool = False) -> dict:
    """JSON-ready summary of one replication."""
    g = traj.graph
    rep = capital_report(g, traj.config, with_betweenness=with_betweenness)
    eft = traj.eft
    return {
        "seed": traj.config.seed,
        "stream_id": traj.stream_id,
        "t": g.t,
        "n_edges": g.n_edges,
        "n_unsatisfied": int(np.isnan(eft).sum()),
        "mean_eft": float(np.nanmean(eft)) if np.isfinite(eft).any() else None,
        "capital": rep.to_dict(),
    }
