"""Birth, meeting and linking processes advanced in discrete time.

Each step one agent is born, then every unsatisfied agent (in birth order)
meets exactly one other agent and decides whether to follow it.  Choice sets
of followees-of-followees are read from the adjacency as it stood when the
step began; new links are written to the live graph immediately.

Randomness comes from two counter-based Philox streams per replication, one
for births and one for meetings, so metric hooks never perturb trajectories.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Iterable, Optional

import numpy as np

from .graph import EvolvingGraph
from .utility import (
    ConfigError,
    SocietyConfig,
    TypeProfile,
    compute_L_star,
    compute_Lbar_star,
    exogenous_homophily_index,
    link_decision,
)

__all__ = [
    "Via",
    "RngStream",
    "StepEvent",
    "Trajectory",
    "DecisionTable",
    "birth_step",
    "meeting_draw",
    "linking_step",
    "simulate",
    "detect_potentially_unsatisfied",
    "replay",
    "EVENT_DTYPE",
]

_CHUNK = 4096


class Via(IntEnum):
    UNIFORM = 0
    FOLLOWEE_OF_FOLLOWEE = 1

    @property
    def label(self) -> str:
        return "uniform" if self is Via.UNIFORM else "followee_of_followee"


EVENT_DTYPE = np.dtype(
    [("t", np.int64), ("actor", np.int64), ("met", np.int64), ("via", np.int8), ("linked", np.bool_)]
)


class RngStream:
    """Random source of one replication.

    Births and meetings draw from separate Philox streams derived from
    ``SeedSequence(seed, spawn_key=(stream_id, k))``.  Meeting uniforms are
    served from a pre-generated buffer for speed.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.birth = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, 0)))
        )
        self._meet = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, 1)))
        )
        self._buf: list[float] = []
        self._pos = 0

    def uniform(self) -> float:
        """Next U[0, 1) variate of the meeting stream."""
        if self._pos == len(self._buf):
            self._buf = self._meet.random(_CHUNK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def below(self, n: int) -> int:
        """Uniform integer in ``0..n-1``."""
        return int(self.uniform() * n)


@dataclass(frozen=True)
class StepEvent:
    t: int
    actor: int
    met: int
    via: Via
    linked: bool


class DecisionTable:
    """Precomputed link decisions of one type over reachable followee counts.

    ``accept[same][ns][nd]`` is the linking rule for a same-type (``same=1``)
    or different-type (``same=0``) candidate; ``done[ns][nd]`` marks
    saturation, i.e. neither candidate kind is accepted.
    """

    def __init__(self, profile: TypeProfile):
        self.profile = profile
        ns_max = compute_L_star(profile, 0.0) + 1
        nd_max = compute_Lbar_star(profile, 0.0) + 1
        shape = range(ns_max + 1), range(nd_max + 1)
        self.accept = [
            [[link_decision(profile, a, b, bool(same)) for b in shape[1]] for a in shape[0]]
            for same in (0, 1)
        ]
        self.done = [
            [not (self.accept[0][a][b] or self.accept[1][a][b]) for b in shape[1]]
            for a in shape[0]
        ]


def birth_step(g: EvolvingGraph, type_id: int, table: DecisionTable) -> int:
    """Add a newborn of the given type; types with nothing to gain start satisfied."""
    return g.add_agent(type_id, satisfied=table.done[0][0])


def draw_birth_types(config: SocietyConfig, rng: RngStream, n: int) -> np.ndarray:
    """Categorical type draws for ``n`` consecutive births."""
    if config.n_types == 1:
        return np.zeros(n, dtype=np.int64)
    p = np.asarray(config.shares, dtype=float)
    return rng.birth.choice(config.n_types, size=n, p=p / p.sum()).astype(np.int64)


def _uniform_other(g: EvolvingGraph, i: int, rng: RngStream) -> Optional[int]:
    # rejection sampling over 1..t, skipping i and its current followees
    t = g.t
    fol = g.followees[i]
    if len(fol) >= t - 1:
        return None
    while True:
        j = int(rng.uniform() * t) + 1
        if j != i and j not in fol:
            return j


def meeting_draw(g: EvolvingGraph, i: int, gamma: float, rng: RngStream) -> Optional[tuple[int, Via]]:
    """Draw the agent met by ``i`` at the current step.

    With probability ``gamma`` the meeting happens uniformly inside the
    followees-of-followees set (start-of-step snapshot); otherwise, or when
    that set is empty, uniformly among agents that are neither ``i`` nor
    already followed by ``i``.

    Returns ``None`` when nobody is available to meet.
    """
    if g.t < 2:
        return None
    if rng.uniform() < gamma:
        K = g.followees_of_followees(i, snapshot=True)
        if K:
            return K[int(rng.uniform() * len(K))], Via.FOLLOWEE_OF_FOLLOWEE
    j = _uniform_other(g, i, rng)
    if j is None:
        return None
    return j, Via.UNIFORM


def linking_step(
    g: EvolvingGraph, i: int, met: int, table: DecisionTable, start: Optional[int] = None
) -> bool:
    """Apply the linking rule to a meeting and update satisfaction.

    ``start`` is the first date at which ``i`` could meet anyone; it defaults
    to ``max(i, 2)`` and anchors the formation time.
    """
    if met in g.followees[i]:
        return False
    ns, nd = g.n_same[i], g.n_diff[i]
    same = g.types[i] == g.types[met]
    if not table.accept[same][ns][nd]:
        return False
    g.add_edge(i, met)
    if table.done[g.n_same[i]][g.n_diff[i]]:
        s = max(i, 2) if start is None else start
        g.mark_satisfied(i, g.t - s + 1)
    return True


@dataclass
class Trajectory:
    """Outcome of one replication.

    Attributes
    ----------
    config : SocietyConfig
    stream_id : int
    graph : EvolvingGraph
        Final graph.
    events : ndarray of EVENT_DTYPE
        Meeting log ordered by ``(t, actor)``; empty if not recorded.
    snapshots : dict
        ``t -> dict`` of observer outputs at checkpoints.
    """

    config: SocietyConfig
    stream_id: int
    graph: EvolvingGraph
    events: np.ndarray
    snapshots: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.graph.t

    @property
    def types(self) -> np.ndarray:
        return self.graph.type_array()

    @property
    def eft(self) -> np.ndarray:
        """EFT per agent as float, NaN for agents still unsatisfied."""
        return np.array(
            [np.nan if e is None else float(e) for e in self.graph.eft[1:]], dtype=float
        )

    def step_events(self) -> Iterable[StepEvent]:
        for row in self.events:
            yield StepEvent(int(row["t"]), int(row["actor"]), int(row["met"]), Via(int(row["via"])), bool(row["linked"]))

    def events_csv(self, path=None) -> str:
        """Event log as CSV with header ``t,actor,met,via,linked``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "actor", "met", "via", "linked"])
        labels = ("uniform", "followee_of_followee")
        for t, a, m, v, k in self.events.tolist():
            w.writerow([t, a, m, labels[v], int(k)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


Observer = Callable[[EvolvingGraph, int], dict]


def simulate(
    config: SocietyConfig,
    stream_id: int = 0,
    *,
    horizon: Optional[int] = None,
    record_events: bool = True,
    checkpoints: Iterable[int] = (),
    observer: Optional[Observer] = None,
) -> Trajectory:
    """Run one replication of the network formation process.

    Parameters
    ----------
    config : SocietyConfig
    stream_id : int
        Replication index; ``(config.seed, stream_id)`` fixes the trajectory.
    horizon : int, optional
        Overrides ``config.horizon`` (any value >= 1).
    record_events : bool
        Keep the full meeting log.  Turn off for large sweeps.
    checkpoints, observer
        ``observer(graph, t)`` is called after every step listed in
        ``checkpoints``; its dict is stored in ``Trajectory.snapshots``.
    """
    if not isinstance(config, SocietyConfig):
        raise ConfigError(["config: expected a SocietyConfig"])
    T = config.horizon if horizon is None else int(horizon)
    if T < 1:
        raise ConfigError([f"horizon: must be >= 1, got {T}"])
    rng = RngStream(config.seed, stream_id)
    tables = [DecisionTable(p) for p in config.profiles]
    gammas = [p.opportunism for p in config.profiles]
    births = draw_birth_types(config, rng, T).tolist()
    checks = set(int(c) for c in checkpoints)

    g = EvolvingGraph()
    ev_t: list[int] = []
    ev_a: list[int] = []
    ev_m: list[int] = []
    ev_v: list[int] = []
    ev_k: list[bool] = []
    snapshots = {}
    pending: list[int] = []  # unsatisfied agents in birth order

    types = g.types
    followees = g.followees
    uniform = rng.uniform
    fof = g.followees_of_followees

    for t in range(1, T + 1):
        k = births[t - 1]
        i_new = birth_step(g, k, tables[k])
        if not g.satisfied[i_new]:
            pending.append(i_new)
        g.begin_step()
        if t >= 2 and pending:
            still = []
            for i in pending:
                ti = types[i]
                # meeting
                via = 0
                met = None
                if uniform() < gammas[ti]:
                    K = fof(i)
                    if K:
                        met = K[int(uniform() * len(K))]
                        via = 1
                if met is None:
                    met = _uniform_other(g, i, rng)
                    if met is None:
                        still.append(i)
                        continue
                linked = linking_step(g, i, met, tables[ti])
                if record_events:
                    ev_t.append(t)
                    ev_a.append(i)
                    ev_m.append(met)
                    ev_v.append(via)
                    ev_k.append(linked)
                if not g.satisfied[i]:
                    still.append(i)
            pending = still
        if observer is not None and t in checks:
            snapshots[t] = observer(g, t)

    events = np.empty(len(ev_t), dtype=EVENT_DTYPE)
    if ev_t:
        events["t"] = ev_t
        events["actor"] = ev_a
        events["met"] = ev_m
        events["via"] = ev_v
        events["linked"] = ev_k
    return Trajectory(config, stream_id, g, events, snapshots)


def detect_potentially_unsatisfied(config: SocietyConfig) -> list[int]:
    """Types whose agents may stay unsatisfied forever.

    These are the fully opportunistic types with an intermediate homophily
    index: once their choice set closes over the wrong type mix they can
    never meet anyone new.
    """
    out = []
    for k, p in enumerate(config.profiles):
        h = exogenous_homophily_index(p)
        if p.opportunism == 1.0 and 0.0 < h < 1.0:
            out.append(k)
    return out


def replay(config: SocietyConfig, types: Iterable[int], events: np.ndarray) -> EvolvingGraph:
    """Rebuild the final graph from birth types and an event log.

    Linking decisions are re-evaluated from the profiles and checked against
    the logged outcome.
    """
    tables = [DecisionTable(p) for p in config.profiles]
    types = list(types)
    g = EvolvingGraph()
    rows = events.tolist()
    pos = 0
    for t in range(1, len(types) + 1):
        k = types[t - 1]
        birth_step(g, k, tables[k])
        g.begin_step()
        while pos < len(rows) and rows[pos][0] == t:
            _, a, m, _, linked = rows[pos]
            got = linking_step(g, a, m, tables[g.types[a]])
            if got != bool(linked):
                raise RuntimeError(f"replay diverged at t={t}, actor={a}, met={m}")
            pos += 1
    if pos != len(rows):
        raise RuntimeError("event log extends beyond the birth sequence")
    return g
