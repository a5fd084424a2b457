"""Directed evolving graph with birth-ordered agents.

Agents are identified by their birth date (1, 2, ...).  Per-agent state is
kept column-wise in plain lists indexed by agent id; slot 0 is unused so that
ids index directly.  Followee lists are append-only, which lets the graph
expose start-of-step snapshots cheaply: only the links added during the
current step have to be masked.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "AgentState",
    "EvolvingGraph",
    "DisjointSet",
    "components_undirected",
    "ego_network",
]


class GraphError(RuntimeError):
    """Illegal edge operation (self-edge, duplicate edge, unknown agent)."""


@dataclass
class AgentState:
    type_id: int
    followees: list[int]
    n_same: int
    n_diff: int
    satisfied: bool
    eft: Optional[int]

    @property
    def out_degree(self) -> int:
        return len(self.followees)


class EvolvingGraph:
    """Directed simple graph grown one agent per step.

    Attributes
    ----------
    types, followees, followers, n_same, n_diff, satisfied, eft, edge_time
        Column-wise per-agent state, index = agent id (slot 0 unused).
        ``eft`` holds ``None`` for agents that are not yet satisfied.
    t : int
        Current date; equal to the number of agents.
    """

    def __init__(self):
        self.types: list[int] = [-1]
        self.followees: list[list[int]] = [[]]
        self.followers: list[list[int]] = [[]]
        self.edge_time: list[list[int]] = [[]]
        self.n_same: list[int] = [0]
        self.n_diff: list[int] = [0]
        self.satisfied: list[bool] = [False]
        self.eft: list[Optional[int]] = [None]
        self.t = 0
        self.n_edges = 0
        self._fresh: dict[int, int] = {}

    def __len__(self):
        return self.t

    def __contains__(self, i):
        return 1 <= i <= self.t

    @property
    def agents(self) -> range:
        return range(1, self.t + 1)

    def agent(self, i: int) -> AgentState:
        self._check(i)
        return AgentState(
            self.types[i],
            list(self.followees[i]),
            self.n_same[i],
            self.n_diff[i],
            self.satisfied[i],
            self.eft[i],
        )

    def _check(self, i):
        if not 1 <= i <= self.t:
            raise GraphError(f"agent {i} does not exist (t={self.t})")

    def add_agent(self, type_id: int, satisfied: bool = False) -> int:
        """Append a newborn agent and return its id (its birth date).

        ``satisfied=True`` is used for types whose gregariousness is zero;
        such agents are done at birth with an EFT of 0.
        """
        self.t += 1
        self.types.append(int(type_id))
        self.followees.append([])
        self.followers.append([])
        self.edge_time.append([])
        self.n_same.append(0)
        self.n_diff.append(0)
        self.satisfied.append(bool(satisfied))
        self.eft.append(0 if satisfied else None)
        return self.t

    def add_edge(self, i: int, j: int) -> None:
        """Add the directed link ``i -> j`` (``i`` follows ``j``)."""
        self._check(i)
        self._check(j)
        if i == j:
            raise GraphError(f"self-edge {i}->{i} is not allowed")
        fol = self.followees[i]
        if j in fol:
            raise GraphError(f"duplicate edge {i}->{j}")
        fol.append(j)
        self.edge_time[i].append(self.t)
        self.followers[j].append(i)
        if self.types[i] == self.types[j]:
            self.n_same[i] += 1
        else:
            self.n_diff[i] += 1
        self.n_edges += 1
        self._fresh[i] = self._fresh.get(i, 0) + 1

    def mark_satisfied(self, i: int, eft: int) -> None:
        self.satisfied[i] = True
        self.eft[i] = int(eft)

    def begin_step(self) -> None:
        """Freeze the current followee sets as the start-of-step snapshot."""
        self._fresh = {}

    def snapshot_followees(self, i: int) -> list[int]:
        """Followees of ``i`` as they were when the current step began."""
        fol = self.followees[i]
        k = self._fresh.get(i, 0)
        return fol[: len(fol) - k] if k else fol

    def followees_of_followees(self, i: int, snapshot: bool = True) -> list[int]:
        """Choice set of followees of followees, excluding ``i`` and its followees.

        Returned in first-seen order (deterministic).  With ``snapshot=True``
        links added in the current step are ignored.
        """
        self._check(i)
        get = self.snapshot_followees if snapshot else self.followees.__getitem__
        own = get(i)
        if not own:
            return []
        excluded = set(own)
        excluded.add(i)
        out = {}
        for j in own:
            for k in get(j):
                if k not in excluded:
                    out[k] = None
        return list(out)

    def out_degrees(self) -> np.ndarray:
        return np.array([len(f) for f in self.followees[1:]], dtype=np.int64)

    def in_degrees(self) -> np.ndarray:
        return np.array([len(f) for f in self.followers[1:]], dtype=np.int64)

    def type_array(self) -> np.ndarray:
        return np.array(self.types[1:], dtype=np.int64)

    def edges(self) -> Iterable[tuple[int, int, int]]:
        """Yield ``(from, to, t_formed)`` in order of the source agent."""
        for i in self.agents:
            for j, tf in zip(self.followees[i], self.edge_time[i]):
                yield i, j, tf

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array of agent ids."""
        out = np.empty((self.n_edges, 2), dtype=np.int64)
        k = 0
        for i in self.agents:
            for j in self.followees[i]:
                out[k] = i, j
                k += 1
        return out

    def copy(self) -> "EvolvingGraph":
        g = EvolvingGraph()
        g.types = list(self.types)
        g.followees = [list(f) for f in self.followees]
        g.followers = [list(f) for f in self.followers]
        g.edge_time = [list(f) for f in self.edge_time]
        g.n_same = list(self.n_same)
        g.n_diff = list(self.n_diff)
        g.satisfied = list(self.satisfied)
        g.eft = list(self.eft)
        g.t = self.t
        g.n_edges = self.n_edges
        return g

    def same_structure(self, other: "EvolvingGraph") -> bool:
        return (
            self.t == other.t
            and self.types == other.types
            and self.followees == other.followees
            and self.followers == other.followers
            and self.satisfied == other.satisfied
            and self.eft == other.eft
        )

    # -- exports ---------------------------------------------------------

    def to_edge_csv(self, path=None) -> str:
        """Edge list as CSV with header ``from,to,t_formed``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["from", "to", "t_formed"])
        w.writerows(self.edges())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def summary(self) -> dict:
        indeg = [len(f) for f in self.followers]
        return {
            "t": self.t,
            "n_edges": self.n_edges,
            "agents": [
                {
                    "id": i,
                    "type": self.types[i],
                    "deg_out": len(self.followees[i]),
                    "deg_in": indeg[i],
                    "eft": self.eft[i],
                    "satisfied": self.satisfied[i],
                }
                for i in self.agents
            ],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.summary(), sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


class DisjointSet:
    """Union-find over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int = 0):
        self.parent = list(range(n))
        self.size = [1] * n

    def add(self) -> int:
        self.parent.append(len(self.parent))
        self.size.append(1)
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> tuple[int, int, int]:
        """Merge the sets of ``a`` and ``b``; return root and both old sizes.

        Old sizes are ``(0, 0)`` when the two were already joined.
        """
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra, 0, 0
        sa, sb = self.size[ra], self.size[rb]
        if sa < sb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] = sa + sb
        return ra, sa, sb


def components_undirected(g: EvolvingGraph) -> tuple[int, np.ndarray]:
    """Connected components ignoring edge direction.

    Returns
    -------
    omega : int
        Number of non-singleton components.
    labels : ndarray
        Component label of every agent (``labels[i - 1]`` for agent ``i``),
        numbered 0.. in order of each component's oldest member.  Singletons
        get their own label.
    """
    n = g.t
    ds = DisjointSet(n)
    for i in g.agents:
        for j in g.followees[i]:
            ds.union(i - 1, j - 1)
    labels = np.empty(n, dtype=np.int64)
    root_label: dict[int, int] = {}
    for k in range(n):
        r = ds.find(k)
        labels[k] = root_label.setdefault(r, len(root_label))
    omega = sum(1 for r in root_label if ds.size[r] > 1)
    return omega, labels


def ego_network(g: EvolvingGraph, i: int, depth: int = 1) -> tuple[list[int], list[tuple[int, int]]]:
    """Induced subgraph on ``i`` and everything within ``depth`` directed hops.

    Returns the sorted node list and the induced edge list.
    """
    if depth < 1:
        raise ValueError("ego network depth must be >= 1")
    g._check(i)
    seen = {i}
    frontier = [i]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for w in g.followees[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    nodes = sorted(seen)
    edges = [(u, w) for u in nodes for w in g.followees[u] if w in seen]
    return nodes, edges


def graph_from_edges(types: Sequence[int], edges: Iterable[tuple[int, int]]) -> EvolvingGraph:
    """Build a graph with agents ``1..len(types)`` and the given links.

    Convenience for tests and metrics on hand-made graphs.  The links count
    as formed in earlier steps, so snapshot reads see all of them.
    """
    g = EvolvingGraph()
    for k in types:
        g.add_agent(k)
    for i, j in edges:
        g.add_edge(i, j)
    g.begin_step()
    return g
