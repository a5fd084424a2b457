import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcapital.dynamics import (
    DecisionTable,
    RngStream,
    Via,
    detect_potentially_unsatisfied,
    meeting_draw,
    replay,
    simulate,
)
from socialcapital.graph import graph_from_edges
from socialcapital.harness.presets import homophilic, partial, tolerant
from socialcapital.utility import SocietyConfig, compute_L_star, link_decision


def test_same_seed_same_trajectory(homophilic_pair):
    a = simulate(homophilic_pair, 4)
    b = simulate(homophilic_pair, 4)
    assert np.array_equal(a.events, b.events)
    assert a.graph.same_structure(b.graph)
    c = simulate(homophilic_pair, 5)
    assert not np.array_equal(a.events, c.events)


def test_metric_hooks_do_not_perturb(homophilic_pair):
    plain = simulate(homophilic_pair, 0, record_events=False)
    hooked = simulate(homophilic_pair, 0, checkpoints=(50, 100), observer=lambda g, t: {"n": g.n_edges})
    assert plain.graph.same_structure(hooked.graph)
    assert set(hooked.snapshots) == {50, 100}


def test_replay_rebuilds_graph(mixed_three):
    tr = simulate(mixed_three, 1)
    g = replay(mixed_three, tr.types.tolist(), tr.events)
    assert g.same_structure(tr.graph)


def test_replay_detects_tampering(homophilic_pair):
    tr = simulate(homophilic_pair, 0)
    ev = tr.events.copy()
    k = int(np.nonzero(ev["linked"])[0][3])
    ev["linked"][k] = False
    with pytest.raises(RuntimeError, match="diverged"):
        replay(homophilic_pair, tr.types.tolist(), ev)


def test_tolerant_eft_is_gregariousness(tolerant_single):
    tr = simulate(tolerant_single, 0)
    e = tr.eft
    done = e[~np.isnan(e)]
    assert done.size > 250
    assert np.all(done == 5)


def test_zero_gregariousness_satisfied_at_birth():
    cfg = SocietyConfig((homophilic(0, 0.5, 0.5), homophilic(3, 0.5, 0.5)), horizon=100, seed=0)
    tr = simulate(cfg, 0)
    lazy = tr.types == 0
    assert np.all(tr.eft[lazy] == 0)
    assert np.all(tr.graph.out_degrees()[lazy] == 0)


def test_uniform_meetings_avoid_self_and_followees(homophilic_pair):
    cfg = SocietyConfig(homophilic_pair.profiles, horizon=200, seed=9)
    tr = simulate(cfg, 0)
    g = tr.graph
    assert np.all(tr.events["actor"] != tr.events["met"])
    # a met agent is never already followed: every meeting is a fresh candidate
    seen = set()
    for t, a, m, via, linked in tr.events.tolist():
        assert (a, m) not in seen
        if linked:
            seen.add((a, m))
    assert g.n_edges == len(seen)


def test_linking_follows_decision_table(mixed_three):
    tr = simulate(mixed_three, 2)
    ns = {}
    nd = {}
    types = tr.types
    for t, a, m, via, linked in tr.events.tolist():
        prof = mixed_three.profiles[types[a - 1]]
        same = types[a - 1] == types[m - 1]
        want = link_decision(prof, ns.get(a, 0), nd.get(a, 0), same)
        assert want == linked
        if linked:
            (ns if same else nd)[a] = (ns if same else nd).get(a, 0) + 1


def test_no_cross_links_under_full_homophily(homophilic_pair):
    tr = simulate(homophilic_pair, 3)
    assert sum(tr.graph.n_diff[1:]) == 0


def test_gamma_zero_never_uses_choice_set():
    cfg = SocietyConfig((tolerant(4, 0.0, 1.0),), horizon=150, seed=1)
    tr = simulate(cfg, 0)
    assert np.all(tr.events["via"] == Via.UNIFORM)


def test_meeting_probability_inside_choice_set():
    # agent 1 follows 2 and 3; they follow 4, 5, 6.  K = {4, 5, 6}, 10 agents.
    g = graph_from_edges([0] * 10, [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6)])
    g.begin_step()
    gamma = 0.3
    rng = RngStream(7, 0)
    n = 40000
    hits = sum(meeting_draw(g, 1, gamma, rng)[0] in (4, 5, 6) for _ in range(n))
    # uniform part draws from the 7 agents that are neither 1 nor followed by 1
    p = gamma + (1 - gamma) * 3 / 7
    assert abs(hits / n - p) < 4 * math.sqrt(p * (1 - p) / n)


def test_detect_potentially_unsatisfied():
    cfg = SocietyConfig((homophilic(5, 1.0, 0.4), partial("1/3", 1.0, 0.3), partial("1/3", 0.5, 0.3)))
    assert detect_potentially_unsatisfied(cfg) == [1]


def test_events_csv_header(homophilic_pair):
    tr = simulate(homophilic_pair, 0, horizon=20)
    lines = tr.events_csv().strip().split("\n")
    assert lines[0] == "t,actor,met,via,linked"
    assert len(lines) == 1 + tr.events.size


def test_decision_table_matches_rule():
    p = partial("2/5", 0.5, 1.0)
    tab = DecisionTable(p)
    for same in (0, 1):
        for a, row in enumerate(tab.accept[same]):
            for b, v in enumerate(row):
                assert v == link_decision(p, a, b, bool(same))


@settings(max_examples=25, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from(["1", "1/2", "2/5", "1/3", "0"]),
    st.sampled_from([0.0, 0.3, 1.0]),
    st.integers(20, 150),
)
def test_trajectory_invariants(seed, h, gamma, T):
    if h == "1":
        prof = homophilic(4, gamma, 0.5)
    elif h == "0":
        prof = tolerant(4, gamma, 0.5)
    else:
        prof = partial(h, gamma, 0.5)
    cfg = SocietyConfig((prof, homophilic(3, 0.5, 0.5)), horizon=T, seed=seed)
    tr = simulate(cfg, 0)
    g = tr.graph
    tabs = [DecisionTable(p) for p in cfg.profiles]
    for i in g.agents:
        fol = g.followees[i]
        assert i not in fol and len(set(fol)) == len(fol)
        k = g.types[i]
        saturated = tabs[k].done[g.n_same[i]][g.n_diff[i]]
        assert g.satisfied[i] == saturated
        if g.satisfied[i]:
            # one link per step at most, so formation takes at least as many steps as links
            assert g.eft[i] >= len(fol)
            assert g.eft[i] <= T - max(i, 2) + 1
    assert np.all(np.diff(tr.events["t"]) >= 0)
