"""Who bridges two closed groups?

Two large groups only link inside themselves and search through friends
of friends, so on their own they never meet.  A small third group accepts
some cross-group links.  We compare its average betweenness with the
others when it explores at random (gamma3 = 0) and when it also searches
only through friends of friends (gamma3 = 1).
"""
import numpy as np

from socialcapital import SocietyConfig, simulate
from socialcapital.graph import components_undirected
from socialcapital.harness.presets import homophilic, partial
from socialcapital.metrics import avg_betweenness_by_type
from socialcapital.oracles import connectedness_predicate

for g3 in (0.0, 1.0):
    society = SocietyConfig(
        (homophilic(5, 1.0, 0.4, "A"), homophilic(5, 1.0, 0.4, "B"), partial("1/3", g3, 0.2, "bridge")),
        horizon=800,
        seed=23,
    )
    scores = []
    omegas = []
    for rep in range(10):
        g = simulate(society, rep, record_events=False).graph
        scores.append(avg_betweenness_by_type(g, 3))
        omegas.append(components_undirected(g)[0])
    m = np.mean(scores, axis=0)
    print(f"gamma3 = {g3}: mean betweenness A {m[0]:7.1f}  B {m[1]:7.1f}  bridge {m[2]:7.1f}; "
          f"components {sorted(set(omegas))}; predicted connected: {connectedness_predicate(society).value}")
