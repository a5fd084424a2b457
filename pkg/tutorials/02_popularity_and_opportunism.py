"""Does meeting friends of friends make an early agent more popular?

We follow the in-degree of agent 10 in a tolerant society where every
agent wants five links.  When meetings are uniform, popularity grows like
a logarithm.  When every agent meets followees of its followees, early
agents are found again and again and popularity grows like a power of t,
but it starts slower.  The oracles give the log curve, a lower bound on
the power curve, and a bound on when the second overtakes the first.
"""
import numpy as np

from socialcapital import SocietyConfig, simulate
from socialcapital.harness.presets import tolerant
from socialcapital.metrics import popularity_series
from socialcapital.oracles import (
    crossover_time_bound,
    growth_exponent,
    mean_gregariousness,
    popularity_log_curve,
    popularity_sublinear_bound,
)

AGENT, T, REPS = 10, 2000, 60
curves = {}
for gamma in (0.0, 1.0):
    society = SocietyConfig((tolerant(5, gamma, 1.0),), horizon=T, seed=5)
    runs = np.array([popularity_series(simulate(society, r), AGENT) for r in range(REPS)])
    curves[gamma] = runs.mean(axis=0)

L_bar = mean_gregariousness(society)
b = growth_exponent(society)
log_curve = popularity_log_curve(AGENT, L_bar)
bound = popularity_sublinear_bound(AGENT, b)

print("   t   uniform  log oracle   friends-of-friends  lower bound")
for t in (20, 50, 100, 200, 500, 1000, 2000):
    print(f"{t:5d}   {curves[0.0][t - 1]:6.2f}   {log_curve(t):6.2f}       "
          f"{curves[1.0][t - 1]:6.2f}           {bound(t):6.2f}")

behind = np.nonzero(curves[1.0] <= curves[0.0])[0]
print(f"\nopportunistic mean stays ahead from t = {behind.max() + 2}")
print(f"closed-form bound on that time: {crossover_time_bound(AGENT, L_bar, b).value:,.0f}")
