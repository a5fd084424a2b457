"""How long does it take a homophilic agent to build its ego network?

Two equally large groups only value links to their own kind.  Each agent
needs five such links.  We simulate a few thousand births, look at agents
born late enough that the network around them has settled, and hold the
observed formation times against the closed-form mean and pmf.
"""
import numpy as np

from socialcapital import SocietyConfig, simulate
from socialcapital.harness.presets import homophilic, tolerant
from socialcapital.metrics import eft_empirical_pmf
from socialcapital.oracles import eeft_closed_form, eft_pmf_closed_form

society = SocietyConfig(
    (homophilic(5, gamma=0.5, share=0.5), homophilic(5, gamma=0.5, share=0.5)),
    horizon=3000,
    seed=11,
)

trajs = [simulate(society, rep, record_events=False) for rep in range(20)]
emp = eft_empirical_pmf(trajs, type_id=0, cohort=(1000, 2800))
pred = eeft_closed_form(society.profiles[0])
pmf = eft_pmf_closed_form(society.profiles[0], max_T=int(emp.support.max()) + 50).value

print(f"agents in cohort: {int(emp.n)} satisfied, {emp.excluded} still searching")
print(f"mean formation time  observed {emp.mean():.3f}   closed form {pred.value:.3f}")
print(f"total variation between the two pmfs: {emp.total_variation(pmf):.4f}")
print("\n  T   observed  predicted")
for T in range(5, 16):
    print(f"{T:3d}   {emp.mass_at(T)[0]:.4f}    {pmf.mass_at(T)[0]:.4f}")

# With no preference between groups every meeting is useful, so every agent
# is done after exactly L*(0) = 5 steps.
flat = SocietyConfig((tolerant(5, 0.5, 0.5), tolerant(5, 0.5, 0.5)), horizon=1000, seed=3)
e = simulate(flat).eft
print(f"\ntolerant society: formation times seen {sorted(set(e[~np.isnan(e)].astype(int).tolist()))}")
