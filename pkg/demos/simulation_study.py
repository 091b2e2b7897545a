"""Small Monte Carlo study: bias and interval coverage across sample sizes.

Each replicate draws a fresh dataset (cured subjects never fail, the
rest get a generalized Gompertz time, uniform censoring calibrated to
hit the requested censored fraction), fits it, and records posterior
means plus both 95% intervals.  B here is kept small so the script
finishes in a couple of minutes; push it up for smoother numbers.
"""

import time

import numpy as np

from quantcure import ChainConfig, SimScenario, run_study

B = 10
SIZES = (60, 120)

scenario = SimScenario(alpha=-0.25, lam=1.0, beta=(1.3, 0.7), q=0.5, n=60, seed=2)
print(f"scenario: alpha={scenario.alpha}, lam={scenario.lam}, beta={scenario.beta}, "
      f"q={scenario.q}")
print(f"targets: censored fraction {scenario.pc(0):.3f} (x=0), {scenario.pc(1):.3f} (x=1)")

# shorter chains than the defaults keep the demo quick; the init field
# is a placeholder, every replicate starts from its own point
chain = ChainConfig(iterations=6000, burn_in=2000, init=np.zeros(1), thin=4)

t0 = time.time()
summaries = run_study(scenario, B, SIZES, chain=chain)
print(f"{B} replicates x {len(SIZES)} sizes in {time.time() - t0:.0f}s")
print()

for s in summaries:
    print(f"n = {s.n} ({s.b_used} replicates used)")
    print("  parameter   truth    mean     bias      mse   cov(hpd)  cov(eq)")
    for j, name in enumerate(s.parameters):
        print(f"  {name:9s} {s.truth[j]: 7.3f} {s.mean_estimate[j]: 7.3f} "
              f"{s.bias[j]: 8.3f} {s.mse[j]: 8.3f}   {s.coverage_hpd[j]:.2f}     "
              f"{s.coverage_equal_tail[j]:.2f}")
    print()

print("expect |bias| to shrink as n grows and coverage to sit near 0.95;")
print("at B=10 the coverage column only takes steps of 0.1, so read it loosely")
