"""Tour of the defective generalized Gompertz distribution.

A negative shape caps the cumulative hazard, so the survival curve
flattens out at a positive plateau instead of dropping to zero.  That
plateau is the cure fraction.  Everything here is closed form.
"""

import numpy as np

from quantcure import (
    cure_mass,
    logsf,
    quantile,
    susceptible_quantile,
    susceptible_sf,
    theta_from_quantile,
)

LAM = 1.0
ALPHA = -0.25  # negative shape -> defective -> cured subjects exist

print("survival plateau")
print("  t      S(t | theta=2)   S(t | theta=0.5)")
for t in (0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0):
    s2 = np.exp(logsf(t, LAM, ALPHA, 2.0))
    s05 = np.exp(logsf(t, LAM, ALPHA, 0.5))
    print(f"  {t:5.1f}  {s2:14.6f}   {s05:14.6f}")
print(f"  p0     {cure_mass(LAM, ALPHA, 2.0):14.6f}   {cure_mass(LAM, ALPHA, 0.5):14.6f}")
print()

# The regression acts on the q-th quantile of the susceptible subjects
# (the ones who will eventually fail).  theta_from_quantile inverts the
# relationship, so placing the quantile chooses the power parameter.
print("quantile reparameterization, lam=1, alpha=-0.25")
for q in (0.2, 0.5, 0.8):
    for mu in (2.0, 5.0):
        theta = float(theta_from_quantile(LAM, ALPHA, mu, q))
        back = float(susceptible_quantile(q, LAM, ALPHA, theta))
        p0 = float(cure_mass(LAM, ALPHA, theta))
        print(f"  q={q}  mu={mu}  theta={theta:9.4f}  quantile(theta)={back:7.4f}  p0={p0:.4f}")
print()

# Reference scenario used throughout the tests: coefficients (1.3, 0.7)
# on a log link, so the two covariate arms place the quantile at
# exp(1.3) and exp(2.0).
print("cure fractions by arm, beta = (1.3, 0.7)")
print("  q     x=0     x=1")
for q in (0.2, 0.5, 0.8):
    row = []
    for x in (0, 1):
        mu = np.exp(1.3 + 0.7 * x)
        theta = theta_from_quantile(LAM, ALPHA, mu, q)
        row.append(float(cure_mass(LAM, ALPHA, theta)))
    print(f"  {q:.1f}  {row[0]:.4f}  {row[1]:.4f}")
print()

# sanity: the susceptible subpopulation has a proper distribution, its
# sf really hits 1-q at the reparameterized quantile
theta = float(theta_from_quantile(LAM, ALPHA, 3.0, 0.5))
print("susceptible_sf at the placed median:",
      float(susceptible_sf(3.0, LAM, ALPHA, theta)))
print("overall quantile at total mass level:",
      float(quantile(0.25, LAM, ALPHA, theta)))
