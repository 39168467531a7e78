"""
Constant coexistence states and the cost of splitting into packs
================================================================

Every admissible parameter set carries exactly one strictly positive constant
solution.  This script computes it, checks it is an exact kinetic equilibrium,
shows what parameter validation enforces, and quantifies how the aggregate
predator biomass drops once the population splits into mutually hostile packs.
"""

import numpy as np

from packlab import (
    ModelParams,
    constant_coexistence_state,
    reaction_terms,
    total_population,
    validate_params,
)

# 1. the anchor parameter point: two packs, unit competition
p = ModelParams(d=0.5, D=1.0, omega=0.5, k=1.0, lam=1.0, mu=1.0, beta=1.0, N=2)
w, u, N = constant_coexistence_state(p)
print(f"anchor state: w_i = {w:.12f}, u = {u:.12f}   (exact values 1/6 and 2/3)")

# plugging the constants back into the kinetics returns zero to roundoff
rates = reaction_terms(p, np.full(N, w), np.asarray(u))
print(f"reaction residual at the constant state: {np.abs(rates).max():.3e}")

# 2. validation enforces positivity and the viability condition lam*k > mu*omega
bad = ModelParams(d=0.5, D=1.0, omega=3.0, k=1.0, lam=1.0, mu=1.0, beta=-1.0, N=2)
print("\nvalidating an inadmissible parameter set reports:")
for problem in validate_params(bad):
    print(f"    {problem}")

# 3. biomass comparison: W_N / W_1 <= 1, equality exactly at beta = 0 or N = 1
print("\naggregate biomass ratio W_N / W_1 at N = 4:")
for beta in (0.0, 0.1, 1.0, 10.0, 100.0):
    comp = total_population(
        ModelParams(d=0.5, D=1.0, omega=0.5, k=1.0, lam=1.0, mu=1.0, beta=beta, N=4)
    )
    print(f"    beta = {beta:>5g}:  ratio = {comp.ratio:.6f}")

print("\nand along N at beta = 1:")
for n_packs in (1, 2, 4, 8, 16, 64):
    comp = total_population(
        ModelParams(d=0.5, D=1.0, omega=0.5, k=1.0, lam=1.0, mu=1.0, beta=1.0, N=n_packs)
    )
    print(f"    N = {n_packs:>3d}:  ratio = {comp.ratio:.6f}")
print("the ratio approaches k^2/(k^2 + mu*beta) as N grows, never zero:")
print(f"    limit here = {1.0 / (1.0 + 1.0 * 1.0):.6f}")
