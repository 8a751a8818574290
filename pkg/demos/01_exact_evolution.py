"""Exact evolution of a number state in a warm bath.

A Fock state |4> is coupled to a bath with N = 0.5 thermal photons. We
evolve it with the closed-form propagator, check the result against a
brute-force Runge-Kutta integration of the master equation, and watch the
populations relax toward the thermal distribution.
"""

import numpy as np

from nonclassical import BathParams, evolve, fock_state, ode_oracle, superposition_family

N = 0.5
rho0 = fock_state(4, 5)

print("gamma_t   P0      P1      P2      P3      P4      <n>     |analytic - ODE|")
for gt in (0.0, 0.2, 0.5, 1.0, 2.0, 5.0):
    rho = evolve(rho0, gt, N)
    ref = ode_oracle(rho0, BathParams(1.0, N), gt, trunc=rho.dim)
    err = np.max(np.abs(rho.entries - ref.entries))
    p = rho.populations[:5]
    print(f"{gt:6.2f}  " + "  ".join(f"{v:.4f}" for v in p) + f"  {rho.mean_photon_number():.4f}  {err:.1e}")

# The mean photon number relaxes as <n>(t) = N + (n0 - N) exp(-gamma t).
rho = evolve(rho0, 1.0, N)
print("\n<n> at gamma_t = 1:", rho.mean_photon_number(), "expected", N + (4 - N) * np.exp(-1.0))

# Coherences decay faster than populations: the k-th off-diagonal of a
# superposition dies out at least as exp(-k gamma t / 2) once transients pass.
psi = superposition_family("consecutive", 3, 4)
for gt in (0.0, 1.0, 4.0):
    c = evolve(psi, gt, N).entries
    print(f"gamma_t={gt}: |C[2,3]| = {abs(c[2, 3]):.3e}")
