"""Wigner negativity of number states, and how a vacuum bath erases it.

Writes the Wigner function of |3> to ``fock3_wigner.csv`` (columns x,p,w)
for plotting, then tabulates the negative volume eta_W for the first few
number states before and after a short decay.
"""

import math

from nonclassical import GridSpec, evolve, fock_state, negativity_report, positivity_time, wigner_synthesize
from nonclassical.wigner import write_wigner_csv

grid = wigner_synthesize(fock_state(3, 4), GridSpec(n_x=121, n_p=121))
write_wigner_csv(grid, "fock3_wigner.csv")
print(f"W(0,0) for |3> = {grid.values[60, 60]:.5f} (expected {-1 / math.pi:.5f})")
print(f"integral of W   = {grid.integrate():.8f}")

print("\n n   eta_W(t=0)   eta_W(gamma_t=0.15)")
for n in range(1, 11):
    r0 = negativity_report(fock_state(n, n + 1))
    r1 = negativity_report(evolve(fock_state(n, n + 1), 0.15, 0.0))
    print(f"{n:2d}   {r0.value:9.5f}    {r1.value:9.5f}")

# After t* = ln 2 / gamma every number state has a non-negative Wigner function.
t_star = positivity_time(0.0)
print(f"\nat gamma t* = {t_star:.4f}: eta_W(|8>) = {negativity_report(evolve(fock_state(8, 9), t_star, 0.0)).value:.2e}")
