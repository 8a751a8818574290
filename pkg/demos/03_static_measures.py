"""Distance-based non-classicality of number states against three classical bases.

For each |n> the Hillery distance is searched over coherent states, thermal
states and the broadened microcanonical mixtures rho_nu^+. The last basis
sits much closer to number states, which is why it yields smaller
distances. The Dodonov overlap against coherent states is compared with
its closed form e^-n n^n / n!.
"""

from nonclassical import SearchConfig, fock_state
from nonclassical import measures as ms

cfg = SearchConfig(max_evals=400)
print(" n   coherent   thermal   rho_nu+    dodonov   closed form")
for n in range(0, 8):
    rho = fock_state(n, n + 1)
    row = []
    for kind in ("coherent", "thermal", "rho_nu_plus"):
        row.append(ms.hillery_eta(rho, ms.default_families(rho, (kind,)), cfg).value)
    d = ms.dodonov_eta(rho, ms.default_families(rho, ("coherent",)), cfg)
    print(f"{n:2d}   " + "   ".join(f"{v:7.4f}" for v in row) + f"   {d.value:7.4f}   {ms.fock_coherent_overlap(n):7.4f}")

rep = ms.hillery_eta(fock_state(5, 6), config=cfg)
print("\nclosest classical state to |5> in the union basis:", rep.argopt.label(), f"({rep.evaluations} evaluations)")
