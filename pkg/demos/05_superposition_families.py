"""Superpositions of number states under a warm bath.

Four families are compared at N = 0.06 and gamma_t = 0.15:
consecutive (|n-1> + |n>), skip (|n-1> + |n+1>), equal-weight
sum_{m<=n}|m> and a geometric family on odd levels.
"""

from nonclassical.sweep import config_from_text, curve, run_sweep

for family in ("consecutive", "skip", "equal", "geometric"):
    cfg = config_from_text(
        f"scenario = superposition_families\nstate_family = {family}\nn_max = 8\nN = 0.06\ngamma_t = 0\ngamma_t = 0.15\n"
    )
    res = run_sweep(cfg, threads=4)
    for gt in cfg.gamma_t:
        _, eta = curve(res, "negativity", gt, 0.06)
        print(f"{family:12s} gamma_t={gt:4.2f}: " + " ".join(f"{v:5.3f}" for v in eta))
