# %% [markdown]
# # Nonlinear decay of small radial data
#
# `python3 notebooks/decay_walkthrough.py` (about three minutes on one core).
#
# For small, radial, integrable data the defocusing cubic flow should decay
# like the free flow: t^(3/2) ||u(t)||_inf / ||u0||_1 stays bounded.  No
# constant is given, so the check is about shape.  The running maximum
# A(t) of that ratio must level off, and its value must not move when the
# grid or the time step is refined.

# %%
import numpy as np

from nlslab.config import parse_config
from nlslab.experiments import decay_experiment

cfg = parse_config(open("notebooks/configs/decay.cfg").read())
v = decay_experiment(cfg, besov=True)
print(f"verdict: {v.status}")
for name, ok in v.checks.items():
    print(f"  {name:18s} {'ok' if ok else 'FAILED'}")

# %% [markdown]
# Horizons differ per run because the boundary monitor is a measurement.
# Sups are compared over the shortest one.

# %%
for name, h in v.horizons.items():
    print(f"  horizon[{name}] = {h:.2f}")
print(f"sup ratio {v.sup_ratio:.6f} (64^3), {v.sup_ratio_refined:.6f} (96^3), "
      f"{v.sup_ratio_dt_half:.6f} (dt/2); kernel constant {v.kernel_constant:.6f}")
print(f"plateau growth over the final third: {v.plateau_growth:.2%} / {v.plateau_growth_refined:.2%}")

# %% [markdown]
# The running maximum on the base run, every few samples:

# %%
base = v.runs["base"]
for t, r, a in list(zip(base.times, base.ratio, base.A))[::10]:
    print(f"  t = {t:5.2f}   ratio = {r:.6f}   A = {a:.6f}")

# %% [markdown]
# Finally the Besov-Strichartz sum at the admissible pair (10/3, 10/3).

# %%
b = v.besov
print(f"sum {b['sum']:.5f} vs refined {b['sum_refined']:.5f} (relative change {b['delta']:.3%})")
print("admissibility gate:", b["gate"])
