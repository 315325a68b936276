# %% [markdown]
# # Spiral envelopes
# Each LMFO variant swaps the radial envelope S(t) that scales a moth's jump
# toward its flame. Printing a few values side by side shows how differently
# they behave over the trajectory window [-2, 1].

# %%
import numpy as np

from spiralmfo import SpiralKernel, SpiralKind, radial_envelope

t = np.linspace(-2.0, 1.0, 7)
rng = np.random.default_rng(0)
print("t      " + " ".join(f"{v:8.2f}" for v in t))
for kind in SpiralKind:
    s = radial_envelope(SpiralKernel(kind, q=1.0), t, rng)
    print(f"{kind.lmfo_name:6} " + " ".join(f"{v:8.3f}" for v in s))

# %% [markdown]
# The update multiplies S(t) by cos(2 pi t), so the effective step factor
# changes sign inside the window. Archimedean and Random vanish at t=0, which
# lets moths settle exactly on their flame.

# %%
factor = radial_envelope(SpiralKernel(SpiralKind.EQUIANGULAR), t) * np.cos(2 * np.pi * t)
print(np.round(factor, 3))

# %% [markdown]
# Trace files for plotting land in ./spiral_traces (columns t,x,y).

# %%
from spiralmfo.experiment import emit_spiral_traces

for path in emit_spiral_traces(out_dir="spiral_traces", t_start=0.0, t_stop=3.0, samples=301):
    print(path)
