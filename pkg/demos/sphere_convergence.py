# %% [markdown]
# # Convergence on the sphere function
# A 30-dimensional sphere is the usual smoke test for a population optimizer.
# We run plain MFO, two spiral variants and PSO at the same budget and compare
# against uniform random search.

# %%
import numpy as np

from spiralmfo import MfoConfig, ObjectiveSpec, PsoConfig, SpiralKernel, SpiralKind, optimize, pso_optimize

sphere = ObjectiveSpec(30, -100.0, 100.0, lambda x: float(x @ x), name="sphere")
budget = dict(population=30, iterations=200, seed=1)

runs = {
    "MFO": optimize(sphere, MfoConfig(**budget), "MFO"),
    "LMFO1": optimize(sphere, MfoConfig(kernel=SpiralKernel(SpiralKind.ARCHIMEDEAN), **budget)),
    "LMFO4": optimize(sphere, MfoConfig(kernel=SpiralKernel(SpiralKind.LITUUS), **budget)),
    "PSO": pso_optimize(sphere, PsoConfig(**budget)),
}

# %%
rng = np.random.default_rng(1)
samples = rng.uniform(-100, 100, (30 * 201, 30))
print(f"random search   {np.min(np.einsum('ij,ij->i', samples, samples)):.4g}")
for name, rec in runs.items():
    checkpoints = rec.curve[[0, 49, 99, 199]]
    print(f"{name:14}  " + "  ".join(f"{v:10.4g}" for v in checkpoints))

# %% [markdown]
# Curves never increase because the best-so-far is kept in the flame set
# (or the global best for PSO).
