# Two parallel slits: the Euler strip sampler against the interval kernel,
# and the Fourier relation that adds a Brownian coordinate.

import numpy as np

from hitkit import kernels as kn
from hitkit.diffusion_sim import SimConfig, sample_strip_hit

#%%
# A small run at a coarse step.  Exit places satisfy |r| > 1 and the two
# sides are equally likely from the centre.

s = sample_strip_hit(1.0, (0.0, 0.0), SimConfig(seed=0, n_paths=50_000, dt=1e-3))
r = s.place[:, 0]
print("P(r > 1) =", np.mean(r > 1), " failures:", s.horizon_failures)

#%%
edges = np.geomspace(1.05, 6, 11)
folded, _ = np.histogram(np.abs(r), edges)
for lo, hi, c in zip(edges[:-1], edges[1:], folded):
    x = np.linspace(lo, hi, 51)
    mass = np.trapz(kn.interval_poisson(1.0, 0.0, x) + kn.interval_poisson(1.0, 0.0, -x), x)
    print(f"[{lo:5.2f}, {hi:5.2f})  mc={c / len(r):.4f}  kernel={mass:.4f}")

#%%
# Fourier relation at zero effective frequency: the sigma2 marginal of the
# three-dimensional exit equals the interval kernel.

res = kn.strip_ft_check(1.0, 0.0, 0.0, (1.2, 2.0), 0.0, 50_000, seed=1, dt=1e-3)
print(res.lhs, "+/-", res.lhs_se, " vs ", res.rhs)
