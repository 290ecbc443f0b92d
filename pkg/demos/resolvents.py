# Resolvent bridge between the diffusion and the relativistic stable
# process, and the sweeping identity on a half-line.

import numpy as np

from hitkit import kernels as kn

#%%
alpha, m, n = 0.8, 1.0, 2
x, y = np.array([0.0, 0.0]), np.array([1.5, 0.0])
lhs = kn.resolvent_relativistic(alpha, n, m, x, y)
rhs = kn.resolvent_bridge_constant(alpha) * kn.resolvent_U_lambda(alpha, n, m ** (1 / alpha), np.r_[0.0, x],
                                                                 np.r_[0.0, y])
print(lhs, rhs, lhs / rhs - 1)

#%%
# Sweeping out onto {z1 >= 0}: the residual is zero up to quadrature error.

for alpha, m, n, x, y in [(1.0, 1.0, 1, [-1.0], [1.0]), (0.5, 0.7, 2, [-1.0, 0.0], [0.5, 0.0])]:
    res = kn.sweeping_residual(alpha, m, n, x, y)
    print(alpha, m, n, res / kn.resolvent_relativistic(alpha, n, m, x, y))

#%%
# The Cauchy kernel 1/(r - x) expanded in Gegenbauer polynomials.

for N in (5, 10, 20, 40):
    print(N, kn.cauchy_gegenbauer_expansion(1.0, 2.0, 0.3, N) - 1 / 1.7)
