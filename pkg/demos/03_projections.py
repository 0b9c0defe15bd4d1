"""The projection toolbox behind the constrained experiments.

Each constraint set in the experiment problems has an exact Euclidean
projection: orthant clamp, affine solve with a cached factorization,
eigenvalue clamp for the spectral box, singular-value shrinkage for the
nuclear ball.
"""

import numpy as np

from adgd.prox import (
    project_affine,
    project_l1_ball,
    project_nonneg,
    project_nuclear_ball,
    project_spectral_box,
)

rng = np.random.default_rng(0)

print("orthant:", project_nonneg(np.array([1.0, -2.0, 0.0])))

A = np.array([[1.0, 1.0, 0.0]])
b = np.array([3.0])
z = np.array([0.0, 0.0, 5.0])
p = project_affine(z, A, b)
print("affine Ax=b:", p, "| residual:", float(np.linalg.norm(A @ p - b)))

Z = np.diag([0.05, 5.0, 20.0])
boxed = project_spectral_box(Z, l=0.1, u=10.0)
print("spectral box eigenvalues:", np.linalg.eigvalsh(boxed))

M = np.diag([3.0, 1.0, 0.0])
shrunk = project_nuclear_ball(M, r=2.0)
print("nuclear ball singular values:",
      np.linalg.svd(shrunk, compute_uv=False).round(6))

v = rng.normal(size=6) * 3
pv = project_l1_ball(v, r=1.0)
print("l1 ball: ||v||_1 =", round(np.abs(v).sum(), 3),
      "-> ||P(v)||_1 =", round(np.abs(pv).sum(), 6))
