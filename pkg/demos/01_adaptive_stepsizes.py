"""Adaptive stepsizes on objectives with varying curvature.

The adaptive rules read off the local curvature from two consecutive
gradients and size the next step accordingly, with no smoothness constant and
no backtracking.  On the quartic (not globally smooth: no valid global fixed
step exists) the method still converges; on an ill-conditioned quadratic the
steps grow far beyond the classical 2/L ceiling whenever the trajectory
crosses flat regions.
"""

import numpy as np

from adgd import AdGD2, FixedStep, RunConfig, make_quadratic, make_quartic, run_solver

# quartic: fixed steps must guess; adaptive needs nothing
quartic = make_quartic()
adaptive = run_solver(quartic, AdGD2(), RunConfig(max_iter=5000, grad_tol=1e-10))
print("quartic, adaptive     :", adaptive.status, f"iters={adaptive.iters}",
      f"x={adaptive.x_final[0]:.3e}")

for alpha in (0.3, 0.05):
    fixed = run_solver(quartic, FixedStep(alpha), RunConfig(max_iter=5000, grad_tol=1e-10))
    print(f"quartic, fixed a={alpha:<5}:", fixed.status, f"iters={fixed.iters}",
          f"x={fixed.x_final[0]:.3e}")

# ill-conditioned quadratic: compare against the optimal fixed step 1/L
quad = make_quadratic(seed=3, n=60, condition_number=500.0)
L = quad.composite.f.lipschitz
adaptive = run_solver(quad, AdGD2(), RunConfig(max_iter=20000, grad_tol=1e-9))
fixed = run_solver(quad, FixedStep(1.0 / L), RunConfig(max_iter=20000, grad_tol=1e-9))
print(f"\nquadratic cond=500: adaptive iters={adaptive.iters}, "
      f"fixed(1/L) iters={fixed.iters}")
print(f"adaptive stepsizes: min={adaptive.alphas.min():.3e} "
      f"median={np.median(adaptive.alphas):.3e} max={adaptive.alphas.max():.3e}")
print(f"classical ceiling 2/L = {2.0 / L:.3e} "
      f"(exceeded on {np.mean(adaptive.alphas > 2.0 / L) * 100:.0f}% of steps)")
