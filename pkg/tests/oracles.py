"""Independent brute-force oracles shared by unit and acceptance tests."""

import numpy as np


def l1_project_bisect(v, r):
    """Solve the soft-threshold equation by bisection (sort-free route)."""
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= r:
        return v.copy()
    lo, hi = 0.0, float(a.max())
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(a - mid, 0.0).sum() > r:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    return np.sign(v) * np.maximum(a - tau, 0.0)


def l1_project_scan(v, r):
    """Exhaustive threshold scan over every candidate support size."""
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= r:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    tau = None
    for j in range(u.size):
        cand = (css[j] - r) / (j + 1)
        upper = u[j]
        lower = u[j + 1] if j + 1 < u.size else 0.0
        if lower <= cand <= upper + 1e-15:
            tau = cand
            break
    assert tau is not None
    return np.sign(v) * np.maximum(a - tau, 0.0)


def nuclear_project_scan(Z, r):
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    return (U * l1_project_scan(s, r)) @ Vt
