"""High-accuracy reference solutions, cached on disk.

References are self-hosted: a long adaptive proximal-gradient run with a
tight gradient-mapping tolerance.  For the nonconvex factorization problem
the reference is the best value found over a ten-restart sweep and is labeled
as such.  Cache files are keyed by the problem descriptor, so a rerun with
the same seed and parameters is a pure cache hit.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .core import ReferenceSolution
from .problems import ProblemInstance, instance_descriptor, make_nmf
from .solvers import AdGD2, RunConfig, run_solver

REFERENCE_GRAD_TOL = 1e-12
REFERENCE_MAX_ITER = 10 ** 6
NMF_RESTARTS = 10


def reference_key(inst: ProblemInstance) -> str:
    desc = json.dumps(instance_descriptor(inst), sort_keys=True)
    return hashlib.sha256(desc.encode()).hexdigest()[:16]


def reference_path(cache_dir, inst: ProblemInstance) -> Path:
    return Path(cache_dir) / f"ref_{inst.kind}_{reference_key(inst)}.npz"


def _save(path: Path, ref: ReferenceSolution, inst: ProblemInstance) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(
        tmp,
        x_star=ref.x_star,
        F_star=np.float64(ref.F_star),
        tolerance=np.float64(ref.tolerance),
        provenance=np.str_(ref.provenance),
        descriptor=np.str_(json.dumps(instance_descriptor(inst), sort_keys=True)),
    )
    os.replace(tmp, path)


def _load(path: Path) -> ReferenceSolution:
    with np.load(path) as data:
        return ReferenceSolution(
            x_star=np.array(data["x_star"]),
            F_star=float(data["F_star"]),
            tolerance=float(data["tolerance"]),
            provenance=str(data["provenance"]),
        )


def _solve_reference(inst: ProblemInstance, grad_tol: float, max_iter: int) -> ReferenceSolution:
    cfg = RunConfig(max_iter=max_iter, grad_tol=grad_tol,
                    record_trace=False, record_rows=False)
    tr = run_solver(inst, AdGD2(), cfg)
    prov = (f"adaptive proximal gradient, grad_tol={grad_tol:g}, "
            f"iters={tr.iters}, status={tr.status}")
    if tr.status != "converged":
        prov += " (low-confidence: budget exhausted)"
    return ReferenceSolution(x_star=tr.x_final, F_star=tr.F_final,
                             tolerance=max(tr.final_residual, grad_tol),
                             provenance=prov)


def _solve_nmf_reference(inst: ProblemInstance, grad_tol: float, max_iter: int) -> ReferenceSolution:
    meta = inst.metadata
    best = None
    for restart in range(NMF_RESTARTS):
        variant = make_nmf(inst.generator_seed, meta["n"], meta["r"], start_index=restart)
        tr = run_solver(variant, AdGD2(),
                        RunConfig(max_iter=max_iter, grad_tol=grad_tol,
                                  record_trace=False, record_rows=False))
        if best is None or tr.F_final < best.F_final:
            best = tr
    return ReferenceSolution(
        x_star=best.x_final,
        F_star=best.F_final,
        tolerance=max(best.final_residual, grad_tol),
        provenance=f"best-found over {NMF_RESTARTS} restarts (nonconvex)",
    )


def make_reference(inst: ProblemInstance, cache_dir=None,
                   grad_tol: float = REFERENCE_GRAD_TOL,
                   max_iter: int = REFERENCE_MAX_ITER,
                   force: bool = False) -> ReferenceSolution:
    """Reference for ``inst``, from cache when available.

    Convex problems get a single long run; the factorization problem gets a
    restart sweep with a best-found label.  Pass ``cache_dir=None`` to skip
    caching entirely.
    """
    path = None
    if cache_dir is not None:
        path = reference_path(cache_dir, inst)
        if path.exists() and not force:
            return _load(path)
    if inst.kind == "nmf":
        ref = _solve_nmf_reference(inst, max(grad_tol, 1e-10), min(max_iter, 20000))
    else:
        ref = _solve_reference(inst, grad_tol, max_iter)
    if path is not None:
        _save(path, ref, inst)
    return ref
