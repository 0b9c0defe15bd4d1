import numpy as np
import pytest

from adgd.problems import (
    make_dual_entropy,
    make_least_squares,
    make_logistic,
    make_lrmc,
    make_min_curve,
    make_mle,
    make_nmf,
    make_quadratic,
)
from adgd.reference import make_reference
from adgd.solvers import AdGD2, RunConfig, run_solver

# (max_iter, grad_tol) for certificate-grade runs; certificates are
# inequality checks, so depth buys nothing beyond coverage
CERT_BUDGET = {
    "quadratic": (4000, 1e-10),
    "least_squares": (4000, 1e-10),
    "logistic": (2000, 1e-11),
    "mle": (1200, 1e-8),
    "lrmc": (600, 1e-10),
    "curve": (1500, 1e-9),
    "nmf": (1200, 1e-9),
    "dual_entropy": (3000, 1e-9),
}


def certificate_pool():
    """The 20 seeded instances the acceptance criteria run over."""
    pool = []
    for i, cond in enumerate([10.0, 100.0, 1000.0, 30.0, 300.0]):
        pool.append(make_quadratic(seed=100 + i, n=40, condition_number=cond))
    for i in range(5):
        pool.append(make_least_squares(seed=200 + i, n=60, d=30))
    for i in range(5):
        pool.append(make_logistic(seed=300 + i, d=25))
    pool.append(make_mle(seed=1, n=50, l=0.1, u=10.0, M=50))
    pool.append(make_lrmc(seed=1, n=60, r=10, fraction=0.2))
    pool.append(make_min_curve(seed=1, m=20, n=100))
    pool.append(make_nmf(seed=1, n=60, r=10))
    pool.append(make_dual_entropy(seed=1, m=100, n=50))
    return pool


@pytest.fixture(scope="session")
def ref_cache(tmp_path_factory):
    return tmp_path_factory.mktemp("reference_cache")


@pytest.fixture(scope="session")
def pool():
    return certificate_pool()


@pytest.fixture(scope="session")
def pool_traces(pool):
    """Certificate-grade adaptive runs (searched alpha0, full recording)."""
    traces = {}
    for inst in pool:
        max_iter, tol = CERT_BUDGET[inst.kind]
        cfg = RunConfig(max_iter=max_iter, grad_tol=tol, alpha0="search",
                        record_trace=True)
        traces[id(inst)] = run_solver(inst, AdGD2(), cfg)
    return traces


@pytest.fixture(scope="session")
def pool_references(pool, ref_cache):
    refs = {}
    for inst in pool:
        refs[id(inst)] = make_reference(inst, ref_cache)
    return refs


def rng_points(dim, n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.normal(size=(n, dim))
