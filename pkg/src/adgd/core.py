"""Problem abstractions shared by every solver and diagnostic.

A point is a flat float64 array.  Matrix-valued problems flatten their
variables row-major and record the shapes in their own metadata, so a single
solver codepath serves everything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class DimensionMismatch(ValueError):
    """Input point does not match the problem dimension."""


class NumericalError(RuntimeError):
    """A non-finite value appeared where a finite one was required."""


def as_point(x) -> np.ndarray:
    """Return ``x`` as a 1-d float64 array, validating finiteness."""
    p = np.asarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(p)):
        raise NumericalError("point has non-finite entries")
    return p


@dataclass(frozen=True)
class SmoothFunction:
    """Differentiable convex piece: value and exact gradient oracles.

    ``lipschitz`` holds a known global smoothness constant when one exists
    (quadratics, logistic); ``None`` for merely locally smooth objectives.
    """

    dimension: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    name: str = "f"
    lipschitz: Optional[float] = None
    convex: bool = True

    def check_dim(self, x: np.ndarray) -> None:
        if x.shape != (self.dimension,):
            raise DimensionMismatch(
                f"{self.name}: expected dimension {self.dimension}, got {x.shape}"
            )


@dataclass(frozen=True)
class ProxFriendly:
    """Convex lsc piece with a cheap proximal map.

    ``value`` may return ``+inf`` (indicator functions); ``prox`` must return
    a point where ``value`` is finite.  ``cost`` lists the counter increments
    one prox call incurs beyond the call itself (e.g. one eigendecomposition).
    """

    value: Callable[[np.ndarray], float]
    prox: Callable[[float, np.ndarray], np.ndarray]
    name: str = "g"
    cost: dict = field(default_factory=dict)
    is_zero: bool = False


def zero_prox_friendly() -> ProxFriendly:
    """g = 0: the prox is the identity and the value vanishes everywhere."""
    return ProxFriendly(
        value=lambda x: 0.0,
        prox=lambda alpha, z: z,
        name="zero",
        is_zero=True,
    )


@dataclass(frozen=True)
class CompositeProblem:
    """Objective ``F = f + g`` with an essential-operation cost model.

    ``cost_model`` maps each oracle call kind ("value", "gradient", "prox")
    to the counter increments it triggers; see :mod:`adgd.accounting`.
    """

    f: SmoothFunction
    g: ProxFriendly
    label: str = ""
    cost_model: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.f.dimension

    @property
    def has_prox_part(self) -> bool:
        return not self.g.is_zero


def composite(f: SmoothFunction, g: Optional[ProxFriendly] = None,
              label: str = "") -> CompositeProblem:
    """Assemble a composite problem, defaulting g to the zero function."""
    if g is None:
        g = zero_prox_friendly()
    cost_model = {
        "value": {"func_evals": 1},
        "gradient": {"grad_evals": 1},
        "prox": {"prox_evals": 1, **g.cost},
    }
    return CompositeProblem(f=f, g=g, label=label or f.name, cost_model=cost_model)


@dataclass(frozen=True)
class ReferenceSolution:
    """High-accuracy anchor point (x_ref, F_ref) used by certificates.

    ``tolerance`` is the residual of the run that produced it (the final
    gradient-mapping norm), not a guaranteed distance to the true optimum.
    """

    x_star: np.ndarray
    F_star: float
    tolerance: float
    provenance: str = ""


def evaluate_composite(p: CompositeProblem, x) -> float:
    """F(x) = f(x) + g(x); +inf whenever g(x) = +inf."""
    x = np.asarray(x, dtype=np.float64).ravel()
    p.f.check_dim(x)
    gx = p.g.value(x)
    if gx == np.inf:
        return np.inf
    return float(p.f.value(x)) + float(gx)


def finite_difference_gradient(f: SmoothFunction, x, h: Optional[float] = None) -> np.ndarray:
    """Central-difference gradient estimate, componentwise.

    With ``h=None`` each coordinate uses the relative step 1e-6 * (1 + |x_i|).
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    f.check_dim(x)
    out = np.empty_like(x)
    for i in range(x.size):
        hi = h if h is not None else 1e-6 * (1.0 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = hi
        fp = f.value(x + e)
        fm = f.value(x - e)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericalError(f"non-finite value in finite difference at coordinate {i}")
        out[i] = (fp - fm) / (2.0 * hi)
    return out


def cocoercivity_gap(f: SmoothFunction, x, y, lipschitz: float) -> float:
    """<grad f(y) - grad f(x), y - x> - ||grad f(y) - grad f(x)||^2 / L.

    Nonnegative for convex L-smooth f.
    """
    x = as_point(x)
    y = as_point(y)
    dg = f.gradient(y) - f.gradient(x)
    return float(np.dot(dg, y - x) - np.dot(dg, dg) / lipschitz)
