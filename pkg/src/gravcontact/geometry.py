"""Dense tensor bookkeeping and the central-difference engine.

Component arrays are plain ``numpy`` arrays; a rank-k object over an
n-dimensional chart is stored as an array of shape ``(n,) * k``.  Derivative
evaluators everywhere in the package put the derivative axis FIRST, so the
gradient of a ``(n,) * k`` field has shape ``(n,) + (n,) * k``.

All numerical derivatives are central differences.  With ``order=4`` the
five-point stencil is used (equivalently, one Richardson extrapolation of
the three-point stencil), which is exact on cubics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, EvaluationDomainError


@dataclass(frozen=True)
class DiffConfig:
    """Settings for the finite-difference engine.

    ``step`` is relative: the actual step along axis ``a`` is
    ``step * max(1, |y_a|)``.
    """

    step: float = 1e-5
    richardson: bool = True
    order: int = 4

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.order not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {self.order}")

    @property
    def effective_order(self) -> int:
        return 4 if (self.richardson and self.order == 4) else 2


DEFAULT_DIFF = DiffConfig()


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Average an array over all permutations of its slots.

    Idempotent; requires every slot to have the same dimension.
    """
    a = np.asarray(a, dtype=float)
    rank = a.ndim
    if rank <= 1:
        return a.copy()
    dims = set(a.shape)
    if len(dims) != 1:
        raise DimensionMismatchError(
            f"symmetrize needs equal slot dimensions, got shape {a.shape}"
        )
    out = np.zeros_like(a)
    for perm in itertools.permutations(range(rank)):
        out += np.transpose(a, perm)
    return out / math.factorial(rank)


def _shifted(y: np.ndarray, axis: int, delta: float) -> np.ndarray:
    z = np.array(y, dtype=float)
    z[axis] += delta
    return z


def _stencil(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, axis: int,
             h: float, order: int) -> np.ndarray:
    if order == 4:
        samples = [f(_shifted(y, axis, d)) for d in (-2 * h, -h, h, 2 * h)]
        fm2, fm1, fp1, fp2 = (np.asarray(s, dtype=float) for s in samples)
        der = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    else:
        fm1 = np.asarray(f(_shifted(y, axis, -h)), dtype=float)
        fp1 = np.asarray(f(_shifted(y, axis, h)), dtype=float)
        der = (fp1 - fm1) / (2 * h)
    if not np.all(np.isfinite(der)):
        raise EvaluationDomainError(
            f"non-finite samples while differentiating along axis {axis} at {y}"
        )
    return der


def partial_derivative(f: Callable, x, axis: int, cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """Central-difference estimate of the partial derivative of a scalar field."""
    y = np.asarray(x, dtype=float)
    if not 0 <= axis < y.size:
        raise IndexError(f"axis {axis} out of range for point of size {y.size}")
    h = cfg.step * max(1.0, abs(y[axis]))
    return float(_stencil(lambda z: f(z), y, axis, h, cfg.effective_order))


def jacobian(f: Callable[[np.ndarray], np.ndarray], y, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Derivative of an array-valued field along every coordinate.

    Returns shape ``(n,) + f(y).shape`` with the derivative axis first.
    """
    y = np.asarray(y, dtype=float)
    rows = []
    for axis in range(y.size):
        h = cfg.step * max(1.0, abs(y[axis]))
        rows.append(_stencil(f, y, axis, h, cfg.effective_order))
    return np.stack(rows, axis=0)


def directional_derivative(f: Callable[[np.ndarray], np.ndarray], y, v,
                           cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Derivative of a field along the direction ``v`` (single 1-D stencil)."""
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return np.zeros_like(np.asarray(f(y), dtype=float))
    u = v / scale
    h = cfg.step * max(1.0, float(np.max(np.abs(y))))
    g = lambda t: f(y + t[0] * u)
    der = _stencil(g, np.zeros(1), 0, h, cfg.effective_order)
    return der * scale


def exterior_derivative(form: Callable[[np.ndarray], np.ndarray], y, degree: int,
                        cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Exterior derivative of a p-form given its component evaluator.

    Components follow the matrix convention: a 2-form with component matrix
    ``b`` acts as ``b(u, v) = u^a b_{ab} v^b``.
    """
    d = jacobian(form, y, cfg)  # (n, n^degree)
    if degree == 0:
        return d
    if degree == 1:
        return d - d.T
    if degree == 2:
        return d - np.transpose(d, (1, 0, 2)) + np.transpose(d, (1, 2, 0))
    raise NotImplementedError(f"exterior derivative of degree-{degree} forms not needed")


def lie_derivative_form(vec: Callable[[np.ndarray], np.ndarray],
                        form: Callable[[np.ndarray], np.ndarray], y, degree: int,
                        cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Lie derivative of a 1- or 2-form along a vector field, both numeric."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(vec(y), dtype=float)
    dX = jacobian(vec, y, cfg)          # dX[a, b] = d_a X^b
    db = jacobian(form, y, cfg)
    b = np.asarray(form(y), dtype=float)
    if degree == 1:
        return X @ db + dX @ b
    if degree == 2:
        adv = np.einsum("c,cab->ab", X, db)
        return adv + np.einsum("ac,cb->ab", dX, b) + np.einsum("bc,ac->ab", dX, b)
    raise NotImplementedError(f"Lie derivative of degree-{degree} forms not needed")


@lru_cache(maxsize=None)
def _signed_permutations(n: int):
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    signs = np.empty(len(perms), dtype=float)
    for k, p in enumerate(perms):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        signs[k] = -1.0 if inv % 2 else 1.0
    return perms, signs


def volume_coefficient(one: np.ndarray, two: np.ndarray) -> float:
    """Coefficient of the volume form in ``one ^ two^m`` on a (2m+1)-chart.

    ``one`` is a 1-form (or 1-vector) and ``two`` an antisymmetric matrix of
    matching variance; the value is the full wedge evaluated on the chart
    basis.
    """
    one = np.asarray(one, dtype=float)
    two = np.asarray(two, dtype=float)
    n = one.size
    m = (n - 1) // 2
    if n != 2 * m + 1 or two.shape != (n, n):
        raise DimensionMismatchError(f"need odd dimension, got {one.shape} and {two.shape}")
    perms, signs = _signed_permutations(n)
    terms = signs * one[perms[:, 0]]
    for k in range(m):
        terms = terms * two[perms[:, 1 + 2 * k], perms[:, 2 + 2 * k]]
    return float(terms.sum() / 2 ** m)
