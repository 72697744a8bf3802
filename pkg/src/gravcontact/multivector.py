"""Schouten brackets, momentum polynomials and Killing residuals.

Symmetric multivector fields live on the 4-dimensional spacetime chart;
skew fields are chart-generic (the phase-space layer instantiates them on
the 7-dimensional chart).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, UnsupportedDegreeError
from .geometry import DEFAULT_DIFF, DiffConfig, jacobian, symmetrize
from .spacetime import ScaleConstants, SpacetimeMetric, christoffel


@dataclass(frozen=True)
class SymmetricMultivectorField:
    """Totally symmetric contravariant field on the spacetime chart.

    ``components(x)`` returns a ``(4,) * degree`` array; ``dcomponents(x)``
    its spacetime gradient with the derivative index first.  When no
    analytic gradient is supplied, central differences are used.
    """

    degree: int
    components: Callable[[np.ndarray], np.ndarray]
    dcomponents: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""
    description: str = ""

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.components(np.asarray(x, dtype=float)), dtype=float)

    def d(self, x, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dcomponents is not None:
            return np.asarray(self.dcomponents(x), dtype=float)
        return jacobian(self.components, x, cfg)


@dataclass(frozen=True)
class SkewMultivectorField:
    """Totally antisymmetric contravariant field on an n-dimensional chart."""

    degree: int
    dim: int
    components: Callable[[np.ndarray], np.ndarray]

    def __call__(self, y) -> np.ndarray:
        return np.asarray(self.components(np.asarray(y, dtype=float)), dtype=float)


def schouten_sym(K: SymmetricMultivectorField, L: SymmetricMultivectorField, x,
                 cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Schouten bracket of symmetric k- and l-vector fields at a point.

    Returns the symmetric ``(k + l - 1)``-vector components; antisymmetric
    under swapping the arguments.  Degree-0 arguments are rejected: the
    bracket is only defined here for k, l >= 1.
    """
    k, l = K.degree, L.degree
    if k < 1 or l < 1:
        raise UnsupportedDegreeError(f"schouten_sym needs degrees >= 1, got ({k}, {l})")
    x = np.asarray(x, dtype=float)
    kk, ll = K(x), L(x)
    dk, dl = K.d(x, cfg), L.d(x, cfg)
    # contract the leading slot of one field with the derivative index of the other
    term1 = np.tensordot(kk, dl, axes=([0], [0]))   # (4,)*(k-1+l)
    term2 = np.tensordot(ll, dk, axes=([0], [0]))   # (4,)*(l-1+k)
    return symmetrize(k * term1 - l * term2)


def schouten_skew(P: SkewMultivectorField, Q: SkewMultivectorField, y,
                  cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Schouten bracket of skew multivector fields for degrees (1,1), (1,2), (2,2).

    Normalized against the defining contraction identity on closed forms;
    the (1,1) case is the Lie bracket and (1,2) the Lie derivative of the
    bivector.
    """
    p, q = P.degree, Q.degree
    if (p, q) == (2, 1):
        return -schouten_skew(Q, P, y, cfg)
    y = np.asarray(y, dtype=float)
    a, b = P(y), Q(y)
    da, db = jacobian(P.components, y, cfg), jacobian(Q.components, y, cfg)
    if (p, q) == (1, 1):
        return np.einsum("b,ba->a", a, db) - np.einsum("b,ba->a", b, da)
    if (p, q) == (1, 2):
        return (np.einsum("c,cab->ab", a, db)
                - np.einsum("cb,ca->ab", b, da)
                - np.einsum("ac,cb->ab", b, da))
    if (p, q) == (2, 2):
        m = np.einsum("ad,dbc->abc", a, db) + np.einsum("ad,dbc->abc", b, da)
        return -(m + np.einsum("bca->abc", m) + np.einsum("cab->abc", m))
    raise UnsupportedDegreeError(f"schouten_skew supports (1,1), (1,2), (2,2); got ({p}, {q})")


def wedge_1_2(v: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Wedge of a vector with an antisymmetric bivector, as a 3-slot array."""
    t = np.einsum("a,bc->abc", v, b)
    return t + np.einsum("bca->abc", t) + np.einsum("cab->abc", t)


def pi_star(K: SymmetricMultivectorField, x, p) -> float:
    """Fibrewise-polynomial momentum function K^{a...c} p_a ... p_c."""
    p = np.asarray(p, dtype=float)
    val = K(x)
    for _ in range(K.degree):
        val = np.tensordot(val, p, axes=([0], [0]))
    return float(val)


def nabla_sym(K: SymmetricMultivectorField, metric: SpacetimeMetric, x,
              cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Symmetrized contravariant covariant derivative of K.

    The max-norm of this ``(degree + 1)``-slot array is the Killing
    residual: it vanishes exactly when the momentum polynomial of K is
    constant along geodesics.
    """
    x = np.asarray(x, dtype=float)
    k = K.degree
    if k < 1:
        raise UnsupportedDegreeError("killing residual needs degree >= 1")
    gam = christoffel(metric, x)
    ginv = metric.inverse(x)
    cov = K.d(x, cfg)  # (4,)+(4,)*k, derivative first
    kk = K(x)
    for slot in range(k):
        # add Gamma^{a_slot}_{rho s} K^{..s..} into the derivative slot rho
        corr = np.tensordot(gam, kk, axes=([2], [slot]))  # (nu, rho, rest)
        corr = np.moveaxis(corr, 0, slot + 1)             # back into slot position
        cov = cov + corr
    raised = np.tensordot(ginv, cov, axes=([1], [0]))
    return symmetrize(raised)


def killing_residual(K: SymmetricMultivectorField, metric: SpacetimeMetric, x,
                     cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """Max-norm Killing residual of K at a point."""
    return float(np.max(np.abs(nabla_sym(K, metric, x, cfg))))


def killing_residual_via_bracket(K: SymmetricMultivectorField, metric: SpacetimeMetric, x,
                                 cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Alternative Killing residual through the bracket with the contravariant metric.

    Algebraically equal to :func:`nabla_sym`; kept as an independent code
    path for cross-checking the bracket implementation.
    """
    return schouten_sym(K, gbar_field(metric), x, cfg) / (-2.0)


def is_killing(K: SymmetricMultivectorField, metric: SpacetimeMetric, points,
               tol: float = 1e-7, cfg: DiffConfig = DEFAULT_DIFF) -> bool:
    """Computed (not declared) Killing status over a sample of points."""
    return all(killing_residual(K, metric, x, cfg) <= tol for x in points)


# ---------------------------------------------------------------------------
# canonical fields


def gbar_field(metric: SpacetimeMetric) -> SymmetricMultivectorField:
    """The contravariant metric as a canonical Killing 2-vector field."""

    def comps(x):
        return metric.inverse(x)

    def dcomps(x):
        ginv = metric.inverse(x)
        dg = metric.dg(x)
        return -np.einsum("ab,rbc,cd->rad", ginv, dg, ginv)

    return SymmetricMultivectorField(2, comps, dcomps, name="gbar",
                                     description="contravariant metric")


def unscaled_metric_field(metric: SpacetimeMetric,
                          scales: ScaleConstants) -> SymmetricMultivectorField:
    """Dimension-free contravariant metric, (hbar/(m c))^2 gbar."""
    base = gbar_field(metric)
    u = scales.unscaled_factor
    return SymmetricMultivectorField(
        2,
        lambda x: base.components(x) / u,
        lambda x: base.dcomponents(x) / u,
        name="ghat",
        description="dimension-free contravariant metric",
    )


def linear_vector_field(lin: np.ndarray, const: np.ndarray, name: str = "",
                        description: str = "") -> SymmetricMultivectorField:
    """Vector field X^a = lin[a, b] x^b + const[a] with exact gradient."""
    lin = np.asarray(lin, dtype=float)
    const = np.asarray(const, dtype=float)
    return SymmetricMultivectorField(
        1,
        lambda x: lin @ x + const,
        lambda x: lin.T.copy(),
        name=name,
        description=description,
    )


def polynomial_field(const: np.ndarray, lin: np.ndarray, name: str = "") -> SymmetricMultivectorField:
    """Symmetric field with affine components K(x) = const + lin . x.

    ``lin`` has one trailing slot contracted with x; both coefficient
    blocks are symmetrized over the field slots.
    """
    const = np.asarray(const, dtype=float)
    degree = const.ndim
    lin = np.asarray(lin, dtype=float)
    const = symmetrize(const)
    lin = np.moveaxis(symmetrize(np.moveaxis(lin, -1, 0)), 0, -1) if degree > 1 else lin
    return SymmetricMultivectorField(
        degree,
        lambda x: const + lin @ x,
        lambda x: np.moveaxis(lin, -1, 0).copy(),
        name=name,
    )


def random_polynomial_field(degree: int, rng: np.random.Generator,
                            scale: float = 0.5) -> SymmetricMultivectorField:
    """Random symmetric field with affine components; generically non-Killing."""
    const = rng.uniform(-scale, scale, size=(4,) * degree)
    lin = rng.uniform(-scale, scale, size=(4,) * degree + (4,))
    return polynomial_field(const, lin, name="random")


# ---------------------------------------------------------------------------
# Killing catalogs


def _sphere_rotations() -> dict[str, SymmetricMultivectorField]:
    """Rotation generators on the (theta, phi) sphere slots of a spherical chart."""

    def rot_x():
        def comps(x):
            th, ph = x[2], x[3]
            return np.array([0.0, 0.0, -math.sin(ph), -math.cos(ph) / math.tan(th)])

        def dcomps(x):
            th, ph = x[2], x[3]
            out = np.zeros((4, 4))
            out[2, 3] = math.cos(ph) / math.sin(th) ** 2
            out[3, 2] = -math.cos(ph)
            out[3, 3] = math.sin(ph) / math.tan(th)
            return out

        return SymmetricMultivectorField(1, comps, dcomps, name="rot-x",
                                         description="rotation generator about x")

    def rot_y():
        def comps(x):
            th, ph = x[2], x[3]
            return np.array([0.0, 0.0, math.cos(ph), -math.sin(ph) / math.tan(th)])

        def dcomps(x):
            th, ph = x[2], x[3]
            out = np.zeros((4, 4))
            out[2, 3] = math.sin(ph) / math.sin(th) ** 2
            out[3, 2] = -math.sin(ph)
            out[3, 3] = -math.cos(ph) / math.tan(th)
            return out

        return SymmetricMultivectorField(1, comps, dcomps, name="rot-y",
                                         description="rotation generator about y")

    return {"rot-x": rot_x(), "rot-y": rot_y()}


def _carter_tensor(metric: SpacetimeMetric) -> SymmetricMultivectorField:
    """Irreducible Killing 2-tensor of the rotating black-hole chart.

    Built from the principal null directions: K = Sigma (l n + n l) + r^2 gbar.
    """
    M = metric.params["M"]
    a = metric.params["a"]
    gbar = gbar_field(metric)

    def pieces(x):
        r, th = x[1], x[2]
        s, c = math.sin(th), math.cos(th)
        sigma = r * r + a * a * c * c
        delta = r * r - 2.0 * M * r + a * a
        l = np.array([(r * r + a * a) / delta, 1.0, 0.0, a / delta])
        n = np.array([(r * r + a * a) / (2 * sigma), -delta / (2 * sigma), 0.0,
                      a / (2 * sigma)])
        return r, s, c, sigma, delta, l, n

    def comps(x):
        r, s, c, sigma, delta, l, n = pieces(x)
        return sigma * (np.outer(l, n) + np.outer(n, l)) + r * r * gbar.components(x)

    def dcomps(x):
        r, s, c, sigma, delta, l, n = pieces(x)
        sig_r, sig_th = 2.0 * r, -2.0 * a * a * s * c
        del_r = 2.0 * r - 2.0 * M
        dl = np.zeros((4, 4))
        dl[1] = [2 * r / delta - (r * r + a * a) * del_r / delta ** 2, 0.0, 0.0,
                 -a * del_r / delta ** 2]
        dn = np.zeros((4, 4))
        dn[1] = [(2 * r * sigma - (r * r + a * a) * sig_r) / (2 * sigma ** 2),
                 (-del_r * sigma + delta * sig_r) / (2 * sigma ** 2), 0.0,
                 -a * sig_r / (2 * sigma ** 2)]
        dn[2] = [-(r * r + a * a) * sig_th / (2 * sigma ** 2),
                 delta * sig_th / (2 * sigma ** 2), 0.0,
                 -a * sig_th / (2 * sigma ** 2)]
        dsig = np.array([0.0, sig_r, sig_th, 0.0])
        dr2 = np.array([0.0, 2.0 * r, 0.0, 0.0])
        sym_ln = np.outer(l, n) + np.outer(n, l)
        out = np.einsum("p,ab->pab", dsig, sym_ln)
        out += sigma * (np.einsum("pa,b->pab", dl, n) + np.einsum("a,pb->pab", l, dn)
                        + np.einsum("pa,b->pab", dn, l) + np.einsum("a,pb->pab", n, dl))
        out += np.einsum("p,ab->pab", dr2, gbar.components(x))
        out += r * r * gbar.dcomponents(x)
        return out

    return SymmetricMultivectorField(2, comps, dcomps, name="carter",
                                     description="irreducible Killing 2-tensor")


def killing_catalog(metric: SpacetimeMetric,
                    scales: ScaleConstants = ScaleConstants()) -> dict[str, SymmetricMultivectorField]:
    """Named Killing multivector fields shipped for the given metric.

    Killing status is still a computed property; the verification suites
    re-check every entry rather than trusting the catalog label.
    """
    fields: dict[str, SymmetricMultivectorField] = {}
    eye = np.eye(4)
    if metric.name == "minkowski":
        for idx, nm in enumerate(("dt", "dx", "dy", "dz")):
            fields[nm] = linear_vector_field(np.zeros((4, 4)), eye[idx], name=nm,
                                             description=f"translation along axis {idx}")
        for (i, j), nm in (((1, 2), "rot-xy"), ((2, 3), "rot-yz"), ((3, 1), "rot-zx")):
            lin = np.zeros((4, 4))
            lin[j, i] = 1.0
            lin[i, j] = -1.0
            fields[nm] = linear_vector_field(lin, np.zeros(4), name=nm,
                                             description=f"rotation in the ({i},{j}) plane")
        for i, nm in ((1, "boost-x"), (2, "boost-y"), (3, "boost-z")):
            lin = np.zeros((4, 4))
            lin[0, i] = 1.0
            lin[i, 0] = 1.0
            fields[nm] = linear_vector_field(lin, np.zeros(4), name=nm,
                                             description=f"boost along axis {i}")
    elif metric.name == "schwarzschild":
        fields["dt"] = linear_vector_field(np.zeros((4, 4)), eye[0], name="dt",
                                           description="static time translation")
        fields["dphi"] = linear_vector_field(np.zeros((4, 4)), eye[3], name="dphi",
                                             description="axial rotation")
        fields.update(_sphere_rotations())
    elif metric.name == "kerr":
        fields["dt"] = linear_vector_field(np.zeros((4, 4)), eye[0], name="dt",
                                           description="stationary time translation")
        fields["dphi"] = linear_vector_field(np.zeros((4, 4)), eye[3], name="dphi",
                                             description="axial rotation")
        fields["carter"] = _carter_tensor(metric)
    else:
        raise ParameterError(f"no Killing catalog for metric {metric.name!r}")
    fields["ghat"] = unscaled_metric_field(metric, scales)
    return fields
