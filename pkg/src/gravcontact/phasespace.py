"""The 7-dimensional phase space and its gravitational contact/Jacobi data.

Chart ordering is ``(x^0, x^1, x^2, x^3, v^1, v^2, v^3)`` everywhere: slots
0..3 are spacetime coordinates, slots 4..6 the fibre (coordinate-velocity)
coordinates.  A phase point is admissible when its lifted direction
``u = (1, v)`` is strictly timelike.

Sign conventions, fixed once and verified by the test suite:

* the time covector ``tau`` is normalized so ``tau(dhat) = 1`` (positive
  time component on all catalog charts);
* the stored two-form satisfies ``omega = -d tau``, so ``(-tau, omega)`` is
  the contact pair and ``(-gamma, poisson)`` its dual Jacobi pair;
* the phase connection carries the sign that makes the flow of ``gamma``
  follow geodesics (equivalently, that makes ``omega = -d tau`` hold);
* musical maps contract the FIRST slot: ``sharp(a)^b = a_c L^{cb}``,
  ``flat(X)_b = X^c O_{cb}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import TimelikeViolationError
from .geometry import DEFAULT_DIFF, DiffConfig
from .multivector import SkewMultivectorField, schouten_skew, wedge_1_2
from .spacetime import ScaleConstants, SpacetimeMetric, christoffel


@dataclass(frozen=True)
class PhasePoint:
    """Point of the phase space: 4 chart coordinates and 3 fibre velocities."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(4))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))

    def coords(self) -> np.ndarray:
        return np.concatenate([self.x, self.v])


def pack(p: PhasePoint) -> np.ndarray:
    return p.coords()


def unpack(y) -> PhasePoint:
    y = np.asarray(y, dtype=float)
    return PhasePoint(y[:4], y[4:])


@dataclass(frozen=True)
class PhaseFrame:
    """Pointwise contractions of the metric with the lifted direction.

    ``u`` is the unnormalized velocity lift ``(1, v)``; ``lorentz`` the
    factor making it unit-timelike; ``vert`` the fibre projector with rows
    ``d^i - v^i d^0``.  ``G_dn``/``G_up`` are the mass-rescaled covariant /
    contravariant metric blocks entering the phase 2-form and 2-vector (the
    covariant block includes the quadratic correction along ``u``).
    """

    x: np.ndarray
    v: np.ndarray
    scales: ScaleConstants
    g: np.ndarray          # (4, 4) metric at x
    ginv: np.ndarray       # (4, 4) inverse metric
    u: np.ndarray          # (4,) lifted direction (1, v)
    u_cov: np.ndarray      # (4,) g_{mu lam} u^mu
    u_norm2: float         # g(u, u) < 0
    lorentz: float         # 1 / sqrt(-g(u, u))
    vert: np.ndarray       # (3, 4) fibre projector
    U_cov: np.ndarray      # (4,) scaled u_cov
    U_norm2: float         # scaled u_norm2
    G_dn: np.ndarray       # (3, 4) scaled covariant block with correction term
    G_up: np.ndarray       # (3, 4) scaled contravariant block, fibre-projected

    def point(self) -> PhasePoint:
        return PhasePoint(self.x, self.v)


def phase_frame(metric: SpacetimeMetric, scales: ScaleConstants, p: PhasePoint,
                check: bool = True) -> PhaseFrame:
    """Evaluate all frame contractions; rejects non-timelike lifts."""
    if check:
        metric.require_domain(p.x)
    g = metric.g(p.x)
    u = np.concatenate([[1.0], p.v])
    u_cov = g @ u
    u_norm2 = float(u @ u_cov)
    if u_norm2 >= 0.0:
        raise TimelikeViolationError(
            f"lifted direction not timelike: g(u,u) = {u_norm2:.6g} at x={p.x}, v={p.v}",
            u_norm2,
        )
    lorentz = 1.0 / np.sqrt(-u_norm2)
    ginv = np.linalg.inv(g)
    vert = np.zeros((3, 4))
    vert[:, 1:] = np.eye(3)
    vert[:, 0] = -p.v
    k = scales.metric_scale
    G_up = (vert @ ginv) / k    # contravariant block scales inversely
    G_dn = k * (g[1:, :] + lorentz ** 2 * np.outer(u_cov[1:], u_cov))
    return PhaseFrame(
        x=p.x.copy(), v=p.v.copy(), scales=scales, g=g, ginv=ginv,
        u=u, u_cov=u_cov, u_norm2=u_norm2, lorentz=lorentz, vert=vert,
        U_cov=k * u_cov, U_norm2=k * u_norm2, G_dn=G_dn, G_up=G_up,
    )


def contact_map(frame: PhaseFrame) -> tuple[np.ndarray, np.ndarray]:
    """Scaled velocity ``d`` with g(d, d) = -c^2, and its dimension-free twin."""
    s = frame.scales
    d = s.c0 * frame.lorentz * frame.u
    dhat = (s.hbar0 / (s.m * s.c0)) * frame.lorentz * frame.u
    return d, dhat


def time_form(frame: PhaseFrame) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal time covector ``tau`` (tau(d) = 1) and unscaled ``tau_hat``."""
    s = frame.scales
    tau = -(frame.lorentz / s.c0) * frame.u_cov
    tau_hat = (s.m * s.c0 ** 2 / s.hbar0) * tau
    return tau, tau_hat


def nu_tau(frame: PhaseFrame) -> tuple[np.ndarray, np.ndarray]:
    """Mutually inverse fibre isomorphisms.

    Forward: (3, 4) matrix taking a spacetime covector index to the fibre;
    inverse: (4, 3) matrix whose columns span ker(tau).
    """
    s = frame.scales
    ca = s.c0 * frame.lorentz
    fwd = frame.vert / ca
    tau, _ = time_form(frame)
    inv = np.zeros((4, 3))
    for i in range(3):
        inv[:, i] = ca * (np.eye(4)[:, i + 1] - ca * tau[i + 1] * frame.u)
    return fwd, inv


def complementary_projector(frame: PhaseFrame) -> np.ndarray:
    """Projector ``id - d (x) tau`` onto ker(tau) along the velocity."""
    d, _ = contact_map(frame)
    tau, _ = time_form(frame)
    return np.eye(4) - np.outer(d, tau)


def phase_connection(metric: SpacetimeMetric, frame: PhaseFrame,
                     check: bool = True) -> np.ndarray:
    """Phase connection (3, 4) induced by the Levi-Civita connection.

    The overall sign is the one that makes the stored two-form exact
    (``omega = -d tau``) and the dynamical flow geodesic.
    """
    gam = christoffel(metric, np.asarray(frame.x), check)
    return -np.einsum("ir,rls,s->il", frame.vert, gam, frame.u)


def dynamical_connection(frame: PhaseFrame, conn: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Second-order flow field as a 7-vector: scaled ``gamma`` and unscaled twin."""
    s = frame.scales
    fib = conn @ frame.u
    gamma = s.c0 * frame.lorentz * np.concatenate([frame.u, fib])
    gamma_hat = (s.hbar0 / (s.m * s.c0 ** 2)) * gamma
    return gamma, gamma_hat


def phase_two_form(frame: PhaseFrame, conn: np.ndarray) -> np.ndarray:
    """Antisymmetric (7, 7) component matrix of the phase 2-form."""
    s = frame.scales
    contact = np.zeros((3, 7))           # rows: d^i_0 - conn^i_lam d^lam
    contact[:, 4:] = np.eye(3)
    contact[:, :4] = -conn
    horiz = np.zeros((3, 7))             # rows: G_dn[i, mu] d^mu
    horiz[:, :4] = frame.G_dn
    omega = s.c0 * frame.lorentz * (contact.T @ horiz - horiz.T @ contact)
    return omega


def phase_two_vector(frame: PhaseFrame, conn: np.ndarray) -> np.ndarray:
    """Antisymmetric (7, 7) component matrix of the phase 2-vector."""
    s = frame.scales
    hvec = np.zeros((4, 7))              # rows: del_lam + conn^i_lam del^0_i
    hvec[:, :4] = np.eye(4)
    hvec[:, 4:] = conn.T
    proj = frame.G_up @ hvec             # (3, 7)
    wvec = np.zeros((3, 7))              # rows: del^0_j
    wvec[:, 4:] = np.eye(3)
    lam = (proj.T @ wvec - wvec.T @ proj) / (s.c0 * frame.lorentz)
    return lam


@dataclass(frozen=True)
class StructureEvaluation:
    """Pointwise structure data: time covector, two-form, flow, bivector.

    ``tau`` and ``gamma`` are the unscaled (dimension-free) versions: they
    satisfy ``tau(gamma) = 1``.  All arrays live on the 7-slot chart.
    """

    frame: PhaseFrame
    tau: np.ndarray      # (7,) covector, fibre slots zero
    omega: np.ndarray    # (7, 7) antisymmetric
    gamma: np.ndarray    # (7,) flow direction
    poisson: np.ndarray  # (7, 7) antisymmetric bivector


@dataclass(frozen=True)
class FrameGradients:
    """Analytic 7-chart gradients of the frame scalars and covectors.

    Derivative index first; spacetime rows use the metric's analytic
    derivative evaluator, fibre rows are algebraic.
    """

    d_lorentz: np.ndarray   # (7,)
    d_u: np.ndarray         # (7, 4)
    d_u_cov: np.ndarray     # (7, 4)
    d_u_norm2: np.ndarray   # (7,)
    d_tau: np.ndarray       # (7, 4) gradient of the unscaled time covector
    d_dhat: np.ndarray      # (7, 4) gradient of the unscaled velocity


def frame_gradients(metric: SpacetimeMetric, frame: PhaseFrame) -> FrameGradients:
    s = frame.scales
    dg = metric.dg(np.asarray(frame.x))
    u = frame.u
    d_u = np.zeros((7, 4))
    d_u[4:, 1:] = np.eye(3)
    d_u_cov = np.zeros((7, 4))
    d_u_cov[:4] = np.einsum("rlm,l->rm", dg, u)
    d_u_cov[4:] = frame.g[1:, :]
    d_u_norm2 = np.zeros(7)
    d_u_norm2[:4] = np.einsum("rlm,l,m->r", dg, u, u)
    d_u_norm2[4:] = 2.0 * frame.u_cov[1:]
    d_lorentz = 0.5 * frame.lorentz ** 3 * d_u_norm2
    kt = s.m * s.c0 / s.hbar0
    d_tau = -kt * (np.outer(d_lorentz, frame.u_cov) + frame.lorentz * d_u_cov)
    kd = s.hbar0 / (s.m * s.c0)
    d_dhat = kd * (np.outer(d_lorentz, u) + frame.lorentz * d_u)
    return FrameGradients(d_lorentz, d_u, d_u_cov, d_u_norm2, d_tau, d_dhat)


class PhaseStructures:
    """Evaluator of the phase structures for one metric/scales choice.

    ``extra_connection`` lets the electromagnetic layer add its term to the
    gravitational phase connection; everything downstream (two-form,
    bivector, flow) is then built from the joined connection.
    """

    def __init__(self, metric: SpacetimeMetric, scales: ScaleConstants = ScaleConstants(),
                 extra_connection: Callable[[PhaseFrame], np.ndarray] | None = None,
                 diff: DiffConfig = DEFAULT_DIFF, strict: bool = True):
        self.metric = metric
        self.scales = scales
        self.extra_connection = extra_connection
        self.diff = diff
        self.strict = strict

    def frame(self, p: PhasePoint) -> PhaseFrame:
        return phase_frame(self.metric, self.scales, p, check=self.strict)

    def connection(self, frame: PhaseFrame) -> np.ndarray:
        conn = phase_connection(self.metric, frame, check=self.strict)
        if self.extra_connection is not None:
            conn = conn + self.extra_connection(frame)
        return conn

    def eval(self, p: PhasePoint) -> StructureEvaluation:
        frame = self.frame(p)
        conn = self.connection(frame)
        _, tau_hat = time_form(frame)
        tau7 = np.concatenate([tau_hat, np.zeros(3)])
        _, gamma_hat = dynamical_connection(frame, conn)
        return StructureEvaluation(
            frame=frame,
            tau=tau7,
            omega=phase_two_form(frame, conn),
            gamma=gamma_hat,
            poisson=phase_two_vector(frame, conn),
        )

    def gamma(self, p: PhasePoint) -> np.ndarray:
        frame = self.frame(p)
        _, gamma_hat = dynamical_connection(frame, self.connection(frame))
        return gamma_hat

    def tau(self, p: PhasePoint) -> np.ndarray:
        _, tau_hat = time_form(self.frame(p))
        return np.concatenate([tau_hat, np.zeros(3)])

    def gradients(self, p: PhasePoint) -> FrameGradients:
        return frame_gradients(self.metric, self.frame(p))

    # 7-coordinate adapters for the finite-difference machinery
    def tau_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        return lambda y: self.tau(unpack(y))

    def gamma_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        return lambda y: self.gamma(unpack(y))

    def omega_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        return lambda y: self.eval(unpack(y)).omega

    def poisson_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        return lambda y: self.eval(unpack(y)).poisson

    def gamma_field(self) -> SkewMultivectorField:
        return SkewMultivectorField(1, 7, self.gamma_fn())

    def poisson_field(self) -> SkewMultivectorField:
        return SkewMultivectorField(2, 7, self.poisson_fn())


def sharp(ev: StructureEvaluation, alpha: np.ndarray) -> np.ndarray:
    """Raise a 7-covector through the bivector (first-slot contraction)."""
    return alpha @ ev.poisson


def flat(ev: StructureEvaluation, vec: np.ndarray) -> np.ndarray:
    """Lower a 7-vector through the two-form (first-slot contraction)."""
    return vec @ ev.omega


def poisson_bracket_value(ev: StructureEvaluation, df: np.ndarray, dg: np.ndarray) -> float:
    """Poisson bracket of two phase functions from their gradients."""
    return float(df @ ev.poisson @ dg)


def duality_residuals(ev: StructureEvaluation) -> dict[str, float]:
    """Pointwise residuals of all duality identities of the structure pair.

    With ``w = -tau`` and ``E = -gamma`` these are the defining relations of
    the dual pair: normalization, mutual annihilation, and the partial
    inversion of the musical maps.
    """
    tau, om, ga, lam = ev.tau, ev.omega, ev.gamma, ev.poisson
    lo = lam @ om
    return {
        "reeb-normalization": abs(float(tau @ ga) - 1.0),
        "flow-annihilates-two-form": float(np.max(np.abs(ga @ om))),
        "bivector-annihilates-time": float(np.max(np.abs(tau @ lam))),
        "sharp-flat-inversion": float(np.max(np.abs(lo @ lam - lam))),
        "flat-sharp-inversion": float(np.max(np.abs(om @ lam @ om - om))),
        "split-projector": float(np.max(np.abs(lo - (np.eye(7) - np.outer(ga, tau))))),
    }


def verify_jacobi_pair(metric: SpacetimeMetric, scales: ScaleConstants, p: PhasePoint,
                       cfg: DiffConfig = DEFAULT_DIFF) -> dict[str, float]:
    """Residuals of the Jacobi-pair bracket identities at a point.

    The pair ``(-gamma, poisson)`` is Jacobi iff ``[gamma, poisson] = 0``
    and ``[poisson, poisson] = 2 gamma ^ poisson``.
    """
    structures = PhaseStructures(metric, scales, diff=cfg)
    ev = structures.eval(p)
    gf, lf = structures.gamma_field(), structures.poisson_field()
    y = pack(p)
    b1 = schouten_skew(gf, lf, y, cfg)
    b2 = schouten_skew(lf, lf, y, cfg)
    return {
        "flow-bivector-bracket": float(np.max(np.abs(b1))),
        "bivector-self-bracket": float(np.max(np.abs(b2 - 2.0 * wedge_1_2(ev.gamma, ev.poisson)))),
    }
