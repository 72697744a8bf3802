"""Hamilton-Jacobi lifts, hidden symmetries and their bracket algebra.

A phase function ``f`` with ``gamma . f = 0`` generates the infinitesimal
symmetry ``X = sharp(df) + f gamma`` of the contact structure.  Symmetric
multivector fields K induce phase functions ``K(tau, ..., tau)``; the lift
of such a function is the hidden symmetry attached to K, projecting onto
the generalized vector field built from tau-contractions of K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import DEFAULT_DIFF, DiffConfig, jacobian, lie_derivative_form
from .multivector import SymmetricMultivectorField, killing_residual, schouten_sym
from .phasespace import (PhasePoint, PhaseStructures, StructureEvaluation, contact_map,
                         frame_gradients, pack, poisson_bracket_value, time_form, unpack)


@dataclass(frozen=True)
class PhaseFunction:
    """Real function on the phase space with a 7-component gradient."""

    eval_fn: Callable[[PhasePoint], float]
    grad_fn: Callable[[PhasePoint], np.ndarray] | None = None
    name: str = ""

    def __call__(self, p: PhasePoint) -> float:
        return float(self.eval_fn(p))

    def gradient(self, p: PhasePoint, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
        if self.grad_fn is not None:
            return np.asarray(self.grad_fn(p), dtype=float)
        return jacobian(lambda y: self.eval_fn(unpack(y)), pack(p), cfg)


@dataclass(frozen=True)
class GeneralizedVectorField:
    """Spacetime-valued field over the phase space (4 components)."""

    eval_fn: Callable[[PhasePoint], np.ndarray]
    jacobian_fn: Callable[[PhasePoint], np.ndarray] | None = None
    name: str = ""

    def __call__(self, p: PhasePoint) -> np.ndarray:
        return np.asarray(self.eval_fn(p), dtype=float)

    def jacobian(self, p: PhasePoint, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
        """Gradient of the components, shape (7, 4), derivative index first."""
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(p), dtype=float)
        return jacobian(lambda y: self.eval_fn(unpack(y)), pack(p), cfg)


@dataclass(frozen=True)
class PhaseVectorField:
    """Vector field on the 7-dimensional phase space."""

    eval_fn: Callable[[PhasePoint], np.ndarray]
    name: str = ""

    def __call__(self, p: PhasePoint) -> np.ndarray:
        return np.asarray(self.eval_fn(p), dtype=float)

    def projection(self) -> GeneralizedVectorField:
        """Push forward to the spacetime factor (drop fibre components)."""
        return GeneralizedVectorField(lambda p: self.eval_fn(p)[:4],
                                      name=f"proj({self.name})" if self.name else "")

    def as_fn7(self) -> Callable[[np.ndarray], np.ndarray]:
        return lambda y: np.asarray(self.eval_fn(unpack(y)), dtype=float)


def _contract_last(arr: np.ndarray, cov: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        arr = np.tensordot(arr, cov, axes=([arr.ndim - 1], [0]))
    return arr


def tau_of(Xbar: GeneralizedVectorField, structures: PhaseStructures) -> PhaseFunction:
    """Phase function tau(Xbar), with gradient from the frame derivatives."""

    def value(p):
        _, tau_hat = time_form(structures.frame(p))
        return float(tau_hat @ Xbar(p))

    def grad(p):
        frame = structures.frame(p)
        grads = frame_gradients(structures.metric, frame)
        _, tau_hat = time_form(frame)
        return grads.d_tau @ Xbar(p) + Xbar.jacobian(p, structures.diff) @ tau_hat

    return PhaseFunction(value, grad, name=f"tau({Xbar.name})" if Xbar.name else "")


def phase_function_from_multivector(K: SymmetricMultivectorField,
                                    structures: PhaseStructures) -> PhaseFunction:
    """Phase function K(tau, ..., tau) with an analytic gradient."""
    k = K.degree

    def value(p):
        _, tau_hat = time_form(structures.frame(p))
        return float(_contract_last(K(p.x), tau_hat, k))

    def grad(p):
        frame = structures.frame(p)
        grads = frame_gradients(structures.metric, frame)
        _, tau_hat = time_form(frame)
        kk = K(p.x)
        dk7 = np.zeros((7,) + (4,) * k)
        dk7[:4] = K.d(p.x, structures.diff)
        out = np.empty(7)
        for a in range(7):
            out[a] = _contract_last(dk7[a], tau_hat, k)
            if k >= 1:
                partial = np.tensordot(kk, grads.d_tau[a], axes=([0], [0]))
                out[a] += k * _contract_last(partial, tau_hat, k - 1)
        return out

    return PhaseFunction(value, grad, name=f"{K.name}(tau)" if K.name else "")


def phase_function_coordinate_value(K: SymmetricMultivectorField, frame) -> float:
    """Coordinate form of K(tau, ..., tau): (-c0 lorentz)^k times the scaled-metric chain."""
    k = K.degree
    pref = (-frame.scales.c0 * frame.lorentz) ** k
    return float(pref * _contract_last(K(frame.x), frame.U_cov, k))


def hamilton_jacobi_lift(f: PhaseFunction, structures: PhaseStructures) -> PhaseVectorField:
    """Infinitesimal symmetry ``sharp(df) + f gamma`` generated by f."""

    def field(p):
        ev = structures.eval(p)
        df = f.gradient(p, structures.diff)
        return df @ ev.poisson + f(p) * ev.gamma

    return PhaseVectorField(field, name=f"lift({f.name})" if f.name else "")


def hj_lift_expanded(Xbar: GeneralizedVectorField,
                     structures: PhaseStructures) -> PhaseVectorField:
    """Closed-form expansion of the lift of tau(Xbar) in frame contractions.

    Kept as an independent route for cross-checking
    :func:`hamilton_jacobi_lift`; both must agree at every point.
    """

    def field(p):
        frame = structures.frame(p)
        grads = frame_gradients(structures.metric, frame)
        k = frame.scales.metric_scale
        xb = Xbar(p)
        jac = Xbar.jacobian(p, structures.diff)
        jac_sp, jac_fib = jac[:4], jac[4:]
        dU = k * grads.d_u_cov[:4]          # (sigma, rho) spacetime gradient of U_cov
        out = np.zeros(7)
        out[:4] = xb + np.einsum("r,jl,jr->l", frame.U_cov, frame.G_up, jac_fib)
        curl = dU - dU.T
        bracket = (dU.T @ xb + jac_sp @ frame.U_cov
                   + np.einsum("s,jw,js,wr->r", frame.U_cov, frame.G_up, jac_fib, curl))
        out[4:] = -frame.G_up @ bracket
        return out

    return PhaseVectorField(field, name=f"lift(tau({Xbar.name}))" if Xbar.name else "")


def projectability_residual(Xbar: GeneralizedVectorField, structures: PhaseStructures,
                            p: PhasePoint) -> np.ndarray:
    """Fibre-derivative obstruction (3,) to the lift projecting onto Xbar."""
    frame = structures.frame(p)
    jac_fib = Xbar.jacobian(p, structures.diff)[4:]
    return jac_fib @ frame.U_cov


def conservation_residual(Xbar: GeneralizedVectorField, structures: PhaseStructures,
                          p: PhasePoint, proj_tol: float = 1e-9) -> float:
    """Signed residual whose vanishing makes tau(Xbar) constant along the flow.

    When Xbar satisfies the projectability condition this is the fast
    two-term expression; otherwise the fibre correction term is included.
    The flow derivative satisfies gamma . tau(Xbar) = -lorentz^2 * residual.
    """
    frame = structures.frame(p)
    grads = frame_gradients(structures.metric, frame)
    xb = Xbar(p)
    jac = Xbar.jacobian(p, structures.diff)
    term1 = float(frame.u_cov @ (frame.u @ jac[:4]) + 0.5 * xb @ grads.d_u_norm2[:4])
    proj = jac[4:] @ frame.U_cov
    if np.max(np.abs(proj)) <= proj_tol:
        return term1
    gup = frame.G_up * frame.scales.metric_scale   # back to the bare metric block
    inner = frame.u @ grads.d_u_cov[:4] - 0.5 * grads.d_u_norm2[:4]
    term2 = float(np.einsum("w,jr,jw,r->", frame.u_cov, gup, jac[4:], inner))
    return term1 - term2


def reeb_derivative(f: PhaseFunction, structures: PhaseStructures, p: PhasePoint) -> float:
    """Derivative of f along the flow direction gamma."""
    return float(structures.gamma(p) @ f.gradient(p, structures.diff))


@dataclass(frozen=True)
class HiddenSymmetry:
    """A constructed symmetry: lift, projection, generating function, diagnostics."""

    field: PhaseVectorField
    projection: GeneralizedVectorField
    fn: PhaseFunction
    killing_residual: float | None = None
    warning: str | None = None


def hidden_symmetry_from_multivector(K: SymmetricMultivectorField,
                                     structures: PhaseStructures,
                                     check_points: Sequence[PhasePoint] | None = None,
                                     killing_tol: float = 1e-7) -> HiddenSymmetry:
    """Lift of the phase function of K, and its generalized projection.

    The construction goes through for any symmetric K; it is an actual
    symmetry of the contact structure exactly when K is Killing, so a
    residual check over ``check_points`` attaches a warning otherwise.
    """
    k = K.degree
    fn = phase_function_from_multivector(K, structures)
    field = hamilton_jacobi_lift(fn, structures)

    def xbar(p):
        frame = structures.frame(p)
        _, tau_hat = time_form(frame)
        kk = K(p.x)
        w = _contract_last(kk, tau_hat, k - 1)
        if k == 1:
            return w
        _, dhat = contact_map(frame)
        return k * w - (k - 1) * fn(p) * dhat

    def xbar_jac(p):
        frame = structures.frame(p)
        grads = frame_gradients(structures.metric, frame)
        _, tau_hat = time_form(frame)
        kk = K(p.x)
        dk7 = np.zeros((7,) + (4,) * k)
        dk7[:4] = K.d(p.x, structures.diff)
        out = np.empty((7, 4))
        for a in range(7):
            dw = _contract_last(dk7[a], tau_hat, k - 1)
            if k >= 2:
                partial = np.tensordot(kk, grads.d_tau[a], axes=([0], [0]))
                dw = dw + (k - 1) * _contract_last(partial, tau_hat, k - 2)
            out[a] = k * dw
        if k >= 2:
            _, dhat = contact_map(frame)
            df = fn.gradient(p, structures.diff)
            out -= (k - 1) * (np.outer(df, dhat) + fn(p) * grads.d_dhat)
        return out

    proj = GeneralizedVectorField(xbar, xbar_jac, name=f"Xbar[{K.name}]" if K.name else "")
    res = warning = None
    if check_points is not None:
        res = max(killing_residual(K, structures.metric, q.x, structures.diff)
                  for q in check_points)
        if res > killing_tol:
            warning = (f"{K.name or 'field'} is not Killing "
                       f"(residual {res:.3e} > {killing_tol:.1e}); "
                       "the lift is not a symmetry of the contact structure")
    return HiddenSymmetry(field, proj, fn, res, warning)


def lie_bracket_phase(X: PhaseVectorField, Y: PhaseVectorField, p: PhasePoint,
                      cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Numerical Lie bracket of phase vector fields at a point."""
    y = pack(p)
    fx, fy = X.as_fn7(), Y.as_fn7()
    a, b = fx(y), fy(y)
    da, db = jacobian(fx, y, cfg), jacobian(fy, y, cfg)
    return a @ db - b @ da


def lie_derivative_tau(X: PhaseVectorField, structures: PhaseStructures, p: PhasePoint,
                       cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Finite-difference Lie derivative of the time covector along X."""
    return lie_derivative_form(X.as_fn7(), structures.tau_fn(), pack(p), 1, cfg)


def lie_derivative_omega(X: PhaseVectorField, structures: PhaseStructures, p: PhasePoint,
                         cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Finite-difference Lie derivative of the two-form along X."""
    return lie_derivative_form(X.as_fn7(), structures.omega_fn(), pack(p), 2, cfg)


def generator_bracket(f: PhaseFunction, h: PhaseFunction, g: PhaseFunction,
                      k: PhaseFunction, structures: PhaseStructures,
                      p: PhasePoint) -> tuple[float, float]:
    """Bracket of symmetry generators (f, h) and (g, k) as a pair of reals.

    First slot is the Poisson bracket {f, g}; the second combines the cross
    brackets with the two-form evaluated on the lifted gradients.  For
    contact generators (f, -f), (g, -g) the pair reduces to
    ({f, g}, -{f, g}).
    """
    ev = structures.eval(p)
    if structures.extra_connection is None:
        d_omega = ev.omega                 # the contact case: d(-tau) = omega
    else:
        d_omega = PhaseStructures(structures.metric, structures.scales,
                                  diff=structures.diff).eval(p).omega
    df = f.gradient(p, structures.diff)
    dg = g.gradient(p, structures.diff)
    first = poisson_bracket_value(ev, df, dg)
    fs, gs = df @ ev.poisson, dg @ ev.poisson
    second = (poisson_bracket_value(ev, df, k.gradient(p, structures.diff))
              - poisson_bracket_value(ev, dg, h.gradient(p, structures.diff))
              - float(fs @ d_omega @ gs))
    return first, second


def verify_homomorphism(K: SymmetricMultivectorField, L: SymmetricMultivectorField,
                        structures: PhaseStructures, points: Sequence[PhasePoint],
                        cfg: DiffConfig = DEFAULT_DIFF) -> dict:
    """Residuals of the Killing-to-symmetry homomorphism over sample points.

    Checks [X[K], X[L]] = X[[K, L]] componentwise, the matching of the
    Poisson bracket of the generating functions with the bracket field's
    function, and the general bracket identity that holds without the
    Killing assumption.
    """
    kl = SymmetricMultivectorField(
        K.degree + L.degree - 1,
        lambda x: schouten_sym(K, L, x, cfg),
        name=f"[{K.name},{L.name}]",
    )
    hk = hidden_symmetry_from_multivector(K, structures)
    hl = hidden_symmetry_from_multivector(L, structures)
    hkl = hidden_symmetry_from_multivector(kl, structures)
    bracket_res, poisson_res, general_res = [], [], []
    for p in points:
        lb = lie_bracket_phase(hk.field, hl.field, p, cfg)
        bracket_res.append(float(np.max(np.abs(lb - hkl.field(p)))))
        ev = structures.eval(p)
        fk, fl = hk.fn(p), hl.fn(p)
        pb = poisson_bracket_value(ev, hk.fn.gradient(p, cfg), hl.fn.gradient(p, cfg))
        fkl = hkl.fn(p)
        poisson_res.append(abs(pb - fkl))
        gk = float(ev.gamma @ hk.fn.gradient(p, cfg))
        gl = float(ev.gamma @ hl.fn.gradient(p, cfg))
        general_res.append(abs(pb + K.degree * fk * gl - L.degree * fl * gk - fkl))
    return {
        "bracket": np.asarray(bracket_res),
        "poisson": np.asarray(poisson_res),
        "general": np.asarray(general_res),
    }
