"""Verification sweeps: each turns an identity into residuals over samples.

These are the work functions behind the command-line tasks; the acceptance
suite drives them with its own tolerances.  Every sweep returns a list of
residual reports (see :mod:`gravcontact.reports`).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .electromagnetic import EMField, joined_phase_structures, verify_acpj_pair
from .geometry import DEFAULT_DIFF, DiffConfig, exterior_derivative, volume_coefficient
from .multivector import (SymmetricMultivectorField, killing_catalog, killing_residual,
                          random_polynomial_field, schouten_sym, unscaled_metric_field)
from .phasespace import (PhasePoint, PhaseStructures, contact_map, duality_residuals,
                         pack, time_form, verify_jacobi_pair)
from .reports import make_report
from .sampling import sample_phase_points
from .spacetime import ScaleConstants, SpacetimeMetric
from .symmetry import (conservation_residual, hidden_symmetry_from_multivector,
                       lie_derivative_omega, lie_derivative_tau,
                       phase_function_from_multivector, projectability_residual,
                       reeb_derivative, verify_homomorphism)

CLOSURE_PAIRS = {
    "minkowski": [("boost-x", "dt"), ("boost-x", "boost-y"), ("rot-xy", "dx")],
    "schwarzschild": [("rot-x", "rot-y"), ("dt", "rot-x")],
    "kerr": [("carter", "dt"), ("carter", "dphi"), ("dt", "dphi")],
}


def normalization_suite(metric: SpacetimeMetric, scales: ScaleConstants,
                        points: Sequence[PhasePoint], tolerance: float | None = None,
                        seed: int | None = None) -> list[dict]:
    """Normalization identities of the contact map, time form and flow."""
    structures = PhaseStructures(metric, scales)
    vel, tim, unit, reeb = [], [], [], []
    for p in points:
        frame = structures.frame(p)
        d, dhat = contact_map(frame)
        tau, tau_hat = time_form(frame)
        vel.append(abs(float(d @ frame.g @ d) + scales.c0 ** 2))
        tim.append(abs(float(tau @ d) - 1.0))
        ghat_inv = frame.ginv / scales.unscaled_factor
        unit.append(abs(float(tau_hat @ ghat_inv @ tau_hat) + 1.0))
        ev = structures.eval(p)
        reeb.append(abs(float(ev.tau @ ev.gamma) - 1.0))
    mk = lambda name, res: make_report(name, metric.name, metric.params, res,
                                       tolerance, seed=seed)
    return [mk("velocity-normalization", vel), mk("time-normalization", tim),
            mk("unit-phase-function", unit), mk("reeb-normalization", reeb)]


def contact_suite(metric: SpacetimeMetric, scales: ScaleConstants,
                  points: Sequence[PhasePoint], cfg: DiffConfig = DEFAULT_DIFF,
                  tolerances: dict | None = None, seed: int | None = None) -> list[dict]:
    """Exactness, duality and regularity of the contact pair."""
    tolerances = tolerances or {}
    structures = PhaseStructures(metric, scales, diff=cfg)
    exact, duals, reg_tau, reg_gamma = [], {}, [], []
    for p in points:
        ev = structures.eval(p)
        dtau = exterior_derivative(structures.tau_fn(), pack(p), 1, cfg)
        exact.append(float(np.max(np.abs(ev.omega + dtau))))
        for key, val in duality_residuals(ev).items():
            duals.setdefault(key, []).append(val)
        floor = tolerances.get("contact-regularity", 1e-8)
        reg_tau.append(floor - abs(volume_coefficient(ev.tau, ev.omega)))
        reg_gamma.append(floor - abs(volume_coefficient(ev.gamma, ev.poisson)))
    out = [make_report("contact-exactness", metric.name, metric.params, exact,
                       tolerances.get("contact-exactness"), seed=seed)]
    for key, vals in duals.items():
        out.append(make_report(key, metric.name, metric.params, vals,
                               tolerances.get(key), seed=seed))
    out.append(make_report("contact-regularity", metric.name, metric.params, reg_tau,
                           tolerances.get("contact-regularity"), seed=seed, lower_bound=True))
    out.append(make_report("jacobi-regularity", metric.name, metric.params, reg_gamma,
                           tolerances.get("jacobi-regularity"), seed=seed, lower_bound=True))
    return out


def jacobi_suite(metric: SpacetimeMetric, scales: ScaleConstants,
                 points: Sequence[PhasePoint], cfg: DiffConfig = DEFAULT_DIFF,
                 tolerance: float | None = None, seed: int | None = None) -> list[dict]:
    """Schouten-bracket identities of the Jacobi pair."""
    res = {"flow-bivector-bracket": [], "bivector-self-bracket": []}
    for p in points:
        for key, val in verify_jacobi_pair(metric, scales, p, cfg).items():
            res[key].append(val)
    return [make_report(key, metric.name, metric.params, vals, tolerance, seed=seed)
            for key, vals in res.items()]


def killing_suite(metric: SpacetimeMetric, scales: ScaleConstants,
                  points: Sequence[PhasePoint], names: Sequence[str] | None = None,
                  cfg: DiffConfig = DEFAULT_DIFF, tolerance: float | None = None,
                  closure_tolerance: float | None = None,
                  seed: int | None = None) -> list[dict]:
    """Killing residuals of catalog fields, plus bracket closure."""
    catalog = killing_catalog(metric, scales)
    names = list(names) if names else sorted(catalog)
    xs = [p.x for p in points]
    out = []
    for name in names:
        K = catalog[name]
        res = [killing_residual(K, metric, x, cfg) for x in xs]
        out.append(make_report("killing-residual", metric.name, metric.params, res,
                               tolerance, seed=seed, field=name))
    pairs = [pr for pr in CLOSURE_PAIRS.get(metric.name, []) if pr[0] in names and pr[1] in names]
    for a, b in pairs:
        bracket = SymmetricMultivectorField(
            catalog[a].degree + catalog[b].degree - 1,
            lambda x, A=catalog[a], B=catalog[b]: schouten_sym(A, B, x, cfg),
            name=f"[{a},{b}]")
        res = [killing_residual(bracket, metric, x, cfg) for x in xs]
        out.append(make_report("killing-closure", metric.name, metric.params, res,
                               closure_tolerance, seed=seed, field=f"[{a},{b}]"))
    return out


def symmetry_suite(metric: SpacetimeMetric, scales: ScaleConstants, name: str,
                   points: Sequence[PhasePoint], cfg: DiffConfig = DEFAULT_DIFF,
                   tolerances: dict | None = None, seed: int | None = None) -> list[dict]:
    """Projectability, conservation and symmetry residuals of one lift."""
    tolerances = tolerances or {}
    structures = PhaseStructures(metric, scales, diff=cfg)
    K = killing_catalog(metric, scales)[name]
    hs = hidden_symmetry_from_multivector(K, structures, check_points=points)
    proj, cons, ltau, lomega = [], [], [], []
    extras: dict[str, list] = {}
    for p in points:
        proj.append(float(np.max(np.abs(projectability_residual(hs.projection, structures, p)))))
        cons.append(abs(conservation_residual(hs.projection, structures, p)))
        ltau.append(float(np.max(np.abs(lie_derivative_tau(hs.field, structures, p, cfg)))))
        lomega.append(float(np.max(np.abs(lie_derivative_omega(hs.field, structures, p, cfg)))))
        if K.degree == 1:
            extras.setdefault("projection-identity", []).append(
                float(np.max(np.abs(hs.field(p)[:4] - K(p.x)))))
        if name == "ghat":
            ev = structures.eval(p)
            extras.setdefault("reeb-multiple", []).append(
                float(np.max(np.abs(hs.field(p) + ev.gamma))))
    out = [
        make_report("projectability", metric.name, metric.params, proj,
                    tolerances.get("projectability"), seed=seed, field=name),
        make_report("conservation", metric.name, metric.params, cons,
                    tolerances.get("conservation"), seed=seed, field=name,
                    killing_residual=hs.killing_residual, warning=hs.warning),
        make_report("symmetry-lie-tau", metric.name, metric.params, ltau,
                    tolerances.get("symmetry-lie-tau"), seed=seed, field=name),
        make_report("symmetry-lie-omega", metric.name, metric.params, lomega,
                    tolerances.get("symmetry-lie-omega"), seed=seed, field=name),
    ]
    for key, vals in extras.items():
        out.append(make_report(key, metric.name, metric.params, vals,
                               tolerances.get(key), seed=seed, field=name))
    return out


def homomorphism_suite(metric: SpacetimeMetric, scales: ScaleConstants, name_k: str,
                       name_l: str, points: Sequence[PhasePoint],
                       cfg: DiffConfig = DEFAULT_DIFF, tolerances: dict | None = None,
                       seed: int | None = None) -> list[dict]:
    """Lie-algebra homomorphism residuals for a pair of catalog fields."""
    tolerances = tolerances or {}
    catalog = killing_catalog(metric, scales)
    structures = PhaseStructures(metric, scales, diff=cfg)
    res = verify_homomorphism(catalog[name_k], catalog[name_l], structures, points, cfg)
    pair = f"[{name_k},{name_l}]"
    return [
        make_report("homomorphism-bracket", metric.name, metric.params, res["bracket"],
                    tolerances.get("homomorphism-bracket"), seed=seed, field=pair),
        make_report("homomorphism-poisson", metric.name, metric.params, res["poisson"],
                    tolerances.get("homomorphism-poisson"), seed=seed, field=pair),
        make_report("homomorphism-general", metric.name, metric.params, res["general"],
                    tolerances.get("homomorphism-general"), seed=seed, field=pair),
    ]


def flow_pairing_suite(metric: SpacetimeMetric, scales: ScaleConstants,
                       points: Sequence[PhasePoint], n_fields: int = 20,
                       seed: int = 0, cfg: DiffConfig = DEFAULT_DIFF,
                       tolerance: float | None = None) -> list[dict]:
    """Flow derivative of K(tau) against the half-bracket with the metric.

    Exercised with random non-Killing symmetric 2-vectors: the identity
    gamma.K(tau) = (1/2) [K, Ghat](tau) holds for arbitrary K and ties the
    bracket, the flow and the phase functions together.
    """
    rng = np.random.default_rng(seed)
    structures = PhaseStructures(metric, scales, diff=cfg)
    ghat = unscaled_metric_field(metric, scales)
    res = []
    for _ in range(n_fields):
        K = random_polynomial_field(2, rng)
        fn = phase_function_from_multivector(K, structures)
        p = points[int(rng.integers(len(points)))]
        lhs = reeb_derivative(fn, structures, p)
        bracket = schouten_sym(K, ghat, p.x, cfg)
        _, tau_hat = time_form(structures.frame(p))
        rhs = bracket
        for _ in range(3):
            rhs = np.tensordot(rhs, tau_hat, axes=([0], [0]))
        res.append(abs(lhs - 0.5 * float(rhs)))
    return [make_report("flow-derivative-pairing", metric.name, metric.params, res,
                        tolerance, seed=seed)]


def em_suite(metric: SpacetimeMetric, scales: ScaleConstants, em: EMField,
             points: Sequence[PhasePoint], cfg: DiffConfig = DEFAULT_DIFF,
             tolerances: dict | None = None, seed: int | None = None) -> list[dict]:
    """Joined-structure residuals: brackets, closedness, duality, linearity."""
    tolerances = tolerances or {}
    grouped: dict[str, list] = {}
    st_q = joined_phase_structures(metric, scales, em, cfg)
    st_0 = PhaseStructures(metric, ScaleConstants(scales.c0, scales.hbar0, scales.m, 0.0),
                           diff=cfg)
    st_q0 = joined_phase_structures(metric, ScaleConstants(scales.c0, scales.hbar0,
                                                           scales.m, 0.0), em, cfg)
    factor = scales.q / (2.0 * scales.hbar0)
    for p in points:
        em.require_closed(p.x, cfg)
        for key, val in verify_acpj_pair(metric, scales, em, p, cfg).items():
            grouped.setdefault(key, []).append(val)
        pulled = np.zeros((7, 7))
        pulled[:4, :4] = factor * em(p.x)
        lin = np.max(np.abs(st_q.eval(p).omega - st_0.eval(p).omega - pulled))
        grouped.setdefault("em-linearity", []).append(float(lin))
        ev0, evq0 = st_0.eval(p), st_q0.eval(p)
        red = max(np.max(np.abs(ev0.omega - evq0.omega)),
                  np.max(np.abs(ev0.poisson - evq0.poisson)),
                  np.max(np.abs(ev0.gamma - evq0.gamma)))
        grouped.setdefault("em-zero-charge", []).append(float(red))
    return [make_report(key, metric.name, metric.params, vals, tolerances.get(key),
                        seed=seed, em=em.name)
            for key, vals in grouped.items()]
