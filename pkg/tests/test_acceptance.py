"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run ``pytest tests/test_acceptance.py -s`` to see the per-criterion lines.
Tolerances here are the contract; they are pinned, not tuned.
"""

import json
import math
import time

import numpy as np
import pytest

from gravcontact.dynamics import integrate, integrate_fixed, monitor
from gravcontact.electromagnetic import em_catalog
from gravcontact.geometry import DiffConfig, exterior_derivative, volume_coefficient
from gravcontact.multivector import (killing_catalog, pi_star, random_polynomial_field,
                                     schouten_sym, unscaled_metric_field)
from gravcontact.phasespace import (PhasePoint, PhaseStructures, contact_map,
                                    duality_residuals, pack, time_form,
                                    verify_jacobi_pair)
from gravcontact.sampling import sample_phase_points
from gravcontact.spacetime import ScaleConstants, metric_catalog
from gravcontact.symmetry import (SymmetricMultivectorField, conservation_residual,
                                  hidden_symmetry_from_multivector, lie_bracket_phase,
                                  lie_derivative_tau, phase_function_from_multivector,
                                  projectability_residual, reeb_derivative)
from gravcontact import verify

SCALES = ScaleConstants()
METRICS = {
    "minkowski": metric_catalog("minkowski"),
    "schwarzschild": metric_catalog("schwarzschild", M=1.0),
    "kerr": metric_catalog("kerr", M=1.0, a=0.7),
}


def _report(number: int, label: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} [{status}] {label}" + (f"  ({detail})" if detail else ""))
    assert ok, f"criterion {number}: {label} {detail}"


def _points(metric, count, seed=2024):
    return sample_phase_points(metric, SCALES, count, seed)


def test_criterion_01_normalizations():
    start = time.monotonic()
    worst = 0.0
    for metric in METRICS.values():
        st = PhaseStructures(metric, SCALES)
        for p in _points(metric, 200):
            fr = st.frame(p)
            d, dhat = contact_map(fr)
            tau, tau_hat = time_form(fr)
            ghat_inv = fr.ginv / SCALES.unscaled_factor
            worst = max(worst,
                        abs(float(d @ fr.g @ d) + SCALES.c0 ** 2),
                        abs(float(tau @ d) - 1.0),
                        abs(float(tau_hat @ ghat_inv @ tau_hat) + 1.0))
    elapsed = time.monotonic() - start
    _report(1, "velocity/time/unit normalizations <= 1e-12 at 200 points per metric",
            worst <= 1e-12 and elapsed < 5.0,
            f"max={worst:.2e}, {elapsed:.1f}s")


def test_criterion_02_contact_pair():
    start = time.monotonic()
    cfg = DiffConfig()
    worst_exact, worst_dual, min_coeff = 0.0, 0.0, np.inf
    for metric in METRICS.values():
        st = PhaseStructures(metric, SCALES, diff=cfg)
        for p in _points(metric, 50):
            ev = st.eval(p)
            dtau = exterior_derivative(st.tau_fn(), pack(p), 1, cfg)
            worst_exact = max(worst_exact, float(np.max(np.abs(ev.omega + dtau))))
            worst_dual = max(worst_dual, max(duality_residuals(ev).values()))
            min_coeff = min(min_coeff, abs(volume_coefficient(ev.tau, ev.omega)))
    elapsed = time.monotonic() - start
    ok = worst_exact <= 1e-6 and worst_dual <= 1e-9 and min_coeff > 1e-8 and elapsed < 30.0
    _report(2, "contact pair: exactness <= 1e-6, duality <= 1e-9, regular, 50 pts/metric",
            ok, f"exact={worst_exact:.2e} dual={worst_dual:.2e} "
                f"coeff>={min_coeff:.2e}, {elapsed:.1f}s")


def test_criterion_03_jacobi_pair():
    worst = 0.0
    for metric in METRICS.values():
        for p in _points(metric, 20):
            res = verify_jacobi_pair(metric, SCALES, p)
            worst = max(worst, max(res.values()))
    _report(3, "Jacobi pair brackets <= 1e-6 at 20 points per metric", worst <= 1e-6,
            f"max={worst:.2e}")


def test_criterion_04_momentum_homomorphism():
    rng = np.random.default_rng(404)
    worst = 0.0
    checks = 0
    for degrees in ((1, 1), (1, 2), (2, 2)):
        K = random_polynomial_field(degrees[0], rng)
        L = random_polynomial_field(degrees[1], rng)
        for _ in range(50):
            x = rng.uniform(-1.0, 1.0, 4)
            p = rng.uniform(-1.0, 1.0, 4)
            bracket = schouten_sym(K, L, x)
            lhs = bracket
            for _ in range(sum(degrees) - 1):
                lhs = np.tensordot(lhs, p, axes=([0], [0]))
            rhs = _canonical_poisson(lambda z, q: pi_star(K, z, q),
                                     lambda z, q: pi_star(L, z, q), x, p)
            worst = max(worst, abs(float(lhs) - rhs) / max(1.0, abs(rhs)))
            checks += 1
    _report(4, "momentum-polynomial homomorphism <= 1e-8 rel, degrees (1,1),(1,2),(2,2)",
            worst <= 1e-8, f"max={worst:.2e} over {checks} draws")


def _canonical_poisson(F, G, x, p, h=1e-6):
    total = 0.0
    for lam in range(4):
        def xs(t, a=lam):
            z = np.array(x)
            z[a] = t
            return z

        def ps(t, a=lam):
            z = np.array(p)
            z[a] = t
            return z
        dFp = (F(x, ps(p[lam] + h)) - F(x, ps(p[lam] - h))) / (2 * h)
        dGx = (G(xs(x[lam] + h), p) - G(xs(x[lam] - h), p)) / (2 * h)
        dFx = (F(xs(x[lam] + h), p) - F(xs(x[lam] - h), p)) / (2 * h)
        dGp = (G(x, ps(p[lam] + h)) - G(x, ps(p[lam] - h))) / (2 * h)
        total += dFp * dGx - dFx * dGp
    return total


def test_criterion_05_killing_suite():
    from gravcontact.multivector import killing_residual
    worst_res, worst_closure = 0.0, 0.0
    for metric in METRICS.values():
        xs = [p.x for p in _points(metric, 25)]
        catalog = killing_catalog(metric, SCALES)
        for name, K in catalog.items():
            worst_res = max(worst_res, max(killing_residual(K, metric, x) for x in xs))
        for a, b in verify.CLOSURE_PAIRS[metric.name]:
            bracket = SymmetricMultivectorField(
                catalog[a].degree + catalog[b].degree - 1,
                lambda x, A=catalog[a], B=catalog[b]: schouten_sym(A, B, x))
            worst_closure = max(worst_closure,
                                max(killing_residual(bracket, metric, x) for x in xs))
    ok = worst_res <= 1e-8 and worst_closure <= 1e-7
    _report(5, "catalog Killing residuals <= 1e-8, bracket closure <= 1e-7", ok,
            f"residual={worst_res:.2e} closure={worst_closure:.2e}")


def test_criterion_06_hidden_symmetries():
    worst = {"proj": 0.0, "cons": 0.0, "lie": 0.0, "k1": 0.0, "reeb": 0.0}
    for metric in METRICS.values():
        st = PhaseStructures(metric, SCALES)
        pts = _points(metric, 50)
        for name, K in killing_catalog(metric, SCALES).items():
            hs = hidden_symmetry_from_multivector(K, st)
            for p in pts:
                worst["proj"] = max(worst["proj"], float(np.max(np.abs(
                    projectability_residual(hs.projection, st, p)))))
                worst["cons"] = max(worst["cons"],
                                    abs(conservation_residual(hs.projection, st, p)))
            for p in pts[:50]:
                worst["lie"] = max(worst["lie"], float(np.max(np.abs(
                    lie_derivative_tau(hs.field, st, p)))))
            if K.degree == 1:
                worst["k1"] = max(worst["k1"], max(
                    float(np.max(np.abs(hs.field(p)[:4] - K(p.x)))) for p in pts))
            if name == "ghat":
                worst["reeb"] = max(worst["reeb"], max(
                    float(np.max(np.abs(hs.field(p) + st.eval(p).gamma)))
                    for p in pts))
    ok = (worst["proj"] <= 1e-9 and worst["cons"] <= 1e-8 and worst["lie"] <= 1e-6
          and worst["k1"] <= 1e-10 and worst["reeb"] <= 1e-10)
    _report(6, "hidden symmetries: proj<=1e-9 cons<=1e-8 L_X(tau)<=1e-6 "
               "k=1 projection<=1e-10 metric->flow<=1e-10", ok,
            " ".join(f"{k}={v:.2e}" for k, v in worst.items()))


def test_criterion_07_flow_derivative_pairing():
    # sign convention fixed once: gamma.K(tau) = +1/2 [K, Ghat](tau)
    rng = np.random.default_rng(777)
    metric = METRICS["schwarzschild"]
    st = PhaseStructures(metric, SCALES)
    ghat = unscaled_metric_field(metric, SCALES)
    pts = _points(metric, 20)
    worst = 0.0
    for k in range(20):
        K = random_polynomial_field(2, rng)
        fn = phase_function_from_multivector(K, st)
        p = pts[k]
        lhs = reeb_derivative(fn, st, p)
        bracket = schouten_sym(K, ghat, p.x)
        _, tau_hat = time_form(st.frame(p))
        rhs = bracket
        for _ in range(3):
            rhs = np.tensordot(rhs, tau_hat, axes=([0], [0]))
        worst = max(worst, abs(lhs - 0.5 * float(rhs)))
    _report(7, "flow derivative of K(tau) = +1/2 [K, Ghat](tau) <= 1e-7, 20 random K",
            worst <= 1e-7, f"max={worst:.2e}")


def test_criterion_08_homomorphism():
    cases = [("kerr", "dt", "dphi"), ("minkowski", "boost-x", "dt"),
             ("kerr", "carter", "dt")]
    worst = 0.0
    for mname, a, b in cases:
        metric = METRICS[mname]
        st = PhaseStructures(metric, SCALES)
        catalog = killing_catalog(metric, SCALES)
        kl = SymmetricMultivectorField(
            catalog[a].degree + catalog[b].degree - 1,
            lambda x, A=catalog[a], B=catalog[b]: schouten_sym(A, B, x))
        ha = hidden_symmetry_from_multivector(catalog[a], st)
        hb = hidden_symmetry_from_multivector(catalog[b], st)
        hkl = hidden_symmetry_from_multivector(kl, st)
        for p in _points(metric, 25):
            lb = lie_bracket_phase(ha.field, hb.field, p)
            worst = max(worst, float(np.max(np.abs(lb - hkl.field(p)))))
    _report(8, "[X[K], X[L]] = X[[K, L]] <= 1e-5 for the three named pairs, 25 pts each",
            worst <= 1e-5, f"max={worst:.2e}")


def test_criterion_09_dynamics():
    start = time.monotonic()
    kerr = METRICS["kerr"]
    omega_circ = 1.0 / (8.0 ** 1.5 + 0.7)
    p0 = PhasePoint([0.0, 8.0, math.pi / 2 - 0.1, 0.0], [0.002, 0.001, 1.02 * omega_circ])
    traj = integrate(kerr, SCALES, p0, 100.0, rtol=1e-10, atol=1e-12)
    drift = monitor(traj, killing_catalog(kerr, SCALES), kerr, SCALES)
    max_drift = max(drift[n]["drift"] for n in ("ghat", "dt", "dphi", "carter"))

    stretch = SymmetricMultivectorField(
        2, lambda x: np.einsum("a,b->ab", np.eye(4)[1], np.eye(4)[1]) * x[1] ** 2)
    bad = monitor(traj, {"bad": stretch}, kerr, SCALES)["bad"]["drift"]

    ref = integrate(kerr, SCALES, p0, 20.0, rtol=1e-13, atol=1e-13)
    end_ref = np.concatenate([ref.x[-1], ref.v[-1]])

    def err(n):
        t = integrate_fixed(kerr, SCALES, p0, 20.0, n)
        return np.max(np.abs(np.concatenate([t.x[-1], t.v[-1]]) - end_ref))

    ratio = err(25) / err(50)
    elapsed = time.monotonic() - start
    ok = (max_drift <= 1e-8 and bad > 1e-3 and 12.0 <= ratio <= 20.0 and elapsed < 60.0)
    _report(9, "orbit constants drift <= 1e-8 over s=100; non-Killing drifts; 4th order",
            ok, f"drift={max_drift:.2e} bad={bad:.2e} ratio={ratio:.1f}, {elapsed:.1f}s")


def test_criterion_10_em_suite():
    mink = METRICS["minkowski"]
    charged = ScaleConstants(q=0.8)
    em = em_catalog("constant", E=(0.3, -0.1, 0.2), B=(0.1, 0.4, -0.2))
    reports = verify.em_suite(mink, charged, em, _points(mink, 20),
                              tolerances={"joined-closedness": 1e-7,
                                          "sharp-flat-inversion": 1e-8,
                                          "flat-sharp-inversion": 1e-8,
                                          "acpj-flow-bracket": 1e-6,
                                          "acpj-bivector-bracket": 1e-6,
                                          "em-linearity": 1e-12,
                                          "em-zero-charge": 0.0})
    failed = [r["identity"] for r in reports if not r["pass"]]
    detail = " ".join(f"{r['identity']}={r['max_residual']:.1e}" for r in reports
                      if r["identity"].startswith(("acpj", "joined", "em")))
    _report(10, "joined pair: d(omega)=0 <= 1e-7, duality <= 1e-8, brackets <= 1e-6, "
                "exact q=0 reduction", not failed, detail or str(failed))


def test_criterion_11_determinism():
    metric = METRICS["kerr"]
    def run_once():
        pts = sample_phase_points(metric, SCALES, 10, seed=55)
        reports = verify.killing_suite(metric, SCALES, pts, seed=55)
        reports += verify.jacobi_suite(metric, SCALES, pts[:5], seed=55)
        return json.dumps(reports, sort_keys=True)

    same = run_once() == run_once()
    _report(11, "identical reports on re-run with a fixed seed", same)
