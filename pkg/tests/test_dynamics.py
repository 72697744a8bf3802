import math

import numpy as np
import pytest

from gravcontact.dynamics import (geodesic_residual, integrate, integrate_fixed,
                                  monitor, write_csv)
from gravcontact.multivector import SymmetricMultivectorField, killing_catalog
from gravcontact.phasespace import PhasePoint
from gravcontact.spacetime import ScaleConstants, metric_catalog


@pytest.fixture(scope="module")
def kerr_orbit():
    # mildly eccentric, mildly inclined bound orbit outside the ergoregion
    omega_circ = 1.0 / (8.0 ** 1.5 + 0.7)
    return PhasePoint([0.0, 8.0, math.pi / 2 - 0.1, 0.0],
                      [0.002, 0.001, 1.02 * omega_circ])


def test_minkowski_straight_line(minkowski, scales):
    p0 = PhasePoint([0, 1.0, -2.0, 0.5], [0.3, -0.1, 0.2])
    traj = integrate(minkowski, scales, p0, 20.0, rtol=1e-10)
    np.testing.assert_allclose(traj.v, np.tile(p0.v, (len(traj), 1)), atol=1e-12)
    # x(s) stays on the straight line x0 + s * lorentz * u
    lor = 1.0 / math.sqrt(1.0 - p0.v @ p0.v)
    u = np.concatenate([[1.0], p0.v])
    expect = p0.x + np.outer(traj.s, lor * u)
    np.testing.assert_allclose(traj.x, expect, atol=1e-9)


def test_geodesic_residual_identity(all_metrics, scales, points_by_metric):
    for m in all_metrics:
        worst = max(geodesic_residual(m, scales, p) for p in points_by_metric[m.name][:6])
        assert worst <= 1e-10, m.name


def test_circular_orbit_radius_drift(schwarzschild, scales):
    # circular orbit at r = 6M seeded with the analytic angular velocity
    r0 = 6.0
    omega = math.sqrt(1.0 / r0 ** 3)
    p0 = PhasePoint([0.0, r0, math.pi / 2, 0.0], [0.0, 0.0, omega])
    period_s = 2 * math.pi / omega * math.sqrt(1 - 3.0 / r0)  # ds = dt / lorentz
    traj = integrate(schwarzschild, scales, p0, 10 * period_s, rtol=1e-11, atol=1e-13)
    assert not traj.exited
    assert np.max(np.abs(traj.x[:, 1] - r0)) <= 1e-6


def test_kerr_constants_drift(kerr, scales, kerr_orbit):
    traj = integrate(kerr, scales, kerr_orbit, 100.0, rtol=1e-10, atol=1e-12)
    assert not traj.exited
    report = monitor(traj, killing_catalog(kerr, scales), kerr, scales)
    for name in ("ghat", "dt", "dphi", "carter"):
        assert report[name]["drift"] <= 1e-8, name
    assert report["ghat"]["drift"] <= 1e-12
    assert report["ghat"]["initial"] == pytest.approx(-1.0, abs=1e-12)


def test_non_killing_monitor_drifts(schwarzschild, scales):
    p0 = PhasePoint([0.0, 8.0, math.pi / 2, 0.0], [0.01, 0.0, 0.9 / 8.0 ** 1.5])
    traj = integrate(schwarzschild, scales, p0, 80.0, rtol=1e-10)
    stretch = SymmetricMultivectorField(
        2, lambda x: np.einsum("a,b->ab", np.eye(4)[1], np.eye(4)[1]) * x[1] ** 2,
        name="r2-radial")
    report = monitor(traj, {"r2-radial": stretch}, schwarzschild, scales)
    assert report["r2-radial"]["drift"] > 1e-3


def test_fixed_step_fourth_order_convergence(kerr, scales, kerr_orbit):
    s_end = 20.0
    ref = integrate(kerr, scales, kerr_orbit, s_end, rtol=1e-13, atol=1e-13)
    end_ref = np.concatenate([ref.x[-1], ref.v[-1]])

    def final_error(n):
        traj = integrate_fixed(kerr, scales, kerr_orbit, s_end, n)
        return np.max(np.abs(np.concatenate([traj.x[-1], traj.v[-1]]) - end_ref))

    # steps coarse enough that truncation dominates the reference error
    e1, e2 = final_error(25), final_error(50)
    assert e1 > 1e-11
    assert 12.0 <= e1 / e2 <= 20.0, (e1, e2, e1 / e2)


def test_drift_scales_with_tolerance(kerr, scales, kerr_orbit):
    cat = killing_catalog(kerr, scales)
    drifts = []
    for tol in (1e-6, 1e-8, 1e-10):
        traj = integrate(kerr, scales, kerr_orbit, 30.0, rtol=tol, atol=tol)
        report = monitor(traj, {"carter": cat["carter"]}, kerr, scales)
        drifts.append(report["carter"]["drift"])
    assert drifts[0] > drifts[1] > drifts[2]
    slope = (math.log(drifts[0]) - math.log(drifts[2])) / (math.log(1e-6) - math.log(1e-10))
    assert 0.5 <= slope <= 1.5, (drifts, slope)


def test_plunge_truncates_with_exit_flag(kerr, scales):
    p0 = PhasePoint([0.0, 7.0, math.pi / 2 - 0.2, 0.0], [0.01, 0.005, 0.035])
    traj = integrate(kerr, scales, p0, 100.0, rtol=1e-9)
    assert traj.exited and traj.exit_reason == "chart-domain"
    assert traj.s[-1] < 100.0
    assert np.all(np.diff(traj.s) > 0)


def test_invalid_start_rejected(schwarzschild, scales):
    from gravcontact.errors import TimelikeViolationError, ChartDomainError
    with pytest.raises(TimelikeViolationError):
        integrate(schwarzschild, scales, PhasePoint([0, 8.0, 1.2, 0], [0.9, 0, 0]), 1.0)
    with pytest.raises(ChartDomainError):
        integrate(schwarzschild, scales, PhasePoint([0, 1.5, 1.2, 0], [0, 0, 0]), 1.0)


def test_csv_export(tmp_path, schwarzschild, scales):
    p0 = PhasePoint([0.0, 8.0, math.pi / 2, 0.0], [0.0, 0.0, 0.04])
    traj = integrate(schwarzschild, scales, p0, 5.0, rtol=1e-8)
    monitor(traj, {"dt": killing_catalog(schwarzschild, scales)["dt"]},
            schwarzschild, scales)
    out = tmp_path / "orbit.csv"
    write_csv(traj, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "s,x0,x1,x2,x3,v1,v2,v3,dt"
    assert len(lines) == len(traj) + 1
    first = [float(tok) for tok in lines[1].split(",")]
    np.testing.assert_allclose(first[:5], [0.0, *p0.x], atol=1e-15)
