import numpy as np
import pytest

from gravcontact.errors import ClosednessError, ParameterError
from gravcontact.electromagnetic import (EMField, em_catalog, em_connection,
                                         joined_phase_structures, joined_structures,
                                         verify_acpj_pair)
from gravcontact.dynamics import flow_transport_defect
from gravcontact.geometry import volume_coefficient
from gravcontact.phasespace import PhasePoint, PhaseStructures, contact_map
from gravcontact.spacetime import ScaleConstants, metric_catalog


@pytest.fixture(scope="module")
def constant_field():
    return em_catalog("constant", E=(0.3, -0.1, 0.2), B=(0.1, 0.4, -0.2))


@pytest.fixture(scope="module")
def charged():
    return ScaleConstants(q=0.8)


def test_catalog_fields_antisymmetric_and_closed(constant_field, spacetime_samples):
    coulomb = em_catalog("coulomb", Q=2.0)
    for x in spacetime_samples["schwarzschild"][:8]:
        for em in (constant_field, coulomb):
            F = em(x)
            np.testing.assert_allclose(F, -F.T, atol=1e-14)
            assert em.closedness_residual(x) <= 1e-8


def test_unknown_name_rejected():
    with pytest.raises(ParameterError):
        em_catalog("dipole")


def test_non_closed_field_rejected(minkowski, charged):
    bad = EMField("broken", {}, lambda x: np.array([
        [0.0, x[1], 0, 0], [-x[1], 0, x[0] * x[2], 0],
        [0, -x[0] * x[2], 0, 0], [0, 0, 0, 0]]))
    p = PhasePoint([0.5, 1.0, 2.0, 0.3], [0.1, 0, 0])
    assert bad.closedness_residual(p.x) > 1e-3
    with pytest.raises(ClosednessError):
        joined_structures(minkowski, charged, bad, p)


def test_zero_charge_reduces_exactly(minkowski, constant_field, points_by_metric):
    neutral = ScaleConstants(q=0.0)
    st_em = joined_phase_structures(minkowski, neutral, constant_field)
    st = PhaseStructures(minkowski, neutral)
    for p in points_by_metric["minkowski"][:5]:
        a, b = st_em.eval(p), st.eval(p)
        np.testing.assert_array_equal(a.omega, b.omega)
        np.testing.assert_array_equal(a.poisson, b.poisson)
        np.testing.assert_array_equal(a.gamma, b.gamma)


def test_two_form_linearity_in_charge(minkowski, constant_field, points_by_metric):
    for q in (0.3, 0.8, -1.2):
        sc = ScaleConstants(q=q, hbar0=0.7)
        st_q = joined_phase_structures(minkowski, sc, constant_field)
        st_0 = PhaseStructures(minkowski, ScaleConstants(hbar0=0.7))
        for p in points_by_metric["minkowski"][:4]:
            pulled = np.zeros((7, 7))
            pulled[:4, :4] = (q / (2 * sc.hbar0)) * constant_field(p.x)
            diff = st_q.eval(p).omega - st_0.eval(p).omega
            np.testing.assert_allclose(diff, pulled, atol=1e-12)


def test_joined_flow_is_lorentz_force(minkowski, constant_field, charged,
                                      points_by_metric):
    # transport defect of the joined flow = q/(2 m c) F^a_b dhat^b
    for p in points_by_metric["minkowski"][:6]:
        defect = flow_transport_defect(minkowski, charged, p, constant_field)
        st = joined_phase_structures(minkowski, charged, constant_field)
        fr = st.frame(p)
        _, dhat = contact_map(fr)
        force = fr.ginv @ constant_field(p.x) @ dhat
        scale = charged.q / (2.0 * charged.m * charged.c0)
        np.testing.assert_allclose(defect, scale * force, atol=1e-12)


def test_joined_duality_and_normalization(minkowski, constant_field, charged,
                                          points_by_metric):
    st = joined_phase_structures(minkowski, charged, constant_field)
    for p in points_by_metric["minkowski"][:6]:
        ev = st.eval(p)
        assert float(ev.tau @ ev.gamma) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(ev.gamma @ ev.omega)) <= 1e-12
        assert abs(volume_coefficient(ev.tau, ev.omega)) > 1e-8


def test_acpj_identities_constant_field(minkowski, constant_field, charged,
                                        points_by_metric):
    for p in points_by_metric["minkowski"][:5]:
        res = verify_acpj_pair(minkowski, charged, constant_field, p)
        assert res["acpj-flow-bracket"] <= 1e-6
        assert res["acpj-bivector-bracket"] <= 1e-6
        assert res["joined-closedness"] <= 1e-7
        assert res["sharp-flat-inversion"] <= 1e-9


def test_acpj_reduces_to_jacobi_at_zero_charge(schwarzschild, points_by_metric):
    from gravcontact.phasespace import verify_jacobi_pair
    sc = ScaleConstants(q=0.0)
    p = points_by_metric["schwarzschild"][0]
    res = verify_acpj_pair(schwarzschild, sc, None, p)
    jac = verify_jacobi_pair(schwarzschild, sc, p)
    assert res["acpj-flow-bracket"] == pytest.approx(jac["flow-bivector-bracket"], abs=1e-9)
    assert res["acpj-bivector-bracket"] <= 1e-6


def test_coulomb_on_schwarzschild(schwarzschild, points_by_metric):
    sc = ScaleConstants(q=0.25)
    coulomb = em_catalog("coulomb", Q=1.0)
    st = joined_phase_structures(schwarzschild, sc, coulomb)
    for p in points_by_metric["schwarzschild"][:4]:
        ev = st.eval(p)
        assert float(ev.tau @ ev.gamma) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(ev.gamma @ ev.omega)) <= 1e-12
        res = verify_acpj_pair(schwarzschild, sc, coulomb, p)
        assert res["acpj-flow-bracket"] <= 1e-6
        assert res["joined-closedness"] <= 1e-7


def test_em_connection_vanishes_without_charge(minkowski, constant_field):
    fr_structures = PhaseStructures(minkowski, ScaleConstants())
    fr = fr_structures.frame(PhasePoint([0, 0, 0, 0], [0.2, 0.1, 0]))
    np.testing.assert_array_equal(em_connection(fr, constant_field, ScaleConstants(q=0.0)),
                                  np.zeros((3, 4)))
