import numpy as np
import pytest

from gravcontact import ScaleConstants, metric_catalog, sample_phase_points


@pytest.fixture(scope="session")
def scales():
    return ScaleConstants()


@pytest.fixture(scope="session")
def minkowski():
    return metric_catalog("minkowski")


@pytest.fixture(scope="session")
def schwarzschild():
    return metric_catalog("schwarzschild", M=1.0)


@pytest.fixture(scope="session")
def kerr():
    return metric_catalog("kerr", M=1.0, a=0.7)


@pytest.fixture(scope="session")
def all_metrics(minkowski, schwarzschild, kerr):
    return [minkowski, schwarzschild, kerr]


@pytest.fixture(scope="session")
def points_by_metric(all_metrics, scales):
    return {m.name: sample_phase_points(m, scales, 20, seed=1234) for m in all_metrics}


@pytest.fixture(scope="session")
def spacetime_samples(all_metrics, scales):
    return {m.name: [p.x for p in sample_phase_points(m, scales, 30, seed=99)]
            for m in all_metrics}
