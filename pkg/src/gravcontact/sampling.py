"""Deterministic admissible-point sampling for verification sweeps.

Spacetime coordinates are drawn uniformly from per-metric boxes (rejected
against the chart margin); fibre velocities are drawn as a random direction
at a random fraction of the local coordinate light speed, so every sample
is strictly timelike without rejection.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .phasespace import PhasePoint, phase_frame
from .spacetime import ScaleConstants, SpacetimeMetric


def default_ranges(metric: SpacetimeMetric) -> list[list[float]]:
    if metric.name == "minkowski":
        return [[-5.0, 5.0]] * 4
    M = metric.params["M"]
    if metric.name == "schwarzschild":
        r_lo = 2.0 * M * 1.3
    elif metric.name == "kerr":
        a = metric.params["a"]
        r_lo = (M + math.sqrt(M * M - a * a)) * 1.3
    else:
        raise ParameterError(f"no default sample ranges for metric {metric.name!r}")
    return [[0.0, 10.0 * M], [r_lo, 12.0 * M], [0.3, math.pi - 0.3], [0.0, 2.0 * math.pi]]


def null_speed(g: np.ndarray, n: np.ndarray) -> float:
    """Positive coordinate speed along direction n at which (1, s n) goes null."""
    A = float(n @ g[1:, 1:] @ n)
    B = float(g[0, 1:] @ n)
    C = float(g[0, 0])
    disc = B * B - A * C
    return (-B + math.sqrt(disc)) / A


def sample_phase_points(metric: SpacetimeMetric, scales: ScaleConstants, count: int,
                        seed: int, ranges=None, beta=(0.05, 0.7)) -> list[PhasePoint]:
    """Draw ``count`` admissible phase points, reproducibly from ``seed``."""
    rng = np.random.default_rng(seed)
    boxes = np.asarray(ranges if ranges is not None else default_ranges(metric), dtype=float)
    if boxes.shape != (4, 2):
        raise ParameterError(f"coordinate ranges must be 4 intervals, got shape {boxes.shape}")
    points = []
    guard = 0
    while len(points) < count:
        guard += 1
        if guard > 200 * count:
            raise ParameterError("sampling rejected too many points; widen the ranges")
        x = rng.uniform(boxes[:, 0], boxes[:, 1])
        if metric.chart_margin(x) <= 1e-3:
            continue
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        frac = rng.uniform(*beta)
        v = frac * null_speed(metric.g(x), n) * n
        p = PhasePoint(x, v)
        phase_frame(metric, scales, p)  # admissibility guaranteed; raises if not
        points.append(p)
    return points
