"""Lorentzian metric catalog with analytic derivatives and rescalings.

Charts are ordered ``(x^0, x^1, x^2, x^3)`` with ``x^0`` timelike; signature
is ``(-+++)``.  Derivative arrays put the derivative index first:
``dg[rho, lam, mu] = d_rho g_{lam mu}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ChartDomainError, ParameterError
from .geometry import DEFAULT_DIFF, DiffConfig, jacobian


@dataclass(frozen=True)
class ScaleConstants:
    """Numeric values of the speed of light, Planck constant, mass and charge."""

    c0: float = 1.0
    hbar0: float = 1.0
    m: float = 1.0
    q: float = 0.0

    def __post_init__(self):
        for name in ("c0", "hbar0", "m"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def metric_scale(self) -> float:
        """Factor turning g into the mass-rescaled metric."""
        return self.m / self.hbar0

    @property
    def unscaled_factor(self) -> float:
        """Factor turning g into the dimension-free metric, (m c / hbar)^2."""
        return (self.m * self.c0 / self.hbar0) ** 2


@dataclass(frozen=True)
class SpacetimeMetric:
    """Chart-level evaluator of a Lorentzian metric and its first derivatives."""

    name: str
    params: dict
    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray]
    chart_margin: Callable[[np.ndarray], float] = field(default=lambda x: 1.0)

    def chart_domain(self, x) -> bool:
        return self.chart_margin(np.asarray(x, dtype=float)) > 0.0

    def require_domain(self, x) -> None:
        if not self.chart_domain(x):
            raise ChartDomainError(f"{self.name}: point {np.asarray(x)} outside chart domain")

    def inverse(self, x) -> np.ndarray:
        return np.linalg.inv(self.g(np.asarray(x, dtype=float)))

    def with_numeric_derivatives(self, cfg: DiffConfig = DEFAULT_DIFF) -> "SpacetimeMetric":
        """Copy of this metric with dg replaced by central differences of g.

        Lets every downstream test run on both derivative paths.
        """
        g = self.g
        return replace(self, dg=lambda x, _g=g: jacobian(_g, x, cfg))


def _minkowski() -> SpacetimeMetric:
    eta = np.diag([-1.0, 1.0, 1.0, 1.0])
    zeros = np.zeros((4, 4, 4))
    return SpacetimeMetric(
        name="minkowski",
        params={},
        g=lambda x: eta.copy(),
        dg=lambda x: zeros.copy(),
    )


def _schwarzschild(M: float, margin: float) -> SpacetimeMetric:
    if M < 0:
        raise ParameterError(f"schwarzschild needs M >= 0, got {M}")

    def g(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        return np.diag([-f, 1.0 / f, r * r, r * r * math.sin(th) ** 2])

    def dg(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        fp = 2.0 * M / r ** 2
        s, c = math.sin(th), math.cos(th)
        out = np.zeros((4, 4, 4))
        out[1, 0, 0] = -fp
        out[1, 1, 1] = -fp / f ** 2
        out[1, 2, 2] = 2.0 * r
        out[1, 3, 3] = 2.0 * r * s * s
        out[2, 3, 3] = r * r * 2.0 * s * c
        return out

    r_floor = max(2.0 * M * (1.0 + margin), margin)

    def chart_margin(x):
        r, th = x[1], x[2]
        return min(r / r_floor - 1.0, math.sin(th) - margin)

    return SpacetimeMetric("schwarzschild", {"M": M, "margin": margin}, g, dg, chart_margin)


def _kerr(M: float, a: float, margin: float) -> SpacetimeMetric:
    if M < 0:
        raise ParameterError(f"kerr needs M >= 0, got {M}")
    if abs(a) > M:
        raise ParameterError(f"kerr needs |a| <= M, got a={a}, M={M}")
    r_plus = M + math.sqrt(M * M - a * a)
    r_floor = max(r_plus * (1.0 + margin), margin)

    def pieces(x):
        r, th = x[1], x[2]
        s, c = math.sin(th), math.cos(th)
        sigma = r * r + a * a * c * c
        delta = r * r - 2.0 * M * r + a * a
        return r, s, c, sigma, delta

    def g(x):
        r, s, c, sigma, delta = pieces(x)
        out = np.zeros((4, 4))
        out[0, 0] = -1.0 + 2.0 * M * r / sigma
        out[0, 3] = out[3, 0] = -2.0 * M * a * r * s * s / sigma
        out[1, 1] = sigma / delta
        out[2, 2] = sigma
        out[3, 3] = (r * r + a * a + 2.0 * M * a * a * r * s * s / sigma) * s * s
        return out

    def dg(x):
        r, s, c, sigma, delta = pieces(x)
        sig_r, sig_th = 2.0 * r, -2.0 * a * a * s * c
        del_r = 2.0 * r - 2.0 * M
        # d/d. of s^2/sigma shows up in both off-diagonal and phi-phi entries
        q_r = s * s * (sigma - r * sig_r) / sigma ** 2
        q_th = (2.0 * s * c * sigma - s * s * sig_th) / sigma ** 2
        w = r * r + a * a + 2.0 * M * a * a * r * s * s / sigma
        w_r = 2.0 * r + 2.0 * M * a * a * q_r
        w_th = 2.0 * M * a * a * r * q_th

        out = np.zeros((4, 4, 4))
        out[1, 0, 0] = 2.0 * M * (sigma - r * sig_r) / sigma ** 2
        out[2, 0, 0] = -2.0 * M * r * sig_th / sigma ** 2
        out[1, 0, 3] = out[1, 3, 0] = -2.0 * M * a * q_r
        out[2, 0, 3] = out[2, 3, 0] = -2.0 * M * a * r * q_th
        out[1, 1, 1] = (sig_r * delta - sigma * del_r) / delta ** 2
        out[2, 1, 1] = sig_th / delta
        out[1, 2, 2] = sig_r
        out[2, 2, 2] = sig_th
        out[1, 3, 3] = w_r * s * s
        out[2, 3, 3] = w_th * s * s + w * 2.0 * s * c
        return out

    def chart_margin(x):
        r, th = x[1], x[2]
        return min(r / r_floor - 1.0, math.sin(th) - margin)

    return SpacetimeMetric("kerr", {"M": M, "a": a, "margin": margin}, g, dg, chart_margin)


METRIC_NAMES = ("minkowski", "schwarzschild", "kerr")


def metric_catalog(name: str, **params) -> SpacetimeMetric:
    """Build a catalog metric by name.

    Supported: ``minkowski``, ``schwarzschild(M)``, ``kerr(M, a)``; the
    optional ``margin`` parameter widens the excluded neighborhood of
    horizons and the axis.
    """
    margin = float(params.pop("margin", 1e-3))
    if name == "minkowski":
        extra = set(params)
        if extra:
            raise ParameterError(f"minkowski takes no parameters, got {extra}")
        return _minkowski()
    if name == "schwarzschild":
        return _schwarzschild(float(params.pop("M", 1.0)), margin)
    if name == "kerr":
        return _kerr(float(params.pop("M", 1.0)), float(params.pop("a", 0.0)), margin)
    raise ParameterError(f"unknown metric {name!r}; choose from {METRIC_NAMES}")


def christoffel(metric: SpacetimeMetric, x, check: bool = True) -> np.ndarray:
    """Levi-Civita connection coefficients, ``out[nu, lam, mu] = Gamma^nu_{lam mu}``."""
    x = np.asarray(x, dtype=float)
    if check:
        metric.require_domain(x)
    dg = metric.dg(x)
    ginv = metric.inverse(x)
    # Gamma^nu_{lam mu} = 1/2 g^{nu rho} (d_lam g_{rho mu} + d_mu g_{rho lam} - d_rho g_{lam mu})
    bracket = (np.einsum("lrm->rlm", dg) + np.einsum("mrl->rlm", dg)
               - np.einsum("rlm->rlm", dg))
    return 0.5 * np.einsum("nr,rlm->nlm", ginv, bracket)


@dataclass(frozen=True)
class RescaledMetrics:
    """Mass-rescaled and dimension-free versions of the metric at a point."""

    G: np.ndarray         # (m/hbar0) g_{lam mu}
    G_inv: np.ndarray     # (hbar0/m) g^{lam mu}
    Ghat: np.ndarray      # (m c/hbar)^2 g_{lam mu}
    Ghat_inv: np.ndarray  # (hbar/(m c))^2 g^{lam mu}


def rescaled_metrics(metric: SpacetimeMetric, scales: ScaleConstants, x) -> RescaledMetrics:
    x = np.asarray(x, dtype=float)
    g = metric.g(x)
    ginv = np.linalg.inv(g)
    k = scales.metric_scale
    u = scales.unscaled_factor
    return RescaledMetrics(G=k * g, G_inv=ginv / k, Ghat=u * g, Ghat_inv=ginv / u)
