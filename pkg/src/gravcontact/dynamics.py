"""Flow integration on the phase space and conserved-quantity monitoring.

The trajectory parameter is the flow parameter of the unscaled dynamical
connection (the gauge in which ``tau(gamma) = 1``); for the purely
gravitational flow the spacetime track is an affinely parameterized
geodesic.  Conservation is measured, never enforced: the integrator is a
plain adaptive Runge-Kutta scheme.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import GravContactError, TimelikeViolationError
from .geometry import DEFAULT_DIFF, DiffConfig
from .electromagnetic import EMField, joined_phase_structures
from .multivector import SymmetricMultivectorField
from .phasespace import PhasePoint, PhaseStructures, frame_gradients, unpack
from .spacetime import ScaleConstants, SpacetimeMetric, christoffel
from .symmetry import phase_function_from_multivector


@dataclass
class Trajectory:
    """Sampled integral curve of the phase flow with monitored values."""

    s: np.ndarray               # (n,) strictly increasing parameter
    x: np.ndarray               # (n, 4) spacetime track
    v: np.ndarray               # (n, 3) fibre track
    method: str
    rtol: float | None = None
    atol: float | None = None
    step: float | None = None
    exited: bool = False
    exit_reason: str | None = None
    monitors: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.s)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.x[i], self.v[i])

    def points(self):
        return (self.point(i) for i in range(len(self.s)))


def _flow_rhs(structures: PhaseStructures):
    """Flow field tolerant of out-of-domain trial evaluations.

    Adaptive steppers probe points beyond a terminal event before the event
    root is located; a non-timelike probe returns NaN so the step is
    rejected instead of aborting the run.
    """

    def rhs(s, y):
        try:
            return structures.gamma(unpack(y))
        except TimelikeViolationError:
            return np.full(7, np.nan)

    return rhs


def integrate(metric: SpacetimeMetric, scales: ScaleConstants, p0: PhasePoint,
              s_end: float, em: EMField | None = None, rtol: float = 1e-10,
              atol: float | None = None, max_step: float = np.inf,
              diff: DiffConfig = DEFAULT_DIFF) -> Trajectory:
    """Adaptive Runge-Kutta 4(5) integration of the phase flow.

    Stops with an exit flag when the track leaves the chart domain or
    approaches the light cone.
    """
    joined_phase_structures(metric, scales, em, diff).frame(p0)  # validate p0
    structures = joined_phase_structures(metric, scales, em, diff, strict=False)
    if atol is None:
        atol = rtol
    rhs = _flow_rhs(structures)

    def domain_event(s, y):
        return metric.chart_margin(y[:4])

    def timelike_event(s, y):
        g = metric.g(y[:4])
        u = np.concatenate([[1.0], y[4:]])
        return -float(u @ g @ u) - 1e-10

    domain_event.terminal = True
    timelike_event.terminal = True
    sol = solve_ivp(rhs, (0.0, s_end), p0.coords(), method="RK45", rtol=rtol,
                    atol=atol, max_step=max_step, events=[domain_event, timelike_event])
    if sol.status < 0:
        raise GravContactError(f"integration failed: {sol.message}")
    exited = sol.status == 1
    reason = None
    if exited:
        reason = "chart-domain" if len(sol.t_events[0]) else "light-cone"
    y = sol.y.T
    return Trajectory(s=sol.t, x=y[:, :4], v=y[:, 4:], method="rk45",
                      rtol=rtol, atol=atol, exited=exited, exit_reason=reason)


def integrate_fixed(metric: SpacetimeMetric, scales: ScaleConstants, p0: PhasePoint,
                    s_end: float, n_steps: int, em: EMField | None = None,
                    diff: DiffConfig = DEFAULT_DIFF) -> Trajectory:
    """Classic fixed-step fourth-order Runge-Kutta, for convergence studies."""
    joined_phase_structures(metric, scales, em, diff).frame(p0)  # validate p0
    structures = joined_phase_structures(metric, scales, em, diff, strict=False)
    h = s_end / n_steps

    def rhs(y):
        return structures.gamma(unpack(y))

    ss = np.linspace(0.0, s_end, n_steps + 1)
    ys = np.empty((n_steps + 1, 7))
    ys[0] = p0.coords()
    y = ys[0].copy()
    for i in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
    return Trajectory(s=ss, x=ys[:, :4], v=ys[:, 4:], method="rk4-fixed", step=h)


def monitor(traj: Trajectory, fields: dict[str, SymmetricMultivectorField],
            metric: SpacetimeMetric, scales: ScaleConstants,
            diff: DiffConfig = DEFAULT_DIFF) -> dict[str, dict]:
    """Evaluate phase functions of the given multivectors along the trajectory.

    Returns, per field, the sampled values and the relative drift
    ``max|f(s) - f(0)| / max(1, |f(0)|)``; also stores the value columns on
    the trajectory for export.
    """
    structures = PhaseStructures(metric, scales, diff=diff)
    report: dict[str, dict] = {}
    for name, K in fields.items():
        fn = phase_function_from_multivector(K, structures)
        values = np.array([fn(p) for p in traj.points()])
        f0 = values[0]
        drift = float(np.max(np.abs(values - f0)) / max(1.0, abs(f0)))
        traj.monitors[name] = values
        report[name] = {"initial": float(f0), "drift": drift}
    return report


def flow_transport_defect(metric: SpacetimeMetric, scales: ScaleConstants, p: PhasePoint,
                          em: EMField | None = None,
                          diff: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Deviation of flow transport of the velocity from parallel transport.

    Vanishes identically for the gravitational flow; with an
    electromagnetic term it equals the Lorentz force acting on the
    unscaled velocity.
    """
    structures = joined_phase_structures(metric, scales, em, diff)
    frame = structures.frame(p)
    grads = frame_gradients(metric, frame)
    conn = structures.connection(frame)
    from .phasespace import contact_map, dynamical_connection
    _, dhat = contact_map(frame)
    _, gamma_hat = dynamical_connection(frame, conn)
    transport = gamma_hat @ grads.d_dhat
    gam = christoffel(metric, frame.x)
    curvature = np.einsum("nlm,l,m->n", gam, dhat, dhat)
    return transport + curvature


def geodesic_residual(metric: SpacetimeMetric, scales: ScaleConstants, p: PhasePoint,
                      diff: DiffConfig = DEFAULT_DIFF) -> float:
    """Pointwise geodesic-equation residual of the gravitational flow."""
    return float(np.max(np.abs(flow_transport_defect(metric, scales, p, None, diff))))


def write_csv(traj: Trajectory, path) -> None:
    """Trajectory export: (s, x0..x3, v1..v3, monitor columns)."""
    names = sorted(traj.monitors)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "x0", "x1", "x2", "x3", "v1", "v2", "v3"] + names)
        for i in range(len(traj)):
            row = [traj.s[i], *traj.x[i], *traj.v[i]]
            row += [traj.monitors[n][i] for n in names]
            writer.writerow([repr(float(val)) for val in row])
