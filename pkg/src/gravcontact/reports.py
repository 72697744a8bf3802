"""Residual-report assembly and the registry of named identities."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

# name -> (one-line description, default tolerance). Lower-bound checks
# (regularity) store the floor instead and report signed shortfall.
IDENTITIES: dict[str, tuple[str, float]] = {
    "velocity-normalization": ("g(d, d) + c^2 = 0 for the contact map", 1e-12),
    "time-normalization": ("tau(d) - 1 = 0 for the scaled time form", 1e-12),
    "unit-phase-function": ("Ghat(tau, tau) + 1 = 0", 1e-12),
    "reeb-normalization": ("tau(gamma) - 1 = 0", 1e-12),
    "contact-exactness": ("omega + d(tau) = 0 on the 7-chart", 1e-6),
    "contact-regularity": ("|tau ^ omega^3| stays above the floor", 1e-8),
    "jacobi-regularity": ("|gamma ^ poisson^3| stays above the floor", 1e-8),
    "flow-annihilates-two-form": ("gamma . omega = 0", 1e-9),
    "bivector-annihilates-time": ("tau . poisson = 0", 1e-9),
    "sharp-flat-inversion": ("poisson inverts omega on its image", 1e-9),
    "flat-sharp-inversion": ("omega inverts poisson on its image", 1e-9),
    "split-projector": ("poisson.omega equals id minus gamma x tau", 1e-9),
    "flow-bivector-bracket": ("[gamma, poisson] = 0 (Jacobi pair)", 1e-6),
    "bivector-self-bracket": ("[poisson, poisson] = 2 gamma ^ poisson", 1e-6),
    "killing-residual": ("symmetrized covariant derivative of the field vanishes", 1e-8),
    "killing-closure": ("bracket of two Killing fields stays Killing", 1e-7),
    "projectability": ("fibre obstruction of the lift vanishes", 1e-9),
    "conservation": ("generating function constant along the flow", 1e-8),
    "symmetry-lie-tau": ("Lie derivative of tau along the lift vanishes", 1e-6),
    "symmetry-lie-omega": ("Lie derivative of omega along the lift vanishes", 1e-5),
    "projection-identity": ("degree-1 lifts project onto their own field", 1e-10),
    "reeb-multiple": ("the metric 2-vector lifts to minus the flow field", 1e-10),
    "homomorphism-bracket": ("[X[K], X[L]] = X[[K, L]] componentwise", 1e-5),
    "homomorphism-poisson": ("{K(tau), L(tau)} = [K, L](tau) for Killing fields", 1e-6),
    "homomorphism-general": ("bracket identity with flow-derivative corrections", 1e-6),
    "flow-derivative-pairing": ("gamma.K(tau) = (1/2)[K, Ghat](tau)", 1e-7),
    "acpj-flow-bracket": ("[gamma, poisson] matches the joined flow wedge", 1e-6),
    "acpj-bivector-bracket": ("[poisson, poisson] matches the joined bivector wedge", 1e-6),
    "joined-closedness": ("d(omega) = 0 for the joined two-form", 1e-7),
    "em-linearity": ("omega(q) - omega(0) is the rescaled field, exactly", 1e-12),
    "em-zero-charge": ("q = 0 reduces the joined pair to the gravitational one", 0.0),
    "geodesic-residual": ("flow transport matches parallel transport", 1e-10),
    "monitor-drift": ("Killing monitors stay constant along orbits", 1e-8),
}


def default_tolerance(identity: str) -> float:
    return IDENTITIES[identity][1]


def make_report(identity: str, metric_name: str, params: dict, residuals,
                tolerance: float | None = None, seed: int | None = None,
                lower_bound: bool = False, **extra) -> dict:
    """Assemble the documented residual-report dictionary.

    For lower-bound checks ``residuals`` are signed shortfalls
    (floor - value); the check passes when none is positive.
    """
    res = np.atleast_1d(np.asarray(residuals, dtype=float))
    if tolerance is None:
        tolerance = default_tolerance(identity)
    threshold = 0.0 if lower_bound else tolerance
    report = {
        "identity": identity,
        "metric": metric_name,
        "params": {k: v for k, v in params.items()},
        "points": int(res.size),
        "max_residual": float(np.max(res)),
        "mean_residual": float(np.mean(res)),
        "tolerance": float(tolerance),
        "pass": bool(np.max(res) <= threshold),
    }
    if seed is not None:
        report["seed"] = int(seed)
    report.update(extra)
    return report


def write_json(obj, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
