"""Scenario runner: JSON configs in, residual reports and trajectories out.

Exit codes: 0 all residuals within tolerance, 1 residual failure,
2 configuration error.  Reports are deterministic for a fixed seed; the
only environment influence is ``GRAVCONTACT_OUT`` as a default output
directory, overridden by ``--out``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dynamics import integrate, monitor, write_csv
from .electromagnetic import EM_NAMES, em_catalog
from .errors import ConfigError, GravContactError
from .geometry import DiffConfig
from .multivector import killing_catalog
from .phasespace import PhasePoint
from .reports import IDENTITIES, make_report, write_json
from .sampling import sample_phase_points
from .spacetime import METRIC_NAMES, ScaleConstants, metric_catalog
from . import verify

TASK_NAMES = ("check-structures", "check-killing", "build-symmetry",
              "verify-homomorphism", "integrate", "verify-em")


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


class Scenario:
    """Validated scenario configuration."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        mspec = raw.get("metric")
        if not mspec or "name" not in mspec:
            raise ConfigError("config needs a metric: {name, params}")
        try:
            self.metric = metric_catalog(mspec["name"], **mspec.get("params", {}))
            self.scales = ScaleConstants(**raw.get("scales", {}))
        except (GravContactError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        emspec = raw.get("em")
        if emspec:
            try:
                self.em = em_catalog(emspec["name"], **emspec.get("params", {}))
            except GravContactError as exc:
                raise ConfigError(str(exc)) from exc
        else:
            self.em = None
        samples = raw.get("samples", {})
        self.count = int(samples.get("count", 20))
        self.seed = int(samples.get("seed", 0))
        self.ranges = samples.get("ranges")
        self.tolerances = dict(raw.get("tolerances", {}))
        for key in self.tolerances:
            if key not in IDENTITIES:
                raise ConfigError(f"unknown identity in tolerances: {key!r}")
        self.diff = DiffConfig(**raw.get("diff", {}))
        self.orbit = raw.get("orbit", {})
        self.tasks = []
        for task in raw.get("tasks", []):
            words = task.split() if isinstance(task, str) else list(task)
            if not words or words[0] not in TASK_NAMES:
                raise ConfigError(f"unknown task: {task!r} (choose from {TASK_NAMES})")
            self.tasks.append(words)
        if not self.tasks:
            raise ConfigError("config lists no tasks")

    def sample(self, count=None):
        return sample_phase_points(self.metric, self.scales, count or self.count,
                                   self.seed, self.ranges)


def _task_check_structures(sc: Scenario, args: list[str]) -> list[dict]:
    points = sc.sample()
    reports = verify.normalization_suite(sc.metric, sc.scales, points,
                                         sc.tolerances.get("velocity-normalization"),
                                         seed=sc.seed)
    reports += verify.contact_suite(sc.metric, sc.scales, points, sc.diff,
                                    sc.tolerances, seed=sc.seed)
    reports += verify.jacobi_suite(sc.metric, sc.scales, points, sc.diff,
                                   sc.tolerances.get("flow-bivector-bracket"),
                                   seed=sc.seed)
    return reports


def _task_check_killing(sc: Scenario, args: list[str]) -> list[dict]:
    names = args or None
    if names:
        catalog = killing_catalog(sc.metric, sc.scales)
        for name in names:
            if name not in catalog:
                raise ConfigError(f"unknown Killing field {name!r} for {sc.metric.name}; "
                                  f"have {sorted(catalog)}")
    return verify.killing_suite(sc.metric, sc.scales, sc.sample(), names, sc.diff,
                                sc.tolerances.get("killing-residual"),
                                sc.tolerances.get("killing-closure"), seed=sc.seed)


def _task_build_symmetry(sc: Scenario, args: list[str]) -> list[dict]:
    if len(args) != 1:
        raise ConfigError("build-symmetry takes exactly one Killing field name")
    name = args[0]
    if name not in killing_catalog(sc.metric, sc.scales):
        raise ConfigError(f"unknown Killing field {name!r} for {sc.metric.name}")
    return verify.symmetry_suite(sc.metric, sc.scales, name, sc.sample(), sc.diff,
                                 sc.tolerances, seed=sc.seed)


def _task_verify_homomorphism(sc: Scenario, args: list[str]) -> list[dict]:
    if len(args) != 2:
        raise ConfigError("verify-homomorphism takes two Killing field names")
    catalog = killing_catalog(sc.metric, sc.scales)
    for name in args:
        if name not in catalog:
            raise ConfigError(f"unknown Killing field {name!r} for {sc.metric.name}")
    return verify.homomorphism_suite(sc.metric, sc.scales, args[0], args[1],
                                     sc.sample(), sc.diff, sc.tolerances, seed=sc.seed)


def _task_integrate(sc: Scenario, args: list[str], out_dir: Path) -> list[dict]:
    orbit = sc.orbit
    if "p0" not in orbit:
        raise ConfigError("integrate needs an orbit spec: {p0: {x, v}, s_end, ...}")
    try:
        p0 = PhasePoint(orbit["p0"]["x"], orbit["p0"]["v"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad orbit p0: {exc}") from exc
    s_end = float(orbit.get("s_end", 10.0))
    rtol = float(orbit.get("rtol", 1e-10))
    traj = integrate(sc.metric, sc.scales, p0, s_end, em=sc.em, rtol=rtol,
                     diff=sc.diff)
    catalog = killing_catalog(sc.metric, sc.scales)
    names = orbit.get("monitors", sorted(catalog))
    for name in names:
        if name not in catalog:
            raise ConfigError(f"unknown monitor field {name!r}")
    drift = monitor(traj, {n: catalog[n] for n in names}, sc.metric, sc.scales, sc.diff)
    write_csv(traj, out_dir / "trajectory.csv")
    tol = sc.tolerances.get("monitor-drift", IDENTITIES["monitor-drift"][1])
    report = make_report("monitor-drift", sc.metric.name, sc.metric.params,
                         [drift[n]["drift"] for n in names], tol, seed=sc.seed,
                         monitors={n: drift[n] for n in names},
                         samples=len(traj), s_end=s_end, rtol=rtol,
                         exited=traj.exited, exit_reason=traj.exit_reason)
    return [report]


def _task_verify_em(sc: Scenario, args: list[str]) -> list[dict]:
    if sc.em is None:
        raise ConfigError("verify-em needs an em field in the config")
    if sc.scales.q == 0.0:
        raise ConfigError("verify-em needs a nonzero charge in scales.q")
    return verify.em_suite(sc.metric, sc.scales, sc.em, sc.sample(), sc.diff,
                           sc.tolerances, seed=sc.seed)


def run_scenario(config_path: str, out_dir: str | None = None) -> int:
    """Execute a scenario config; returns the process exit code."""
    try:
        sc = Scenario(_load_config(config_path))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(out_dir or os.environ.get("GRAVCONTACT_OUT", "reports"))
    all_reports = []
    try:
        for words in sc.tasks:
            name, args = words[0], words[1:]
            if name == "check-structures":
                reports = _task_check_structures(sc, args)
            elif name == "check-killing":
                reports = _task_check_killing(sc, args)
            elif name == "build-symmetry":
                reports = _task_build_symmetry(sc, args)
            elif name == "verify-homomorphism":
                reports = _task_verify_homomorphism(sc, args)
            elif name == "integrate":
                reports = _task_integrate(sc, args, out)
            else:
                reports = _task_verify_em(sc, args)
            slug = "-".join(words).replace("/", "_")
            write_json({"task": " ".join(words), "seed": sc.seed, "reports": reports},
                       out / f"{slug}.json")
            all_reports += reports
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GravContactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = [r for r in all_reports if not r["pass"]]
    for r in all_reports:
        status = "pass" if r["pass"] else "FAIL"
        ident = r["identity"] + (f" [{r['field']}]" if "field" in r else "")
        print(f"{status:4s}  {ident:40s} max={r['max_residual']:.3e} tol={r['tolerance']:.1e}")
    print(f"{len(all_reports) - len(failed)}/{len(all_reports)} identities within tolerance; "
          f"reports in {out}")
    return 1 if failed else 0


def list_catalog(kind: str, metric_name: str | None = None) -> int:
    """Print a stable sorted listing of a catalog."""
    if kind == "metrics":
        for name in sorted(METRIC_NAMES):
            params = {"minkowski": "", "schwarzschild": "M, margin",
                      "kerr": "M, a, margin"}[name]
            print(f"{name:15s} parameters: {params or 'none'}")
        return 0
    if kind == "killing-fields":
        names = [metric_name] if metric_name else sorted(METRIC_NAMES)
        for mname in names:
            try:
                metric = metric_catalog(mname, **({"M": 1.0, "a": 0.5} if mname == "kerr" else {}))
                catalog = killing_catalog(metric)
            except GravContactError as exc:
                print(f"usage error: {exc}", file=sys.stderr)
                return 2
            for fname in sorted(catalog):
                K = catalog[fname]
                print(f"{mname:15s} {fname:10s} degree {K.degree}  {K.description}")
        return 0
    if kind == "em-fields":
        descriptions = {"constant": "uniform electric/magnetic field (E, B)",
                        "coulomb": "radial electric field of charge Q"}
        for name in sorted(EM_NAMES):
            print(f"{name:15s} {descriptions[name]}")
        return 0
    if kind == "identities":
        for name in sorted(IDENTITIES):
            desc, tol = IDENTITIES[name]
            print(f"{name:28s} tol {tol:8.0e}  {desc}")
        return 0
    print(f"usage error: unknown catalog kind {kind!r}; "
          "choose from metrics, killing-fields, em-fields, identities", file=sys.stderr)
    return 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gravcontact",
        description="verify gravitational contact phase structures and their hidden symmetries")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config", help="path to a JSON scenario config")
    p_run.add_argument("--out", default=None, help="output directory for reports")
    p_list = sub.add_parser("list", help="list a catalog")
    p_list.add_argument("kind", help="metrics | killing-fields | em-fields | identities")
    p_list.add_argument("metric", nargs="?", default=None,
                        help="restrict killing-fields to one metric")
    ns = parser.parse_args(argv)
    if ns.command == "run":
        return run_scenario(ns.config, ns.out)
    return list_catalog(ns.kind, ns.metric)


if __name__ == "__main__":
    sys.exit(main())
