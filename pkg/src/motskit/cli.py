"""Command-line front end.

    motskit catalog [--name FAMILY]
    motskit verify --metric SPEC [--data K0|KminusEpsG|KplusEpsG] [--check dec,boundary,...]
    motskit profile --kind theta|foliation|xi|spectrum|scalar --metric SPEC

Exit codes: 0 all checks pass, 2 configuration error, 3 a check failed,
4 numerical breakdown (caustic, complex principal eigenvalue, ...).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import __version__, catalog
from .catalog import CatalogEntry
from .diffgeo import scalar_curvature
from .errors import (
    DegenerateMetric,
    DomainError,
    InvalidParam,
    MotsKitError,
    NonFiniteDerivative,
    NumericalError,
    RankDeficientImmersion,
    ResidualExceeded,
    UnknownFamily,
    UnsupportedTopology,
)
from .foliation import build_normal_foliation, evolution_consistency, theta_profile, theta_rows, verify_splitting
from .hypersurface import null_expansion
from .initial_data import InitialDataSet, dec_check, make_umbilic_data, time_symmetric
from .obata import cap_residual, jacobi_closed_form, jacobi_growth_check, profile_rows, reconstruct_and_verify, \
    solve_warp_ode
from .report import csv_text, json_text, write_atomic
from .stability import assemble_L, principal_eigenvalue

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_NUMERIC = 0, 2, 3, 4
DATA_CHOICES = ("K0", "KminusEpsG", "KplusEpsG")
CHECKS = ("dec", "scalar", "boundary", "stability", "splitting", "evolution", "obata")
_NUMERIC = (NumericalError, DegenerateMetric, NonFiniteDerivative, RankDeficientImmersion, DomainError)
_CONFIG = (InvalidParam, UnknownFamily, UnsupportedTopology)


@dataclass(frozen=True)
class RunConfig:
    command: str
    metric_spec: str
    data_spec: str
    eps: float
    checks: tuple[str, ...]
    grid: int
    tol: float
    seed: int
    output: str | None
    format: str


class ConfigError(MotsKitError):
    pass


# -- configuration ------------------------------------------------------------------
def _default_data(entry: CatalogEntry) -> tuple[str, float]:
    if entry.name == "spatial_schwarzschild":
        return "K0", 0.0
    if entry.name == "warped":
        s = entry.params["sign"]
        if s == 0:
            return "K0", 0.0
        return ("KminusEpsG" if s > 0 else "KplusEpsG"), abs(s)
    return "KminusEpsG", 1.0


def _default_checks(entry: CatalogEntry) -> tuple[str, ...]:
    if entry.name == "warped":
        base = ("dec", "boundary", "stability", "splitting", "evolution")
        return base + (("obata",) if entry.params["sign"] != 0 else ())
    if entry.name == "hyperbolic_cap":
        return ("dec", "obata")
    return ("dec", "boundary", "splitting")


def make_ids(entry: CatalogEntry, data: str, eps: float) -> InitialDataSet:
    if data == "K0" or eps == 0:
        return time_symmetric(entry.metric)
    return make_umbilic_data(entry.metric, eps, -1 if data == "KminusEpsG" else 1)


def build_config(args: argparse.Namespace, entry: CatalogEntry) -> RunConfig:
    data, eps = _default_data(entry)
    if args.data is not None:
        data = args.data
        eps = 1.0 if args.eps is None else args.eps
    elif args.eps is not None:
        eps = args.eps
    if eps not in (0.0, 1.0):
        raise ConfigError("eps must be 0 or 1")
    if not args.tol > 0:
        raise ConfigError("--tol must be positive")
    if not 8 <= args.grid <= 128:
        raise ConfigError("--grid must lie in [8, 128]")
    checks = _default_checks(entry) if not args.check else tuple(
        c.strip() for c in ",".join(args.check).split(",") if c.strip())
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; known: {', '.join(CHECKS)}")
    return RunConfig("verify", entry.spec, data, float(eps), checks, args.grid, args.tol, args.seed, args.out,
                     args.format)


# -- checks ---------------------------------------------------------------------------
def _check(name, value, expected, tol, provenance, passed, **extra) -> dict:
    out = {"name": name, "value": value, "expected": expected, "tol": tol, "provenance": provenance,
           "pass": bool(passed)}
    out.update(extra)
    return out


def _foliation_base(entry: CatalogEntry):
    b = entry.boundary
    return entry.boundary_surface() if b.regular else entry.level_surface(b.value * (1.0 + 1.0 / 16.0))


def _resolution(entry: CatalogEntry, grid: int) -> int:
    return grid if entry.fiber_topology.value == "torus" else max(8, grid // 2)


class Verifier:
    """Runs named checks for one catalog entry and initial data set."""

    def __init__(self, entry: CatalogEntry, ids: InitialDataSet, cfg: RunConfig):
        self.entry, self.ids, self.cfg = entry, ids, cfg
        self._fol = None

    def foliation(self):
        if self._fol is None:
            self._fol = build_normal_foliation(self.entry.metric, _foliation_base(self.entry),
                                               resolution=_resolution(self.entry, self.cfg.grid))
        return self._fol

    def dec(self) -> list[dict]:
        pts = catalog.sample_points(self.entry, 64, self.cfg.seed)
        rep = dec_check(self.ids, pts, self.cfg.tol)
        return [_check("dec_margin", rep.margin, 0.0, self.cfg.tol, "min over samples of mu - |J|; must be >= -tol",
                       rep.holds, samples=rep.samples)]

    def scalar(self) -> list[dict]:
        exp = self.entry.expectation("scalar_curvature")
        pts = catalog.sample_points(self.entry, 20, self.cfg.seed)
        dev = float(np.max(np.abs(scalar_curvature(self.entry.metric, pts) - exp.value)))
        tol = max(self.cfg.tol, exp.tol)
        return [_check("scalar_curvature_dev", dev, 0.0, tol, exp.provenance, dev < tol)]

    def boundary(self) -> list[dict]:
        out = []
        exp = self.entry.expectation("boundary_mean_curvature")
        res = _resolution(self.entry, self.cfg.grid)
        H = catalog.boundary_value(self.entry, lambda s: null_expansion(s, self.ids, s.fiber_grid(res)[0]).H)
        dev = float(np.max(np.abs(np.asarray(H) - exp.value)))
        tol = max(self.cfg.tol, exp.tol)
        out.append(_check("boundary_mean_curvature", float(np.mean(H)), exp.value, tol, exp.provenance, dev < tol,
                          max_deviation=dev))
        theta = catalog.boundary_value(self.entry,
                                       lambda s: null_expansion(s, self.ids, s.fiber_grid(res)[0]).theta)
        theta = np.asarray(theta)
        c = self.ids.umbilic_factor
        key = {0.0: "K0", -1.0: "KminusG", 1.0: "KplusG"}.get(c, "")
        try:
            texp = self.entry.expectation(f"boundary_theta_{key}")
        except KeyError:
            out.append(_check("boundary_theta_sup", float(np.max(np.abs(theta))), None, None,
                              "null expansion of the boundary for the selected data (no expectation)", True))
            return out
        dev = float(np.max(np.abs(theta - texp.value)))
        tol = max(self.cfg.tol, texp.tol)
        out.append(_check("boundary_theta", float(np.mean(theta)), texp.value, tol, texp.provenance, dev < tol,
                          max_deviation=dev))
        return out

    def stability(self) -> list[dict]:
        asm = assemble_L(self.entry.boundary_surface(), self.ids, self.cfg.grid)
        eig = principal_eigenvalue(asm)
        return [_check("principal_eigenvalue", eig.lambda1, 0.0, self.cfg.tol,
                       "boundary stability operator; stable iff lambda1 >= -tol", eig.stable(self.cfg.tol),
                       residual=eig.residual, discretization=asm.discretization_order)]

    def splitting(self) -> list[dict]:
        rep = verify_splitting(self.foliation(), self.ids, tol=self.cfg.tol)
        worst = max(rep.max_theta, rep.max_chi, rep.max_lapse_dev, rep.max_warp_dev, rep.ricci_flat_dev)
        return [_check("splitting", worst, 0.0, rep.tol, "warped product conclusion on a Gaussian foliation",
                       rep.verdict, reason=rep.reason, report=rep.to_dict())]

    def evolution(self) -> list[dict]:
        dev = evolution_consistency(self.foliation(), self.ids)
        tol = self.cfg.tol
        return [_check("evolution_consistency", dev, 0.0, tol,
                       "central difference of theta vs the evolution right-hand side", dev < tol)]

    def obata(self) -> list[dict]:
        tol = 1e-8
        if self.entry.name == "hyperbolic_cap":
            res = cap_residual(self.entry.params["n"], self.entry.params["R"], seed=self.cfg.seed)
            R = self.entry.params["R"]
            ratio = jacobi_growth_check(R, 0.1 * R, self.entry.params["n"])
            exact = jacobi_closed_form(R, 0.1 * R)
            return [_check("obata_residual_cosh", res, 0.0, tol, "analytic: f = cosh t", res < tol),
                    _check("jacobi_ratio", ratio, exact, 1e-6, "closed form sinh(R)/sinh(r0)",
                           abs(ratio - exact) < 1e-6)]
        s = self.entry.params.get("sign", 0.0)
        try:
            rec = reconstruct_and_verify(s, 1.0, T=min(3.0, 0.5 * self.entry.params.get("T", 4.0)),
                                         seed=self.cfg.seed, tol=tol)
            worst, ok = max(rec.report["obata_residual"], rec.report["shape_operator_dev"],
                            rec.report.get("sectional_dev", 0.0)), True
        except ResidualExceeded as exc:
            worst, ok = float("nan"), False
            return [_check("obata_reconstruction", worst, 0.0, tol, str(exc), ok)]
        return [_check("obata_reconstruction", worst, 0.0, tol, "xi(t) = e^(sign t) from a = sign, |grad f| = 1",
                       ok)]

    def run(self, name: str) -> list[dict]:
        return getattr(self, name)()


def _reason(checks: list[dict]) -> str:
    for c in checks:
        if not c["pass"]:
            return c.get("reason", f"check {c['name']} failed")
    return "all checks passed"


def cmd_verify(args) -> int:
    entry = catalog.from_spec(args.metric)
    cfg = build_config(args, entry)
    ids = make_ids(entry, cfg.data_spec, cfg.eps)
    v = Verifier(entry, ids, cfg)
    checks: list[dict] = []
    status, reason = EXIT_OK, None
    try:
        for name in cfg.checks:
            checks.extend(v.run(name))
    except _NUMERIC as exc:
        status, reason = EXIT_NUMERIC, f"{type(exc).__name__}: {exc}"
    if status == EXIT_OK:
        passed = all(c["pass"] for c in checks)
        status = EXIT_OK if passed else EXIT_CHECK
        reason = _reason(checks)
    verdict = {EXIT_OK: "pass", EXIT_CHECK: "fail", EXIT_NUMERIC: "error"}[status]
    report = {"tool": "motskit", "version": __version__, "config": asdict(cfg), "checks": checks,
              "verdict": verdict, "reason": reason}
    if cfg.format == "csv":
        rows = [[c["name"], c["value"], c["expected"], c["tol"], c["pass"], c["provenance"]] for c in checks]
        text = csv_text(["name", "value", "expected", "tol", "pass", "provenance"], rows)
    else:
        text = json_text(report)
    write_atomic(cfg.output, text)
    return status


def cmd_catalog(args) -> int:
    names = catalog.FAMILIES
    if args.name:
        name, _ = catalog.parse_spec(args.name)
        names = (name,)
    entries = {e.name: e for e in catalog.default_entries()}
    listing = []
    for name in names:
        e = catalog.from_spec(args.name) if args.name and ":" in args.name else entries[name]
        listing.append({
            "name": e.name, "spec": e.spec, "params": e.params, "dimension": e.dim,
            "fiber": e.fiber_topology.value,
            "boundary": {"coordinate": e.boundary.coordinate, "value": e.boundary.value,
                         "regular": e.boundary.regular},
            "expectations": [{"quantity": x.quantity, "value": x.value, "tol": x.tol, "provenance": x.provenance}
                             for x in e.expectations],
        })
    if args.format == "csv":
        rows = [[d["name"], x["quantity"], x["value"], x["tol"], x["provenance"]]
                for d in listing for x in d["expectations"]]
        text = csv_text(["family", "quantity", "value", "tol", "provenance"], rows)
    else:
        text = json_text({"tool": "motskit", "version": __version__, "families": listing})
    write_atomic(args.out, text)
    return EXIT_OK


def _range(arg: str | None, default: tuple[float, float]) -> tuple[float, float]:
    if not arg:
        return default
    try:
        lo, hi = (float(v) for v in arg.split(","))
    except ValueError as exc:
        raise ConfigError(f"--range expects 'lo,hi', got {arg!r}") from exc
    if not lo < hi:
        raise ConfigError("--range needs lo < hi")
    return lo, hi


def cmd_profile(args) -> int:
    kind = args.kind
    if kind == "xi":
        sol, _ = solve_warp_ode(args.a, args.grad_norm)
        lo, hi = _range(args.range, (0.0, 3.0))
        header, rows = profile_rows(sol, np.linspace(lo, hi, args.samples))
        header = ["t [L]", "xi [1]", "f [1]"]
        write_atomic(args.out, csv_text(header, rows))
        return EXIT_OK
    entry = catalog.from_spec(args.metric)
    data, eps = _default_data(entry)
    if args.data is not None:
        data, eps = args.data, (1.0 if args.eps is None else args.eps)
    ids = make_ids(entry, data, eps)
    if kind == "theta":
        lo0, hi0 = entry.level_range
        if not entry.boundary.regular:
            lo0 = entry.boundary.value * 1.01
        lo, hi = _range(args.range, (lo0, hi0))
        rs = np.linspace(lo, hi, args.samples)
        rows = []
        for r in rs:
            s = entry.level_surface(float(r))
            geo = null_expansion(s, ids, s.fiber_grid(8)[0])
            rows.append([r, float(np.mean(geo.theta)), float(np.mean(geo.H))])
        c = entry.boundary.coordinate
        text = csv_text([f"{c} [L]", "theta [1/L]", "H [1/L]"], rows)
    elif kind == "scalar":
        lo, hi = _range(args.range, entry.level_range)
        rs = np.linspace(lo, hi, args.samples)
        if not entry.boundary.regular:
            rs = rs[rs > entry.boundary.value]
        pts = catalog.sample_points(entry, len(rs), args.seed)
        if entry.name == "spatial_schwarzschild":
            pts = pts / np.linalg.norm(pts, axis=-1, keepdims=True) * rs[:, None]
        else:
            pts[:, 0] = rs
        S = scalar_curvature(entry.metric, pts)
        text = csv_text([f"{entry.boundary.coordinate} [L]", "S [1/L^2]"], np.column_stack([rs, S]))
    elif kind == "foliation":
        f = build_normal_foliation(entry.metric, _foliation_base(entry), resolution=_resolution(entry, args.grid))
        header, rows = theta_rows(f, theta_profile(f, ids))
        text = csv_text(["t [L]", "theta_min [1/L]", "theta_max [1/L]", "theta_mean [1/L]"], rows)
    elif kind == "spectrum":
        eig = principal_eigenvalue(assemble_L(entry.boundary_surface(), ids, args.grid))
        ev = eig.spectrum[: args.samples]
        text = csv_text(["index", "re [1/L^2]", "im [1/L^2]"],
                        [[i, float(z.real), float(z.imag)] for i, z in enumerate(ev)])
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(kind)
    write_atomic(args.out, text)
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="motskit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"motskit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, metric_required: bool):
        sp.add_argument("--metric", required=metric_required, help='catalog spec, e.g. "warped:eps=1"')
        sp.add_argument("--data", choices=DATA_CHOICES, default=None)
        sp.add_argument("--eps", type=float, default=None, help="epsilon for the umbilic data (0 or 1)")
        sp.add_argument("--grid", type=int, default=32)
        sp.add_argument("--tol", type=float, default=1e-6)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output path (stdout if omitted)")

    c = sub.add_parser("catalog", help="list model families and expectations")
    c.add_argument("--name", default=None)
    c.add_argument("--out", default=None)
    c.add_argument("--format", choices=("json", "csv"), default="json")

    v = sub.add_parser("verify", help="run checks and write a report")
    common(v, True)
    v.add_argument("--check", action="append", default=[], help=f"comma list from {', '.join(CHECKS)}")
    v.add_argument("--format", choices=("json", "csv"), default="json")

    pr = sub.add_parser("profile", help="emit a CSV profile")
    common(pr, False)
    pr.add_argument("--kind", choices=("theta", "foliation", "xi", "spectrum", "scalar"), required=True)
    pr.add_argument("--range", default=None, help="lo,hi")
    pr.add_argument("--samples", type=int, default=50)
    pr.add_argument("--a", type=float, default=1.0)
    pr.add_argument("--grad-norm", dest="grad_norm", type=float, default=1.0)
    return p


_COMMANDS: dict[str, Callable] = {"catalog": cmd_catalog, "verify": cmd_verify, "profile": cmd_profile}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "profile" and args.kind != "xi" and not args.metric:
        print("motskit: error: --metric is required for this profile", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, *_CONFIG) as exc:
        print(f"motskit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC as exc:
        print(f"motskit: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
