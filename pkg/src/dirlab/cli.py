"""Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed, 2 numerical-quality
failure (e.g. disagreeing quadrature routes), 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import composition, disk, extremal
from .composition import QuadratureConfig
from .errors import DirlabError, QuadratureError, SpecError
from .psi import NONNEGATIVE, PsiSpec, canonical_domain, parse_psi
from .reverse_cauchy import SearchConfig, estimate_constant, interval_ratio

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NUMERICS = 2
EXIT_USAGE = 64

COMMANDS = ("constant", "energy", "ratio", "verify", "extremal", "selftest")

ENERGY_COLUMNS = ("h", "psi", "lhs", "rhs", "ratio", "C", "pass")
CSV_HELP = f"""\
CSV columns
  constant:        value, a, b, domain, evaluations
  ratio:           a, b, mean_psi, mean_psi_sq, ratio
  energy, verify:  {", ".join(ENERGY_COLUMNS)}
  extremal:        {", ".join(extremal.ExtremalSweepRow.CSV_COLUMNS)}
JSON output is a superset of the CSV fields.

Boundary data (--h)
  cos:K  sin:K  const:C               single modes / constants
  trig:MEAN;A1,B1;A2,B2;...           MEAN + sum_n A_n cos(n t) + B_n sin(n t)
  csv:FILE  (alias fourier:FILE)      one sample per line, row count = grid size
  stepramp:a=0,b=1,arc=0:3.14159,eps=0.19
"""


class UsageError(DirlabError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    psi: PsiSpec | None = None
    h: str | None = None
    domain: str = "whole_line"
    constant: str = "auto"
    resolution: QuadratureConfig = field(default_factory=QuadratureConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    output: str | None = None
    fmt: str = "json"
    a: float | None = None
    b: float | None = None
    arc: tuple[float, float] = (0.0, math.pi)
    eps_from: float = math.pi * 2**-4
    eps_to: float = math.pi * 2**-12
    random: int = 0
    seed: int = 0


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dirlab", description=__doc__,
                     epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, psi=True):
        if psi:
            p.add_argument("--psi", required=True, help="power:ALPHA | const:C | pwl:t,v;t,v[@nonneg][|N=level]")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")

    def grids(p):
        p.add_argument("--radial", type=int, default=QuadratureConfig.radial_points)
        p.add_argument("--angular", type=int, default=QuadratureConfig.angular_points)
        p.add_argument("--grid", type=int, default=QuadratureConfig.boundary_grid,
                       help="boundary grid size M (power of two)")

    p = sub.add_parser("constant", help="best reverse-Cauchy constant of Psi")
    common(p)
    p.add_argument("--domain", default="whole", help="whole | nonneg")
    p.add_argument("--scan", type=int, default=SearchConfig.scan_points)
    p.add_argument("--refine", type=int, default=SearchConfig.refine_iters)
    p.add_argument("--bound", type=float, default=SearchConfig.interval_bound)

    p = sub.add_parser("ratio", help="mean(Psi^2)/mean(Psi)^2 on one interval")
    common(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("energy", help="D[Phi o Ph] and D[P(Phi o h)]")
    common(p)
    p.add_argument("--h", required=True)
    grids(p)

    p = sub.add_parser("verify", help="check D[P(Phi o h)] <= D[Phi o Ph] <= C D[P(Phi o h)]")
    common(p)
    p.add_argument("--h", help="boundary data (omit with --random)")
    p.add_argument("--C", dest="constant", default="auto", help="number or 'auto'")
    p.add_argument("--random", type=int, default=0, help="check N seeded random trig polynomials")
    p.add_argument("--seed", type=int, default=0)
    grids(p)

    p = sub.add_parser("extremal", help="step/ramp sharpness sweep")
    common(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--arc", default="0:3.141592653589793", help="START:END in radians")
    p.add_argument("--eps-from", type=float, default=math.pi * 2**-4)
    p.add_argument("--eps-to", type=float, default=math.pi * 2**-12)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--output", "-o")
    return parser


def _positive(name, value):
    if value < 1:
        raise UsageError(f"--{name} must be positive, got {value}")
    return value


def parse_args(argv) -> RunConfig:
    ns = _build_parser().parse_args(list(argv))
    cfg = RunConfig(command=ns.command, output=getattr(ns, "output", None))
    if ns.command == "selftest":
        return cfg
    cfg.fmt = ns.format
    try:
        cfg.psi = parse_psi(ns.psi)
        if ns.command == "constant":
            cfg.domain = canonical_domain(ns.domain)
            cfg.search = SearchConfig(_positive("scan", ns.scan), _positive("refine", ns.refine),
                                      ns.bound)
        if ns.command in ("ratio", "extremal"):
            cfg.a, cfg.b = ns.a, ns.b
        if ns.command in ("energy", "verify"):
            cfg.h = ns.h
            cfg.resolution = QuadratureConfig(_positive("radial", ns.radial),
                                              _positive("angular", ns.angular),
                                              _positive("grid", ns.grid))
            if ns.grid > disk.max_grid_size():
                raise UsageError(f"--grid {ns.grid} exceeds DIRLAB_MAX_M={disk.max_grid_size()}")
            if ns.h is not None:
                parse_boundary(ns.h, cfg.resolution.boundary_grid)
        if ns.command == "verify":
            cfg.constant = ns.constant
            if ns.constant != "auto":
                try:
                    float(ns.constant)
                except ValueError:
                    raise UsageError(f"--C must be a number or 'auto', got {ns.constant!r}") from None
            cfg.random, cfg.seed = ns.random, ns.seed
            if (ns.h is None) == (ns.random == 0):
                raise UsageError("verify needs exactly one of --h and --random")
        if ns.command == "extremal":
            cfg.arc = _parse_arc(ns.arc)
            cfg.eps_from, cfg.eps_to = ns.eps_from, ns.eps_to
            if not 0 < ns.eps_to <= ns.eps_from:
                raise UsageError("need 0 < --eps-to <= --eps-from")
    except (SpecError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from exc
    return cfg


def _parse_arc(text: str) -> tuple[float, float]:
    try:
        start, end = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--arc must be START:END, got {text!r}") from None
    return start, end


def parse_boundary(text: str, m: int) -> disk.BoundaryFunction:
    kind, sep, body = text.partition(":")
    if not sep:
        raise SpecError(f"boundary spec {text!r} is not '<kind>:<params>'")
    kind = kind.strip().lower()
    try:
        if kind in ("cos", "sin"):
            k = int(body)
            coeffs = [0.0] * (k - 1) + [1.0]
            if k < 1:
                raise SpecError("mode number must be >= 1")
            return disk.BoundaryFunction.trig(m, **{kind: coeffs})
        if kind == "const":
            return disk.BoundaryFunction.trig(m, mean=float(body))
        if kind == "trig":
            groups = body.split(";")
            cos, sin = [], []
            for g in groups[1:]:
                c, s = g.split(",")
                cos.append(float(c))
                sin.append(float(s))
            return disk.BoundaryFunction.trig(m, mean=float(groups[0]), cos=cos, sin=sin)
        if kind in ("csv", "fourier"):
            if not os.path.exists(body):
                raise SpecError(f"boundary file {body!r} does not exist")
            return disk.read_boundary_csv(body)
        if kind == "stepramp":
            spec = parse_step_ramp(body)
            return extremal.make_step_ramp(spec, m)
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed boundary spec {text!r}: {exc}") from exc
    raise SpecError(f"unknown boundary kind {kind!r}")


def parse_step_ramp(body: str) -> extremal.StepRampData:
    fields = dict(item.split("=", 1) for item in body.split(","))
    arc = _parse_arc(fields.get("arc", "0:3.141592653589793"))
    return extremal.StepRampData(float(fields["a"]), float(fields["b"]), float(fields["eps"]), arc)


def _resolve_constant(cfg: RunConfig) -> float:
    if cfg.constant != "auto":
        return float(cfg.constant)
    domain = NONNEGATIVE if cfg.psi.domain == NONNEGATIVE else "whole_line"
    return estimate_constant(cfg.psi, domain).value


def _emit(cfg: RunConfig, rows: list[dict], columns, summary: dict | None = None):
    if cfg.fmt == "json":
        payload = rows[0] if len(rows) == 1 and summary is None else {"rows": rows}
        if summary is not None:
            payload["summary"] = summary
        text = json.dumps(_finite(payload), indent=2, default=_json_default, allow_nan=False) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c) for c in columns])
        text = buf.getvalue()
        if summary is not None:
            text += "# " + json.dumps(_finite(summary), default=_json_default, allow_nan=False) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if hasattr(obj, "item"):
        return _finite(obj.item())
    return float(obj)


def _finite(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _energy_row(cfg, label, pair) -> dict:
    row = {"h": label, "psi": cfg.psi.to_text()}
    row.update(pair.to_dict())
    return row


def _run_verify(cfg: RunConfig) -> int:
    c = _resolve_constant(cfg)
    q = cfg.resolution
    if cfg.random:
        cases = [(f"random#{i}(seed={cfg.seed})", h)
                 for i, h in enumerate(disk.random_corpus(cfg.random, cfg.seed, q.boundary_grid))]
        if cfg.psi.domain == NONNEGATIVE:
            cases = [(label, disk.shifted_nonnegative(h)) for label, h in cases]
    else:
        cases = [(cfg.h, parse_boundary(cfg.h, q.boundary_grid))]
    rows = []
    failed = False
    for label, h in cases:
        pair = composition.verify_theorem1(cfg.psi, h, c, q)
        failed |= not pair.passed
        rows.append(_energy_row(cfg, label, pair))
    _emit(cfg, rows, ENERGY_COLUMNS)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def run(cfg: RunConfig) -> int:
    if cfg.command == "selftest":
        from . import acceptance

        lines = []

        def echo(line):
            lines.append(line)
            print(line, flush=True)

        results = acceptance.run_all(echo)
        if cfg.output:
            with open(cfg.output, "w") as fh:
                fh.write("\n".join(lines) + "\n")
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED

    if cfg.command == "constant":
        est = estimate_constant(cfg.psi, cfg.domain, cfg.search)
        _emit(cfg, [est.to_dict()], ("value", "a", "b", "domain", "evaluations"))
        return EXIT_OK

    if cfg.command == "ratio":
        r = interval_ratio(cfg.psi, cfg.a, cfg.b)
        _emit(cfg, [vars(r)], ("a", "b", "mean_psi", "mean_psi_sq", "ratio"))
        return EXIT_OK

    if cfg.command == "energy":
        h = parse_boundary(cfg.h, cfg.resolution.boundary_grid)
        pair = composition.energy_pair(cfg.psi, h, cfg.resolution)
        _emit(cfg, [_energy_row(cfg, cfg.h, pair)], ENERGY_COLUMNS)
        return EXIT_OK

    if cfg.command == "verify":
        return _run_verify(cfg)

    if cfg.command == "extremal":
        ladder = extremal.geometric_ladder(cfg.eps_from, cfg.eps_to)
        rows = extremal.sweep(cfg.psi, cfg.a, cfg.b, ladder, cfg.arc)
        fit = extremal.extrapolate(rows)
        target = interval_ratio(cfg.psi, min(cfg.a, cfg.b), max(cfg.a, cfg.b)).ratio
        out = [dict(zip(extremal.ExtremalSweepRow.CSV_COLUMNS, r.csv_values())) for r in rows]
        summary = {"intercept": fit.intercept, "residual": fit.residual,
                   "target_constant": target, "monotone": fit.monotone}
        _emit(cfg, out, extremal.ExtremalSweepRow.CSV_COLUMNS, summary)
        return EXIT_OK

    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except (DirlabError, ArithmeticError) as exc:
        print(f"error ({cfg.command}): {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except OSError as exc:
        print(f"I/O error ({cfg.command}): {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
