"""Command-line interface: ``higher-qbessel {eval,table,verify,solve}``.

Settings are merged in this order, later wins: built-in defaults, a
``key=value`` file given by ``--config``, ``HQB_*`` environment variables
(``HQB_Q``, ``HQB_ALPHA``, ...), command-line flags.

Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .errors import NonConvergence, QBesselError
from .qbessel import BesselSpec, j_alpha
from .qcalc import LatticeFunction, lattice_index
from .qcore import QBase, Tolerance
from .qheat import HeatPolySpec, R_function, heat_poly, heat_residual, kernel_K, solve_heat
from .qspecial import E_q, HyperSpec, cos_r, e_q, phi_delta, sin_rl
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3
ENV_PREFIX = "HQB_"
TARGETS = ("jalpha", "cosr", "sinrl", "heatpoly", "kernel", "Rfunc", "eq", "Eq", "phi")
TIMED = ("heatpoly", "kernel")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    q: float = 0.5
    r: int = 2
    delta: float = 1.0
    alpha: Optional[tuple] = None
    k_index: int = 1
    tol: float = 1e-15
    kmin: int = 0
    kmax: int = 5
    tkmin: int = 0
    tkmax: int = 0
    csv: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.alpha is None:
            self.alpha = tuple(0.0 for _ in range(self.r - 1))
        try:
            HeatPolySpec.make(self.q, self.r, self.delta, self.alpha, self.k_index)
            Tolerance(rel_tol=self.tol)
        except QBesselError as e:
            raise ConfigError(str(e)) from None
        if self.kmin > self.kmax or self.tkmin > self.tkmax:
            raise ConfigError("lattice window needs kmin <= kmax and tkmin <= tkmax")
        return self

    @property
    def spec(self) -> BesselSpec:
        return BesselSpec.make(self.q, self.r, self.delta, self.alpha)

    @property
    def hspec(self) -> HeatPolySpec:
        return HeatPolySpec(self.spec, self.k_index)

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(rel_tol=self.tol)


_KEYS = {f.name: f for f in fields(RunConfig)}


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _convert(key: str, raw: str):
    key = key.strip().lower().replace("-", "_")
    if key not in _KEYS:
        raise ConfigError(f"unknown setting {key!r}")
    raw = raw.strip()
    try:
        if key == "alpha":
            return key, _floats(raw)
        if key == "csv":
            return key, raw
        if key in ("r", "k_index", "kmin", "kmax", "tkmin", "tkmax"):
            return key, int(raw)
        return key, float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    for no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        k, v = line.split("=", 1)
        try:
            key, val = _convert(k, v)
        except ConfigError as e:
            raise ConfigError(f"{path}:{no}: {e}") from None
        out[key] = val
    return out


def read_env(environ) -> dict:
    out = {}
    for name, raw in environ.items():
        if name.startswith(ENV_PREFIX):
            key, val = _convert(name[len(ENV_PREFIX):], raw)
            out[key] = val
    return out


def build_config(args: argparse.Namespace, environ=None) -> RunConfig:
    merged = {}
    if args.config:
        merged.update(read_config_file(args.config))
    merged.update(read_env(os.environ if environ is None else environ))
    for key in _KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return RunConfig(**merged).validate()


# --- output ------------------------------------------------------------------------


def fmt(v) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def write_csv_atomic(path: Optional[str], header: Sequence[str], rows) -> None:
    """Write all rows to a temporary file next to ``path`` and rename it into place;
    nothing is left behind if a row fails.  ``path=None`` writes to stdout."""
    if path is None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
        sys.stdout.write(buf.getvalue())
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=folder)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow(row)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- evaluation --------------------------------------------------------------------


def evaluate(cfg: RunConfig, target: str, x: float, t: Optional[float], opts) -> tuple[float, int, float]:
    """``(value, terms, tail)`` for one point."""
    tol = cfg.tolerance
    base = QBase(cfg.q, cfg.r, cfg.delta)
    if target in TIMED and t is None:
        raise ConfigError(f"{target} needs --t")
    if target == "jalpha":
        sv = j_alpha(cfg.spec, x, tol, full=True)
    elif target == "cosr":
        sv = cos_r(x, base, tol, full=True)
    elif target == "sinrl":
        sv = sin_rl(x, opts.l, base, tol, full=True)
    elif target == "eq":
        sv = e_q(x, cfg.q, tol, full=True)
    elif target == "Eq":
        sv = E_q(x, cfg.q, tol, full=True)
    elif target == "Rfunc":
        sv = R_function(cfg.hspec, x, tol, full=True)
    elif target == "phi":
        hs = HyperSpec(_floats(opts.num or ""), _floats(opts.den or ""), cfg.delta, cfg.q)
        sv = phi_delta(hs, x, tol, full=True)
    elif target == "heatpoly":
        return float(heat_poly(cfg.hspec, opts.n, x, t)), opts.n + 1, 0.0
    elif target == "kernel":
        sv = kernel_K(cfg.hspec, x, t, tol, full=True)
    else:
        raise ConfigError(f"unknown target {target!r}")
    return float(np.real(sv.value)), int(sv.terms), float(sv.tail)


def cmd_eval(cfg: RunConfig, args) -> int:
    t = args.t
    for x in _floats(args.x):
        val, terms, tail = evaluate(cfg, args.target, x, t, args)
        print(fmt(val))
        print(f"terms={terms} tail={fmt(tail)}", file=sys.stderr)
    return EXIT_OK


def _rows_table(cfg: RunConfig, args):
    timed = args.target in TIMED
    Q = cfg.q**cfg.r
    for k in range(cfg.kmin, cfg.kmax + 1):
        x = cfg.q**k
        if timed:
            ts = [args.t] if args.t is not None else [Q**j for j in range(cfg.tkmin, cfg.tkmax + 1)]
            for t in ts:
                val, terms, tail = evaluate(cfg, args.target, x, t, args)
                yield [fmt(x), fmt(t), fmt(val), terms, fmt(tail)]
        else:
            val, terms, tail = evaluate(cfg, args.target, x, None, args)
            yield [fmt(x), fmt(val), terms, fmt(tail)]


def cmd_table(cfg: RunConfig, args) -> int:
    header = ["x", "t", "value", "terms", "tail"] if args.target in TIMED else ["x", "value", "terms", "tail"]
    write_csv_atomic(cfg.csv, header, _rows_table(cfg, args))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    checks = run_suite(args.suite, cfg.q, cfg.r, cfg.delta, cfg.alpha, args.tol)
    ok = True
    for c in checks:
        ok &= c.passed
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: max_dev={c.max_dev:.3e} tol={c.tol:.1e}")
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return EXIT_OK if ok else EXIT_FAIL


def read_samples(path: str, q: float) -> LatticeFunction:
    """Parse an ``x,value`` CSV of lattice samples into a finitely supported function."""
    try:
        fh = open(path, newline="")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    atoms = {}
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["x", "value"]:
            raise ConfigError(f"{path}:1: header must be 'x,value'")
        for row in reader:
            no = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}:{no}: expected 2 fields, got {len(row)}")
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError:
                raise ConfigError(f"{path}:{no}: not a number") from None
            k = lattice_index(x, q) if x > 0 else None
            if k is None:
                raise ConfigError(f"{path}:{no}: x={row[0].strip()} is not on the lattice q^k, q={q}")
            atoms[k] = atoms.get(k, 0.0) + v
    if not atoms:
        raise ConfigError(f"{path}: no data rows")
    return LatticeFunction.from_atoms(atoms, q)


def cmd_solve(cfg: RunConfig, args) -> int:
    f = read_samples(args.input, cfg.q)
    h, tol, t = cfg.hspec, cfg.tolerance, args.t
    if not t > 0:
        raise ConfigError("solve needs --t > 0")
    u = lambda x, tt: solve_heat(h, f, x, tt, tol)  # noqa: E731

    def rows():
        for k in range(cfg.kmin, cfg.kmax + 1):
            x = cfg.q**k
            res, scale = heat_residual(h, u, x, t)
            yield [fmt(x), fmt(t), fmt(u(x, t)), fmt(res / scale if scale else res)]

    write_csv_atomic(cfg.csv, ["x", "t", "u", "residual"], rows())
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="key=value settings file")
    g.add_argument("--q", type=float, help="base q in (0,1) (default 0.5)")
    g.add_argument("--r", type=int, help="order r >= 2 (default 2)")
    g.add_argument("--delta", type=float, help="deformation delta > 0 (default 1)")
    g.add_argument("--alpha", type=_floats, metavar="A1,A2,...", help="r-1 indices (default all 0)")
    g.add_argument("--k-index", dest="k_index", type=int, help="distinguished index k of the heat kernel")
    g.add_argument("--kmin", type=int, help="smallest lattice exponent of the x grid")
    g.add_argument("--kmax", type=int, help="largest lattice exponent of the x grid")
    g.add_argument("--tkmin", type=int, help="smallest exponent of the t grid t = (q^r)^k")
    g.add_argument("--tkmax", type=int, help="largest exponent of the t grid")
    g.add_argument("--csv", metavar="PATH", help="write CSV here instead of stdout")
    return p


def _point_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--n", type=int, default=0, help="heat polynomial degree")
    p.add_argument("--l", type=int, default=1, help="sin_{r,l} index")
    p.add_argument("--t", type=float, help="time for heatpoly / kernel")
    p.add_argument("--num", help="phi numerator exponents a1,a2,...")
    p.add_argument("--den", help="phi denominator exponents b1,b2,...")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="higher-qbessel",
        description="Evaluate, tabulate and verify higher-order q-Bessel functions and q-heat solutions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", parents=[common], help="evaluate a function at points")
    _point_args(pe)
    pe.add_argument("--x", required=True, help="point or comma-separated points")
    pe.add_argument("--tol", type=float, help="relative series tolerance (default 1e-15)")

    pt = sub.add_parser("table", parents=[common], help="tabulate on the lattice x = q^k")
    _point_args(pt)
    pt.add_argument("--tol", type=float, help="relative series tolerance (default 1e-15)")

    pv = sub.add_parser("verify", parents=[common], help="run identity checks")
    pv.add_argument("suite", help=f"one of {', '.join(list(SUITES) + ['all'])}")
    pv.add_argument("--tol", dest="verify_tol", type=float, help="replace every check threshold")

    ps = sub.add_parser("solve", parents=[common], help="solve the q-heat problem for sampled data")
    ps.add_argument("input", help="CSV with columns x,value (x on the lattice)")
    ps.add_argument("--t", type=float, required=True, help="time t > 0")
    ps.add_argument("--tol", type=float, help="relative series tolerance (default 1e-15)")
    return parser


COMMANDS = {"eval": cmd_eval, "table": cmd_table, "verify": cmd_verify, "solve": cmd_solve}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = build_config(args)
        if args.command == "verify":
            args.tol = args.verify_tol
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergence as e:
        print(f"non-convergence: {e}", file=sys.stderr)
        return EXIT_NONCONV
    except (QBesselError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
