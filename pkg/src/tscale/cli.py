"""Command-line front end.

Exit status is 0 on success, 1 when a checked property fails and 2 for bad
input.  Tables go to standard output (or ``--out``) as CSV; numbers are
written with ``repr`` so the output does not depend on the locale.
"""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from contextlib import contextmanager
from typing import TextIO

import numpy as np

from . import exponential as ex
from . import lerch as lr
from .calculus import QuadratureConfig
from .errors import TimeScaleError
from .expr import parse_expr
from .fixtures import fixture_path
from .laplace import laplace
from .tsfile import load_timescale

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>[+-]?{_NUM})?(?:(?P<sign>[+-]?)(?P<im>{_NUM})?i)?$")


class InputError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``a``, ``bi``, ``i``, ``a+bi`` or ``a-bi`` with no spaces."""
    text = text.strip()
    m = _COMPLEX.match(text)
    if not text or not m:
        raise InputError(f"not a complex number: {text!r}")
    if not text.endswith("i"):
        return complex(float(m["re"]), 0.0)
    if m["re"] and not m["sign"]:
        if m["im"]:
            raise InputError(f"not a complex number: {text!r}")
        return complex(0.0, float(m["re"]))  # "2i": the regex reads 2 as the real part
    im = float(m["im"]) if m["im"] else 1.0
    return complex(float(m["re"] or 0.0), -im if m["sign"] == "-" else im)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            count = int(n)
            if count < 1:
                raise ValueError
            return np.linspace(float(a), float(b), count)
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"bad grid {text!r}; use start:stop:count or a,b,c") from None


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(x) for x in text.split(",")]


def _fmt(x: float) -> str:
    return repr(float(x))


def _load(args):
    path = args.ts
    if not os.path.exists(path):
        candidate = fixture_path(path)
        if candidate.exists():
            path = candidate
    try:
        T = load_timescale(path)
    except OSError as exc:
        raise InputError(f"cannot read {args.ts}: {exc.strerror}") from None
    s = T.window_start if args.s is None else args.s
    if not T.contains(s):
        raise InputError(f"--s {s} is not a point of the time scale")
    return T, T.snap(s)


def _cfg(args) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _members(T, ts) -> list[float]:
    out = []
    for t in ts:
        if not T.contains(t):
            raise InputError(f"grid point {t!r} is not a point of the time scale")
        out.append(T.snap(t))
    return out


@contextmanager
def _output(args, stdout: TextIO):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield stdout


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


# ----------------------------------------------------------------------
# verbs


def cmd_exp(args, out, err) -> int:
    T, s = _load(args)
    z = parse_complex(args.z)
    with _output(args, out) as fh:
        w = _writer(fh)
        w.writerow(["t", "re", "im"])
        for t in _members(T, parse_grid(args.t)):
            v = ex.exp_ts(T, z, t, s)
            w.writerow([_fmt(t), _fmt(v.real), _fmt(v.imag)])
    return 0


def _z_values(args) -> list[complex]:
    if args.z is not None:
        return parse_complex_list(args.z)
    if args.z_re is None:
        raise InputError("give --z or --z-re (with optional --z-im)")
    ims = parse_grid(args.z_im) if args.z_im else np.array([0.0])
    return [complex(a, b) for b in ims for a in parse_grid(args.z_re)]


def cmd_laplace(args, out, err) -> int:
    T, s = _load(args)
    f = parse_expr(args.f, args.growth).bind(T, s)
    cfg = _cfg(args)
    with _output(args, out) as fh:
        w = _writer(fh)
        w.writerow(["z_re", "z_im", "re", "im", "converged"])
        for z in _z_values(args):
            r = laplace(T, f, s, z, args.growth, cfg, force=args.force)
            w.writerow([_fmt(z.real), _fmt(z.imag), _fmt(r.value.real), _fmt(r.value.imag),
                        str(r.converged).lower()])
    return 0


def cmd_monomial(args, out, err) -> int:
    T, s = _load(args)
    ts = _members(T, parse_grid(args.t))
    with _output(args, out) as fh:
        w = _writer(fh)
        w.writerow(["t", "h"])
        vals = ex.monomial_many(T, args.n, np.array(ts), s)
        for t, v in zip(ts, vals):
            w.writerow([_fmt(t), _fmt(v)])
    return 0


def cmd_lambda(args, out, err) -> int:
    T, s = _load(args)
    t = _members(T, [args.t])[0]
    xs = parse_grid(args.x)
    if (xs <= 0).any():
        raise InputError("--x values must be positive")
    with _output(args, out) as fh:
        w = _writer(fh)
        w.writerow(["x", "lambda", "limit"])
        lim = ex.lambda_limit(T, t, s)
        for x in xs:
            w.writerow([_fmt(x), _fmt(ex.lambda_fn(T, float(x), t, s)), _fmt(lim)])
    return 0


def _kv(fh, pairs):
    for k, v in pairs:
        fh.write(f"{k}={v}\n")


def _report_pairs(r: lr.NullReport):
    return [("verdict", r.verdict), ("max_cumulative", _fmt(r.max_cumulative)),
            ("worst_node", _fmt(r.worst_node)), ("nodes_checked", r.nodes_checked),
            ("tol", _fmt(r.tol))]


def _t_max(args, T, s) -> float:
    if args.t_max is not None:
        return _members(T, [args.t_max])[0]
    return float(T.sample(s, 16)[-1])


def cmd_null_check(args, out, err) -> int:
    T, s = _load(args)
    f = parse_expr(args.f).bind(T, s)
    report = lr.null_check(T, f, s, _t_max(args, T, s), args.tol, _cfg(args))
    with _output(args, out) as fh:
        _kv(fh, _report_pairs(report))
    return 0


def cmd_lerch(args, out, err) -> int:
    T, s = _load(args)
    f = parse_expr(args.f, args.growth).bind(T, s)
    try:
        seq = tuple(float(v) for v in args.varsigma.split(","))
    except ValueError:
        raise InputError(f"bad --varsigma {args.varsigma!r}") from None
    spec = lr.LatticeSpec(parse_complex(args.alpha), seq, args.n_max)
    v = lr.lerch_verify(T, f, s, spec, _t_max(args, T, s), args.tol, _cfg(args), args.growth)
    with _output(args, out) as fh:
        witness = "none" if v.witness is None else f"{v.witness[0]},{v.witness[1]}"
        _kv(fh, [("hypothesis_max", _fmt(v.hypothesis_max)),
                 ("hypothesis_holds", str(v.hypothesis_holds).lower()),
                 ("witness", witness), ("falsification", str(v.falsification).lower())]
            + _report_pairs(v.null_report))
        if args.lattice:
            with open(args.lattice, "w", encoding="utf-8", newline="") as lat:
                lr.write_lattice_csv(v.cells, lat)
        else:
            fh.write("\n")
            lr.write_lattice_csv(v.cells, fh)
    if v.falsification:
        err.write("lattice transforms vanish although the function is not null\n")
        return 1
    return 0


def cmd_verify(args, out, err) -> int:
    from .verify import run_checks

    results = run_checks(args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        extra = f"  {r.detail}" if r.detail and not r.passed else ""
        out.write(f"{status}  {r.module:<12} {r.name:<{width}}  {r.seconds:6.2f}s{extra}\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed}/{len(results)} properties passed\n")
    return 1 if failed else 0


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tscale", description="Laplace transforms on time scales")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, f=False, growth=False):
        sp.add_argument("--ts", required=True, help="time-scale file or shipped fixture name")
        sp.add_argument("--s", type=float, default=None, help="start point (default: window start)")
        sp.add_argument("--abs-tol", type=float, default=1e-10)
        sp.add_argument("--rel-tol", type=float, default=1e-10)
        sp.add_argument("--out", default=None, help="write to this file instead of stdout")
        if f:
            sp.add_argument("--f", required=True, help="expression in t")
        if growth:
            sp.add_argument("--growth", type=float, default=0.0,
                            help="declared exponential growth rate of f")

    sp = sub.add_parser("exp", help="tabulate e_z(t, s)")
    common(sp)
    sp.add_argument("--z", required=True)
    sp.add_argument("--t", required=True, help="grid start:stop:count or list")
    sp.set_defaults(run=cmd_exp)

    sp = sub.add_parser("laplace", help="Laplace transform over a list or grid of z")
    common(sp, f=True, growth=True)
    sp.add_argument("--z", default=None, help="comma-separated complex values")
    sp.add_argument("--z-re", default=None, help="real-part grid for a rectangle of z")
    sp.add_argument("--z-im", default=None, help="imaginary-part grid for a rectangle of z")
    sp.add_argument("--force", action="store_true", help="evaluate outside the convergence region")
    sp.set_defaults(run=cmd_laplace)

    sp = sub.add_parser("monomial", help="tabulate h_n(t, s)")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", required=True)
    sp.set_defaults(run=cmd_monomial)

    sp = sub.add_parser("lambda", help="tabulate Lambda(x; t, s) over x")
    common(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--x", required=True)
    sp.set_defaults(run=cmd_lambda)

    sp = sub.add_parser("null-check", help="decide whether f is a null function")
    common(sp, f=True)
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--tol", type=float, default=lr.DEFAULT_TOL)
    sp.set_defaults(run=cmd_null_check)

    sp = sub.add_parser("lerch", help="lattice of modulated transforms and null verdict")
    common(sp, f=True, growth=True)
    sp.add_argument("--alpha", default="1")
    sp.add_argument("--varsigma", default="1,2,3", help="increasing comma-separated sequence")
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--tol", type=float, default=lr.DEFAULT_TOL)
    sp.add_argument("--lattice", default=None, help="write the lattice CSV here")
    sp.set_defaults(run=cmd_lerch)

    sp = sub.add_parser("verify", help="run the property suite on the shipped fixtures")
    sp.add_argument("--seed", type=int, default=20240601)
    sp.set_defaults(run=cmd_verify)
    return p


def main(argv: list[str] | None = None, stdout: TextIO | None = None,
         stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.run(args, out, err)
    except (InputError, TimeScaleError, ValueError) as exc:
        err.write(f"tscale {args.verb}: {exc}\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
