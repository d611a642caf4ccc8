"""Command-line entry point: ``walshlab <subcommand> [flags]``.

Exit codes: 0 on success, 2 on any validation error (one line on stderr),
1 when an exact verification step fails at run time.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import collision, competitor, determinacy, experiments
from .core import BooleanFunction, Spectrum, read_wbf, spectrum, wht
from .rng import MASK64
from .svg import emit_svg

PROG = "walshlab"


class UsageError(Exception):
    """Bad flags or inputs; reported as a single line with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---- value parsing -------------------------------------------------------

def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= MASK64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return vals


def _fraction_text(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _value_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return _fraction_text(v)
    return str(v)


def _json_value(v):
    if isinstance(v, Fraction):
        return _fraction_text(v)
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)  # JSON has no infinities
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _records(fmt: str, rows: list[list[tuple[str, object]]]) -> str:
    """Render key/value records as csv (header + rows), json or ``key=value`` text."""
    if fmt == "json":
        objs = [{k: _json_value(v) for k, v in row} for row in rows]
        return json.dumps(objs[0] if len(objs) == 1 else objs, indent=2) + "\n"
    if fmt == "csv":
        head = ",".join(k for k, _ in rows[0])
        return head + "\n" + "".join(",".join(_value_text(v) for _, v in row) + "\n" for row in rows)
    return "".join(f"{k}={_value_text(v)}\n" for row in rows for k, v in row)


# ---- spectrum file formats ------------------------------------------------

def spectrum_text(s: Spectrum, fmt: str) -> str:
    degs = s.degrees()
    if fmt == "json":
        return json.dumps({"p": s.p, "coeffs": [int(v) for v in s.coeffs]}) + "\n"
    if fmt == "csv":
        return "mask,degree,coeff\n" + "".join(
            f"{j},{int(degs[j])},{int(v)}\n" for j, v in enumerate(s.coeffs))
    return f"p={s.p}\n" + "".join(f"{j} {int(v)}\n" for j, v in enumerate(s.coeffs))


def parse_spectrum(text: str) -> Spectrum:
    """Read any :func:`spectrum_text` rendering back into a Spectrum."""
    stripped = text.strip()
    if stripped.startswith("{"):
        obj = json.loads(stripped)
        p, coeffs = int(obj["p"]), [int(v) for v in obj["coeffs"]]
    elif stripped.startswith("mask,degree,coeff"):
        rows = [ln.split(",") for ln in stripped.splitlines()[1:]]
        coeffs = [int(r[2]) for r in rows]
        if [int(r[0]) for r in rows] != list(range(len(rows))):
            raise ValueError("spectrum csv masks must be 0..N-1 in order")
        p = len(coeffs).bit_length() - 1
    elif stripped.startswith("p="):
        lines = stripped.splitlines()
        p = int(lines[0][2:])
        rows = [ln.split() for ln in lines[1:]]
        if [int(r[0]) for r in rows] != list(range(len(rows))):
            raise ValueError("spectrum text masks must be 0..N-1 in order")
        coeffs = [int(r[1]) for r in rows]
    else:
        raise ValueError("unrecognized spectrum format")
    if len(coeffs) != 1 << p:
        raise ValueError(f"expected {1 << p} coefficients for p={p}, got {len(coeffs)}")
    return Spectrum(p, np.array(coeffs, dtype=np.int64))


def function_from_spectrum(s: Spectrum) -> BooleanFunction:
    """Invert the transform; rejects spectra that are not of a Boolean function."""
    vals = wht(s.coeffs)
    n = s.n
    if not np.all(np.abs(vals) == n):
        raise ValueError("coefficients are not the spectrum of a Boolean function")
    return BooleanFunction.from_signs(s.p, vals // n)


def load_function(path: str) -> BooleanFunction:
    """A WBF1 truth table, or any spectrum rendering produced by ``spectrum``."""
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith("WBF1"):
        return read_wbf(path)
    return function_from_spectrum(parse_spectrum(text))


# ---- subcommands ------------------------------------------------------------

def _need_input(args) -> BooleanFunction:
    if args.input is None:
        raise UsageError("--input is required")
    return load_function(args.input)


def cmd_spectrum(args):
    return spectrum_text(spectrum(_need_input(args)), args.format)


def cmd_certify(args):
    c = determinacy.certify_unique(_need_input(args), args.d)
    if args.format == "text":
        return c.verdict() + "\n"
    return _records(args.format, [[
        ("p", c.p), ("d", c.d), ("holds", c.holds), ("max_residual_num", c.max_residual_num),
        ("N", c.n), ("argmax_point", c.argmax_point), ("eta_hat", c.eta_hat), ("sign_agrees", c.sign_agrees),
    ]])


def cmd_bounds(args):
    return _records(args.format, [determinacy.probability_bounds(args.p, args.d, args.eta, args.omega).items()])


def cmd_thresholds(args):
    lo, hi = determinacy.thresholds(args.p, args.omega, args.eta)
    return _records(args.format, [[("p", args.p), ("omega", args.omega), ("eta", args.eta),
                                   ("d_lower", lo), ("d_upper", hi)]])


def cmd_sweep(args):
    kw = {}
    if args.config is not None:
        kw.update(experiments.parse_config(Path(args.config).read_text(encoding="utf-8")))
    for flag, key in (("p", "p_list"), ("d", "d_list"), ("samples", "samples"), ("eta", "eta"),
                      ("omega", "omega"), ("seed", "seed"), ("threads", "threads")):
        v = getattr(args, flag)
        if v is not None:
            kw[key] = v
    for flag in ("exact_enum", "anneal", "lp"):
        if getattr(args, flag):
            kw["run_" + flag] = True
    if args.no_certificate:
        kw["run_certificate"] = False
    if "seed" not in kw:
        raise UsageError("sweep requires --seed (or seed= in --config)")
    if "p_list" not in kw:
        raise UsageError("sweep requires --p (or p= in --config)")
    cells = experiments.run_sweep(experiments.SweepConfig(**kw))
    if args.format == "json":
        return json.dumps([{k: _json_value(v) for k, v in c.as_dict().items()} for c in cells], indent=2) + "\n"
    return experiments.emit_csv(cells)


def cmd_collide_exact(args):
    f = _need_input(args)
    w, exhaustive = collision.collide_exact(f, args.d, max_size=args.max_size)
    if args.format == "text":
        return w.serialize() if w else f"none ({'exhaustive' if exhaustive else 'size-limited'})\n"
    return _records(args.format, [[
        ("p", f.p), ("d", args.d), ("found", w is not None), ("exhaustive", exhaustive),
        ("size", len(w.flip_set) if w else 0),
        ("flip_set", " ".join(map(str, w.flip_set)) if w else ""),
    ]])


def cmd_collide_census(args):
    rep = collision.collide_census(args.p, args.d, args.samples, args.seed, threads=args.threads)
    if args.pairs_output:
        Path(args.pairs_output).write_text(rep.pairs_text(), encoding="utf-8")
    if args.format == "csv":
        return rep.to_csv()
    names = collision.CensusReport.HEADER.split(",")
    values = rep.csv_row().split(",")
    row = [(k, rep.log_image_bound if k == "log_image_bound" else int(v)) for k, v in zip(names, values)]
    return _records(args.format, [row])


def cmd_collide_anneal(args):
    f = _need_input(args)
    params = collision.AnnealParams(restarts=args.restarts, max_iters=args.max_iters,
                                    init_temp=args.init_temp, cooling=args.cooling, seed=args.seed)
    w = collision.collide_anneal(f, args.d, params, threads=args.threads)
    if args.format == "text":
        return w.serialize() if w else "none\n"
    return _records(args.format, [[
        ("p", f.p), ("d", args.d), ("seed", args.seed), ("found", w is not None),
        ("size", len(w.flip_set) if w else 0),
        ("flip_set", " ".join(map(str, w.flip_set)) if w else ""),
    ]])


def cmd_competitor_lp(args):
    f = _need_input(args)
    r = competitor.max_competitor(f, args.d)
    if args.witness_output and r.witness is not None:
        Path(args.witness_output).write_text(r.witness.serialize(), encoding="utf-8")
    return _records(args.format, [[
        ("p", r.p), ("d", r.d), ("optimum", r.optimum), ("unique", r.unique),
        ("exact_arithmetic", r.exact_arithmetic),
    ]])


def cmd_sign_cert(args):
    f = _need_input(args)
    c = competitor.sign_certificate(f, args.d)
    if c is None:
        if args.format == "text":
            return "infeasible\n"
        return _records(args.format, [[("p", f.p), ("d", args.d), ("feasible", False)]])
    if args.format == "text":
        return "feasible\n" + "".join(f"{m} {_fraction_text(v)}\n" for m, v in zip(c.masks, c.coeffs))
    if args.format == "json":
        return json.dumps({"p": c.p, "d": c.d, "feasible": True, "margin": _fraction_text(c.margin),
                           "masks": list(c.masks), "coeffs": [_fraction_text(v) for v in c.coeffs]},
                          indent=2) + "\n"
    return "mask,coeff\n" + "".join(f"{m},{_fraction_text(v)}\n" for m, v in zip(c.masks, c.coeffs))


def cmd_plot(args):
    if args.input is None:
        raise UsageError("--input is required")
    return emit_svg(experiments.parse_csv(Path(args.input).read_text(encoding="utf-8")))


def cmd_sample(args):
    return experiments.sample_function(args.p, args.seed, args.index).to_wbf()


# ---- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Low-degree Walsh-Fourier determinacy laboratory.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, fmt="text", formats=("csv", "json", "text")):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--output", help="write result here instead of stdout")
        sp.add_argument("--format", choices=formats, default=fmt)
        return sp

    def needs_input(sp):
        sp.add_argument("--input", help="WBF1 truth table (or a spectrum file)")

    sp = add("spectrum", cmd_spectrum, "integer Walsh spectrum of a function")
    needs_input(sp)

    sp = add("certify", cmd_certify, "truncation-residual uniqueness certificate")
    needs_input(sp)
    sp.add_argument("--d", type=int, required=True)

    sp = add("bounds", cmd_bounds, "log-space probability bounds at (p, d)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--omega", type=float, default=1.0)

    sp = add("thresholds", cmd_thresholds, "degree thresholds d_lower, d_upper")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--eta", type=float, default=0.5)

    sp = add("sweep", cmd_sweep, "Monte Carlo sweep over (p, d)", fmt="csv", formats=("csv", "json"))
    sp.add_argument("--config", help="flat key=value file; flags override it")
    sp.add_argument("--p", type=_int_list)
    sp.add_argument("--d", type=lambda t: "all" if t == "all" else _int_list(t))
    sp.add_argument("--samples", type=_positive_int)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--omega", type=float)
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--threads", type=_positive_int)
    sp.add_argument("--exact-enum", action="store_true", help="exhaustive collision search (p <= 4)")
    sp.add_argument("--anneal", action="store_true", help="annealing collision search")
    sp.add_argument("--lp", action="store_true", help="competitor LP (p <= 8)")
    sp.add_argument("--no-certificate", action="store_true")

    sp = add("collide-exact", cmd_collide_exact, "minimal Boolean collision by enumeration (p <= 4)")
    needs_input(sp)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--max-size", type=_positive_int)

    sp = add("collide-census", cmd_collide_census, "group random functions by low-degree data", fmt="csv")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--threads", type=_positive_int, default=1)
    sp.add_argument("--pairs-output", help="write colliding index pairs here")

    sp = add("collide-anneal", cmd_collide_anneal, "simulated-annealing collision search")
    needs_input(sp)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--threads", type=_positive_int, default=1)
    sp.add_argument("--restarts", type=_positive_int, default=20)
    sp.add_argument("--max-iters", type=_positive_int)
    sp.add_argument("--init-temp", type=float)
    sp.add_argument("--cooling", type=float, default=0.995)

    sp = add("competitor-lp", cmd_competitor_lp, "maximal bounded competitor (p <= 8)")
    needs_input(sp)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--witness-output", help="write the witness h (num/den per point) here")

    sp = add("sign-cert", cmd_sign_cert, "sign certificate by LP (p <= 8)")
    needs_input(sp)
    sp.add_argument("--d", type=int, required=True)

    sp = add("plot", cmd_plot, "SVG success-rate chart from a sweep CSV", fmt="text", formats=("text",))
    sp.add_argument("--input", help="sweep CSV")

    sp = add("sample", cmd_sample, "draw one seeded random function as WBF1")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--threads", type=_positive_int, default=1, help="accepted for uniformity; sampling is serial")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        text = args.func(args)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    except (UsageError, ValueError, TypeError, OSError, MemoryError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return 2
    except competitor.LPVerificationError as exc:
        print(f"{PROG}: verification failed: {exc}", file=sys.stderr)
        return 1
