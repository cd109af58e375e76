"""Command line interface.

Exit codes: 0 success, 1 VIOLATES verdict, 2 domain/validation error,
3 INCONCLUSIVE verdict, 64 usage error, 65 malformed data file, 73 I/O error.

Every subcommand accepts ``--config FILE`` (JSON object keyed by long option
names, e.g. ``{"p": "2", "phase": ["0.5:1", "0.5:7"]}``); flags given on the
command line take precedence over the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

from . import __version__
from .base import Composition
from .characterization import Verdict, check_scale_independence, default_grid
from .errors import DataFormatError, MixingError
from .fitting import DEFAULT_BRACKET, Dataset, fit_p_global, per_sample_p
from .generators import AffineLog, AffinePower, cubic_plus_linear, exp_witness
from .inversion import (
    archie_saturation,
    solve_fraction_two_phase,
    solve_phase_value,
    solve_phase_value_geometric,
)
from .mean_core import power_mean, power_mean_complex, quasi_arithmetic_mean

EXIT_OK = 0
EXIT_VIOLATES = 1
EXIT_DOMAIN = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_IOERR = 73


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- literal parsing -------------------------------------------------------

# split point between real and imaginary parts: a sign not at the start and not
# part of an exponent
_IMAG_SPLIT = re.compile(r"(?<=[0-9.])[+-]")


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, complex):
        sign = "-" if math.copysign(1.0, x.imag) < 0 else "+"
        return f"{x.real:.17g}{sign}{abs(x.imag):.17g}i"
    return f"{x:.17g}"


def parse_exponent(text) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    try:
        p = float(t)
    except ValueError:
        raise UsageError(f"bad exponent {text!r}") from None
    if math.isnan(p) or math.isinf(p):
        raise UsageError(f"bad exponent {text!r}")
    return p


def parse_real(text, name="value") -> float:
    try:
        v = float(str(text).strip())
    except ValueError:
        raise UsageError(f"bad {name} {text!r}") from None
    if math.isnan(v):
        raise UsageError(f"bad {name} {text!r}")
    return v


def parse_scalar(text):
    """Real number or ``re+imi`` / ``re-imi`` / ``imi`` complex literal."""
    t = str(text).strip().replace(" ", "")
    if not t.endswith("i"):
        return parse_real(t)
    body = t[:-1]
    cuts = list(_IMAG_SPLIT.finditer(body))
    re_part, im_part = ("0", body) if not cuts else (body[: cuts[-1].start()], body[cuts[-1].start():])
    if im_part in ("", "+", "-"):
        im_part += "1"
    try:
        return complex(float(re_part), float(im_part))
    except ValueError:
        raise UsageError(f"bad complex literal {text!r}") from None


def parse_list(text, parse=parse_real):
    if isinstance(text, (list, tuple)):
        return [parse(x) for x in text]
    items = str(text).split(",")
    if not all(s.strip() for s in items):
        raise UsageError(f"bad list {text!r}")
    return [parse(s) for s in items]


def parse_phases(specs):
    fracs, vals = [], []
    for spec in specs:
        if ":" not in str(spec):
            raise UsageError(f"phase {spec!r} must be FRACTION:VALUE")
        a, v = str(spec).split(":", 1)
        fracs.append(parse_real(a, "fraction"))
        vals.append(parse_scalar(v))
    if not fracs:
        raise UsageError("at least one --phase is required")
    return fracs, vals


def parse_generator(desc):
    """Map a generator descriptor such as ``affine-power:2,1,0.5`` to a generator."""
    d = str(desc).strip()
    kind, _, arg = d.partition(":")
    try:
        if kind == "log" and not arg:
            return AffineLog()
        if kind == "affine-log":
            a, b = parse_list(arg)
            return AffineLog(a, b)
        if kind == "power":
            return AffinePower(1.0, 0.0, parse_real(arg, "exponent"))
        if kind == "affine-power":
            a, b, p = parse_list(arg)
            return AffinePower(a, b, p)
        if kind == "witness" and arg == "cubic-plus-linear":
            return cubic_plus_linear()
        if kind == "witness" and arg == "exp":
            return exp_witness()
    except (ValueError, MixingError) as exc:
        raise UsageError(f"bad generator {desc!r}: {exc}") from None
    raise UsageError(f"unknown generator {desc!r}")


# --- commands --------------------------------------------------------------


def cmd_mix(args, out):
    if (args.p is None) == (args.generator is None):
        raise UsageError("give exactly one of --p and --generator")
    g = parse_generator(args.generator) if args.generator is not None else None
    p = parse_exponent(args.p) if args.p is not None else None
    fracs, vals = parse_phases(args.phase or [])
    t = parse_real(args.scale, "scale") if args.scale is not None else 1.0
    if not t > 0:
        raise UsageError("--scale must be positive")
    vals = [v * t for v in vals]
    comp = Composition(fracs)
    if g is not None:
        if any(isinstance(v, complex) for v in vals):
            raise UsageError("generators take real phase values only")
        result = quasi_arithmetic_mean(g, comp, vals)
    else:
        if any(isinstance(v, complex) for v in vals):
            result = power_mean_complex(p, comp, vals)
        else:
            result = power_mean(p, comp, vals)
    print(fmt(result.value), file=out)
    if result.flags:
        print("flags: " + ",".join(sorted(str(f) for f in result.flags)), file=out)
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def cmd_invert(args, out):
    if args.mode == "phase":
        _need(args, "p", "comp", "known", "target")
        p = parse_exponent(args.p)
        comp = Composition(parse_list(args.comp))
        known = parse_list(args.known, lambda s: None if str(s).strip() == "_" else parse_real(s))
        target = parse_real(args.target, "target")
        if p == 0:
            value = solve_phase_value_geometric(comp, known, target)
        else:
            value = solve_phase_value(p, comp, known, target)
    elif args.mode == "fraction":
        _need(args, "p", "sigma1", "sigma2", "target")
        value = solve_fraction_two_phase(
            parse_exponent(args.p),
            parse_real(args.sigma1),
            parse_real(args.sigma2),
            parse_real(args.target),
        )
    else:
        _need(args, "sigma", "sigma_w", "phi", "m")
        value = archie_saturation(
            parse_real(args.sigma), parse_real(args.sigma_w), parse_real(args.phi), parse_real(args.m)
        )
    print(fmt(value), file=out)
    return EXIT_OK


def cmd_fit(args, out):
    try:
        data = Dataset.from_csv(args.csv_path)
    except OSError as exc:
        raise _IOFailure(str(exc)) from None
    bracket = tuple(parse_list(args.bracket)) if args.bracket is not None else DEFAULT_BRACKET
    if len(bracket) != 2:
        raise UsageError("--bracket needs LO,HI")
    report = fit_p_global(data, bracket=bracket)
    print(f"p_hat {fmt(report.p_hat)}", file=out)
    print(f"rss {fmt(report.rss)}", file=out)
    print(f"iterations {report.iterations}", file=out)
    if args.per_sample:
        for i, outcome in per_sample_p(data):
            if isinstance(outcome, float):
                print(f"sample {i} p {fmt(outcome)}", file=out)
            else:
                hint = getattr(outcome, "hint", None)
                tail = f" {'+inf' if hint > 0 else '-inf'}" if hint is not None else ""
                print(f"sample {i} {type(outcome).__name__}{tail}", file=out)
    return EXIT_OK


def cmd_check(args, out):
    g = parse_generator(args.generator)
    grid = None
    if args.t is not None:
        grid = default_grid(g)
        grid["t"] = parse_list(args.t)
    report = check_scale_independence(g, grid)
    t, comp, vals = report.argmax_point
    print(f"generator {args.generator}", file=out)
    print(f"max_residual {fmt(report.max_abs_residual)}", file=out)
    print(
        f"argmax t={fmt(t)} comp={','.join(map(fmt, comp))} vals={','.join(map(fmt, vals))}",
        file=out,
    )
    print(f"grid_size {report.grid_size}", file=out)
    print(f"verdict {report.verdict}", file=out)
    return {
        Verdict.CONFORMS: EXIT_OK,
        Verdict.VIOLATES: EXIT_VIOLATES,
        Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[report.verdict]


def _sweep_points(args):
    if args.values is not None:
        if args.start is not None or args.stop is not None or args.steps is not None:
            raise UsageError("give either --values or --from/--to/--steps")
        parse = parse_exponent if args.variable == "p" else parse_real
        pts = parse_list(args.values, parse)
        if len(pts) < 2:
            raise UsageError("a sweep needs at least 2 points")
        return pts
    _need(args, "start", "stop", "steps")
    lo, hi = parse_real(args.start, "--from"), parse_real(args.stop, "--to")
    try:
        steps = int(str(args.steps))
    except ValueError:
        raise UsageError(f"bad --steps {args.steps!r}") from None
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if not lo < hi:
        raise UsageError("--from must be less than --to")
    # exact endpoints, and an exact midpoint for symmetric ranges
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def cmd_sweep(args, out):
    fracs, vals = parse_phases(args.phase or [])
    if any(isinstance(v, complex) for v in vals):
        raise UsageError("sweeps take real phase values only")
    var = args.variable
    frac_var = re.fullmatch(r"a([1-9][0-9]*)", var)
    if var not in ("p", "t") and not frac_var:
        raise UsageError(f"--variable must be p, t or a<k>, got {var!r}")
    if var != "p":
        _need(args, "p")
        p_fixed = parse_exponent(args.p)
    elif args.p is not None:
        raise UsageError("--p is the swept variable; drop the fixed --p")
    k = int(frac_var.group(1)) - 1 if frac_var else None
    if k is not None and k >= len(fracs):
        raise UsageError(f"{var} refers to a missing phase")
    comp = Composition(fracs)
    points = _sweep_points(args)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([var, "value", "flags"])
    for x in points:
        if var == "p":
            res = power_mean(x, comp, vals)
        elif var == "t":
            if not x > 0:
                raise UsageError("scale factors must be positive")
            res = power_mean(p_fixed, comp, [v * x for v in vals])
        else:
            if not 0 <= x <= 1:
                raise UsageError("swept fractions must lie in [0, 1]")
            rest = 1.0 - fracs[k]
            if rest <= 0:
                raise UsageError("cannot renormalize: other fractions are all zero")
            new = [x if i == k else a * (1.0 - x) / rest for i, a in enumerate(fracs)]
            res = power_mean(p_fixed, Composition.normalized(new), vals)
        w.writerow([fmt(x), fmt(res.value), ";".join(sorted(str(f) for f in res.flags))])
    text = buf.getvalue()
    if args.output in (None, "-"):
        out.write(text)
    else:
        try:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise _IOFailure(str(exc)) from None
    return EXIT_OK


class _IOFailure(Exception):
    pass


# --- parser ----------------------------------------------------------------


def _add_config(p):
    p.add_argument("--config", metavar="FILE", help="JSON file of option defaults; flags override it")


def build_parser():
    parser = _Parser(prog="powermix", description="Scale-independent (power-mean) mixing laws.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    mix = sub.add_parser("mix", help="evaluate a mixing law")
    mix.add_argument("--p", help="exponent: a number, 0 (geometric), inf or -inf")
    mix.add_argument("--generator", help="log, affine-log:A,B, power:P, affine-power:A,B,P, witness:NAME")
    mix.add_argument("--phase", action="append", metavar="FRACTION:VALUE",
                     help="one phase; VALUE may be complex as re+imi (repeatable)")
    mix.add_argument("--scale", metavar="T", help="multiply every phase value by T")
    _add_config(mix)
    mix.set_defaults(func=cmd_mix)

    inv = sub.add_parser("invert", help="solve the law for one unknown")
    modes = inv.add_subparsers(dest="mode", metavar="MODE", parser_class=_Parser)
    modes.required = True
    ph = modes.add_parser("phase", help="unknown phase value (mark it _ in --known)")
    ph.add_argument("--p")
    ph.add_argument("--comp", metavar="A1,A2,...")
    ph.add_argument("--known", metavar="S1,_,S3,...")
    ph.add_argument("--target")
    fr = modes.add_parser("fraction", help="fraction of phase 1 in a two-phase mix")
    fr.add_argument("--p")
    fr.add_argument("--sigma1")
    fr.add_argument("--sigma2")
    fr.add_argument("--target")
    ar = modes.add_parser("archie-sw", help="water saturation from Archie's equation (n = m)")
    ar.add_argument("--sigma")
    ar.add_argument("--sigma-w", dest="sigma_w")
    ar.add_argument("--phi")
    ar.add_argument("--m")
    for p in (ph, fr, ar):
        _add_config(p)
        p.set_defaults(func=cmd_invert)

    fit = sub.add_parser("fit", help="estimate the exponent from a dataset CSV")
    fit.add_argument("csv_path", help="CSV with header a1,..,an,s1,..,sn,measured")
    fit.add_argument("--per-sample", action="store_true", default=None,
                     help="also solve each sample on its own")
    fit.add_argument("--bracket", metavar="LO,HI", help="exponent search interval (default -64,64)")
    _add_config(fit)
    fit.set_defaults(func=cmd_fit)

    chk = sub.add_parser("check", help="test a generator for scale independence")
    chk.add_argument("generator", help="log, affine-log:A,B, power:P, affine-power:A,B,P, "
                                       "witness:cubic-plus-linear, witness:exp")
    chk.add_argument("--t", metavar="T1,T2,...", help="override the scale factors of the grid")
    _add_config(chk)
    chk.set_defaults(func=cmd_check)

    sw = sub.add_parser("sweep", help="tabulate the mixture value over p, t or a fraction")
    sw.add_argument("--variable", default=None, help="p, t, or a<k> (fraction k, others renormalized)")
    sw.add_argument("--from", dest="start")
    sw.add_argument("--to", dest="stop")
    sw.add_argument("--steps")
    sw.add_argument("--values", metavar="V1,V2,...")
    sw.add_argument("--p", help="fixed exponent when sweeping t or a fraction")
    sw.add_argument("--phase", action="append", metavar="FRACTION:VALUE")
    sw.add_argument("--output", "-o", help="CSV path ('-' for stdout)")
    _add_config(sw)
    sw.set_defaults(func=cmd_sweep)
    return parser


def _apply_config(args):
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest in ("command", "mode", "func", "config") or not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            try:
                _apply_config(args)
            except OSError as exc:
                raise _IOFailure(str(exc)) from None
            except json.JSONDecodeError as exc:
                raise UsageError(f"config: {exc}") from None
        if getattr(args, "variable", "unset") is None:
            args.variable = "p"
        return args.func(args, out)
    except UsageError as exc:
        print(f"powermix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataFormatError as exc:
        print(f"powermix: error: DataFormatError: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except MixingError as exc:
        print(f"powermix: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _IOFailure as exc:
        print(f"powermix: error: {exc}", file=sys.stderr)
        return EXIT_IOERR


if __name__ == "__main__":
    sys.exit(main())
