"""``comblink`` command line: figure-data scenarios written as CSV (and SVG).

Exit codes: 0 success, 1 bad input file or unwritable output, 2 usage error.
"""

import argparse
import csv
import io
import json
import math
import re
import sys

from . import analysis
from .comb import CombFileError, SolitonCombParams, read_comb_csv, synthesize_flat_comb, synthesize_soliton_comb
from .link import ConfigError, EqualizationScheme, LinkConfig, load_config
from .plotting import AxesSpec, emit_plot
from .quantities import db_from_linear, dbm_from_watt, watt_from_dbm

__all__ = ["main", "run", "parse_range", "parse_int_range", "parse_format"]

HEADERS = {
    "sweep-power": ("p_line_dbm", "spans", "osnr_db", "marker"),
    "sweep-ocnr": ("ocnr_db", "spans", "p_line_dbm", "osnr_db", "marker"),
    "comb-map": ("index", "frequency_hz", "spans", "distance_km", "scheme", "osnr_db"),
    "capacity": ("spans", "distance_km", "scheme", "mode", "capacity_bps"),
    "thresholds": ("format", "qam_order", "symbol_rate_baud", "net_rate_bps", "required_osnr_db"),
    "transition": ("spans", "p_line_threshold_dbm", "limit_osnr_db", "ocnr_threshold_db", "ocnr_limit_osnr_db"),
}

_FORMAT_RE = re.compile(r"^(\d+)qam-(\d+(?:\.\d+)?)gbd$", re.IGNORECASE)


class _InputError(Exception):
    """Problem with an input or output file; reported with exit status 1."""


def parse_range(text):
    """``start:stop:step`` (inclusive), ``start:stop`` (step 1), comma list or single value."""
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1.0)
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9))
            values = [start + k * step for k in range(n + 1)]
        else:
            values = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid range or list: {text!r}") from None
    if not values or any(not math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"invalid range or list: {text!r}")
    return [round(v, 12) for v in values]


def parse_int_range(text):
    values = parse_range(text)
    if any(v != int(v) or v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"span counts must be integers >= 1: {text!r}")
    return [int(v) for v in values]


def parse_format(text):
    m = _FORMAT_RE.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"format must look like '16qam-56gbd', got {text!r}")
    try:
        return text.lower(), analysis.ModulationFormat(int(m.group(1)), float(m.group(2)) * 1e9)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _list_of(choices):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"choose from {', '.join(choices)}; got {text!r}")
        return items

    return parse


def _cell(value):
    if isinstance(value, float):
        return "inf" if math.isinf(value) else format(value, ".9g")
    return str(value)


def write_table(rows, header, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(k, "")) for k in header])


def _emit(args, rows, header, axes=None):
    buf = io.StringIO()
    write_table(rows, header, buf)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise _InputError(f"{args.out}: {exc.strerror}") from None
    else:
        sys.stdout.write(buf.getvalue())
    if getattr(args, "plot", None):
        if axes is None:
            raise _InputError("this scenario has no plot")
        plot_rows = [r for r in rows if not r.get("marker")]
        try:
            emit_plot(plot_rows, axes, args.plot)
        except OSError as exc:
            raise _InputError(f"{args.plot}: {exc.strerror}") from None
        except ValueError as exc:
            raise _InputError(f"{args.plot}: {exc}") from None


def _config(args):
    if args.config:
        try:
            return load_config(args.config)
        except ConfigError as exc:
            raise _InputError(str(exc)) from None
    return LinkConfig()


def _comb(args):
    if args.comb_file:
        try:
            return read_comb_csv(args.comb_file)
        except OSError as exc:
            raise _InputError(f"{args.comb_file}: {exc.strerror}") from None
        except CombFileError as exc:
            raise _InputError(str(exc)) from None
    if args.comb == "flat":
        p = SolitonCombParams()
        return synthesize_flat_comb(p.line_count, p.center_frequency, p.spacing, p.peak_power)
    return synthesize_soliton_comb()


def cmd_sweep_power(args):
    config = _config(args)
    ocnr = math.inf if args.ocnr_db is None else 10 ** (args.ocnr_db / 10)
    rows = []
    for m in args.spans:
        grid = analysis.sweep_line_power(config, [m], args.pline_dbm, ocnr)
        rows.extend({**r, "marker": ""} for r in grid)
        tp = analysis.transition_line_power(config, m)
        rows.append(
            {
                "p_line_dbm": float(dbm_from_watt(tp.threshold)),
                "spans": m,
                "osnr_db": float(db_from_linear(tp.osnr_at_threshold)),
                "marker": "transition",
            }
        )
    _emit(args, rows, HEADERS["sweep-power"], AxesSpec("p_line_dbm", "osnr_db", ("spans",), x_label="P_line [dBm]", y_label="OSNR [dB]"))


def cmd_sweep_ocnr(args):
    config = _config(args)
    fixed = None
    if args.pline_dbm is not None:
        fixed = {m: watt_from_dbm(args.pline_dbm) for m in args.spans}
    rows = []
    for m in args.spans:
        grid = analysis.sweep_ocnr(config, [m], args.ocnr_db, fixed)
        rows.extend({**r, "marker": ""} for r in grid)
        p_line = fixed[m] if fixed else None
        tp = analysis.transition_ocnr(config, m, p_line)
        rows.append(
            {
                "ocnr_db": float(db_from_linear(tp.threshold)),
                "spans": m,
                "p_line_dbm": grid[0]["p_line_dbm"],
                "osnr_db": float(db_from_linear(tp.osnr_at_threshold)),
                "marker": "transition",
            }
        )
    _emit(args, rows, HEADERS["sweep-ocnr"], AxesSpec("ocnr_db", "osnr_db", ("spans",), x_label="OCNR [dB]", y_label="OSNR [dB]"))


def cmd_comb_map(args):
    config, comb = _config(args), _comb(args)
    rows = []
    for scheme in args.scheme:
        rows.extend(analysis.osnr_vs_distance(comb, config, scheme, args.spans))
    _emit(args, rows, HEADERS["comb-map"], AxesSpec("index", "osnr_db", ("scheme", "spans"), x_label="comb line", y_label="OSNR [dB]"))


def cmd_capacity(args):
    config, comb = _config(args), _comb(args)
    rows = analysis.capacity_vs_distance(comb, config, args.scheme, args.mode, args.spans, args.pol_factor)
    _emit(args, rows, HEADERS["capacity"], AxesSpec("distance_km", "capacity_bps", ("scheme", "mode"), x_label="distance [km]", y_label="capacity [bit/s]"))


def cmd_thresholds(args):
    config = _config(args)
    formats = args.format or [(name, fmt) for name, fmt in analysis.FORMATS.items()]
    rows = []
    for name, fmt in formats:
        if args.ber is not None or args.fec_overhead is not None:
            fmt = analysis.ModulationFormat(
                fmt.qam_order,
                fmt.symbol_rate,
                fmt.fec_overhead if args.fec_overhead is None else args.fec_overhead,
                fmt.ber_threshold if args.ber is None else args.ber,
                fmt.polarizations,
            )
        rows.append(
            {
                "format": name,
                "qam_order": fmt.qam_order,
                "symbol_rate_baud": fmt.symbol_rate,
                "net_rate_bps": fmt.net_rate,
                "required_osnr_db": float(db_from_linear(analysis.required_osnr(fmt, config.b_ref))),
            }
        )
    _emit(args, rows, HEADERS["thresholds"])


def cmd_transition(args):
    config = _config(args)
    rows = []
    for m in args.spans:
        tp = analysis.transition_line_power(config, m)
        to = analysis.transition_ocnr(config, m, tp.threshold)
        rows.append(
            {
                "spans": m,
                "p_line_threshold_dbm": float(dbm_from_watt(tp.threshold)),
                "limit_osnr_db": float(db_from_linear(tp.limit_osnr)),
                "ocnr_threshold_db": float(db_from_linear(to.threshold)),
                "ocnr_limit_osnr_db": float(db_from_linear(to.limit_osnr)),
            }
        )
    _emit(args, rows, HEADERS["transition"], AxesSpec("spans", "p_line_threshold_dbm", x_label="spans", y_label="transition P_line [dBm]"))


def cmd_config(args):
    config = LinkConfig() if args.print_defaults else _config(args)
    text = json.dumps(config.to_dict(), indent=2) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise _InputError(f"{args.out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="comblink", description="OSNR and capacity of comb-driven WDM links.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON link configuration (missing keys take defaults)")
    common.add_argument("-o", "--out", help="output CSV path (default: stdout)")

    plot = argparse.ArgumentParser(add_help=False)
    plot.add_argument("--plot", help="also write an SVG line plot here")

    comb = argparse.ArgumentParser(add_help=False)
    src = comb.add_mutually_exclusive_group()
    src.add_argument("--comb", choices=("soliton", "flat"), default="soliton", help="built-in comb preset")
    src.add_argument("--comb-file", help="comb spectrum CSV (index,frequency_hz,power_dbm,ocnr_db)")

    schemes = [s.value for s in EqualizationScheme]
    modes = [m.value for m in analysis.CapacityMode]

    p = sub.add_parser("sweep-power", parents=[common, plot], help="OSNR vs comb line power")
    p.add_argument("--spans", type=parse_int_range, default=[1, 2, 5, 10, 20, 40])
    p.add_argument("--pline-dbm", type=parse_range, default=parse_range("-50:10:0.5"))
    p.add_argument("--ocnr-db", type=float, default=None, help="comb OCNR (default: infinite)")
    p.set_defaults(func=cmd_sweep_power)

    p = sub.add_parser("sweep-ocnr", parents=[common, plot], help="OSNR vs comb OCNR")
    p.add_argument("--spans", type=parse_int_range, default=[1, 2, 5, 10, 20, 40])
    p.add_argument("--ocnr-db", type=parse_range, default=parse_range("10:60:0.5"))
    p.add_argument("--pline-dbm", type=float, default=None, help="fixed line power (default: per-span transition power)")
    p.set_defaults(func=cmd_sweep_ocnr)

    p = sub.add_parser("comb-map", parents=[common, plot, comb], help="per-line OSNR vs distance")
    p.add_argument("--scheme", type=_list_of(schemes), default=schemes)
    p.add_argument("--spans", type=parse_int_range, default=parse_int_range("1:200"))
    p.set_defaults(func=cmd_comb_map)

    p = sub.add_parser("capacity", parents=[common, plot, comb], help="total capacity vs distance")
    p.add_argument("--scheme", type=_list_of(schemes), default=schemes)
    p.add_argument("--mode", type=_list_of(modes), default=modes)
    p.add_argument("--spans", type=parse_int_range, default=parse_int_range("1:200"))
    p.add_argument("--pol-factor", type=int, choices=(1, 2), default=None, help="capacity multiplier (default from config)")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("thresholds", parents=[common], help="required OSNR per modulation format")
    p.add_argument("--format", type=parse_format, action="append", help="e.g. 16qam-56gbd (repeatable)")
    p.add_argument("--ber", type=float, default=None, help="override pre-FEC BER threshold")
    p.add_argument("--fec-overhead", type=float, default=None, help="override FEC overhead fraction")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("transition", parents=[common, plot], help="1-dB regime transition points")
    p.add_argument("--spans", type=parse_int_range, default=parse_int_range("1:40"))
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("config", parents=[common], help="show the effective link configuration")
    p.add_argument("--print-defaults", action="store_true", help="print the built-in defaults")
    p.set_defaults(func=cmd_config)
    return parser


_NEGATIVE_VALUE = re.compile(r"^-\d|^-\.\d")


def _glue_negative_values(argv):
    # argparse reads "--pline-dbm -40:0:0.5" as two flags; rewrite to "--pline-dbm=-40:0:0.5"
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None):
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        args.func(args)
    except _InputError as exc:
        print(f"comblink: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"comblink: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
