"""``carrystat`` command line.

Every command prints one JSON document (or CSV with ``--format csv``) that
carries its fully resolved configuration under ``"config"``; feeding that
document back through ``carrystat replay FILE`` reproduces the output.

Exit status: 0 success, 1 a verification failed, 2 bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import bounds, carrydist, charfn, oracle, scanner, series
from .dyadic import Dyadic

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Decimal, ``0x`` hex or ``0b`` binary."""
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_nonneg(text: str) -> int:
    v = parse_int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def parse_range(text: str) -> tuple[int, int]:
    """``a..b`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a, 0), int(b, 0)
        else:
            lo = hi = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _dy(d: Dyadic) -> dict:
    return {"value": str(d), "decimal": d.to_exact_decimal()}


# -- commands ------------------------------------------------------------------
# Each returns (payload, csv_rows_or_None, ok).


def cmd_density(a):
    d = carrydist.dist_for(a.t)
    out = d.to_json(a.t)
    rows = None
    if a.j is not None:
        lo, hi = a.j
        vals = {j: carrydist.delta_at(d, j) for j in range(lo, hi + 1)}
        out["values"] = {str(j): str(v) for j, v in vals.items()}
        rows = [["j", "delta"]] + [[j, str(v)] for j, v in vals.items()]
    else:
        rows = [["j", "delta"]] + [[j, str(v)] for j, v in d.support.items()]
    return out, rows, True


def cmd_ct(a):
    c = carrydist.c_value(carrydist.dist_for(a.t))
    out = {"t": a.t, "ct": str(c)}
    if a.t:
        out["decimal"] = c.to_exact_decimal()
    return out, [["t", "ct", "decimal"], [a.t, str(c), c.to_exact_decimal()]], True


def cmd_moments(a):
    ms = series.moments(a.t, a.kmax)
    d = carrydist.dist_for(a.t)
    out = {
        "t": a.t,
        "moments": {str(k): str(m) for k, m in enumerate(ms)},
        "raw_moments": {str(k): str(carrydist.raw_moment(d, k)) for k in range(a.kmax + 1)},
    }
    text = series.moments_csv((a.t, k, m) for k, m in enumerate(ms))
    return out, list(csv.reader(io.StringIO(text))), True


def cmd_oracle(a):
    m = a.m if a.m is not None else oracle.default_modulus_bits(a.t)
    try:
        value = oracle.exact_delta(a.t, a.j, m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"t": a.t, "j": a.j, "m": m, "method": "exact_residue", "delta": str(value)}
    agree = value == carrydist.delta_at(carrydist.dist_for(a.t), a.j)
    out["agrees_with_recurrence"] = agree
    if a.samples:
        try:
            out["empirical"] = str(oracle.empirical_delta(a.t, a.j, a.samples))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out["samples"] = a.samples
    return out, [["t", "j", "m", "delta"], [a.t, a.j, m, str(value)]], agree


def cmd_charfn(a):
    thetas = [float(x) for x in a.theta]
    rows = charfn.charfn_rows(a.t, thetas)
    imag_ok = [charfn.imagpart_bound_check(a.t, th, a.terms) if a.t >= 1 else True for th in thetas]
    out = {
        "t": a.t,
        "terms": a.terms,
        "values": [
            {
                "theta": r.theta,
                "re": r.re,
                "im": r.im,
                "modulus_bound": r.bound,
                "modulus_pass": r.passed,
                "imag_bound": charfn.imagpart_bound(a.t, r.theta, a.terms) if a.t >= 1 else 0.0,
                "imag_pass": ok,
            }
            for r, ok in zip(rows, imag_ok)
        ],
    }
    text = charfn.charfn_csv(rows)
    ok = all(r.passed for r in rows) and all(imag_ok)
    return out, list(csv.reader(io.StringIO(text))), ok


def cmd_ct_integral(a):
    value = charfn.ct_integral(a.t, a.points)
    exact = carrydist.c_value(carrydist.dist_for(a.t))
    err = abs(value - float(exact))
    out = {"t": a.t, "points": a.points, "integral": value, "exact": str(exact), "abs_error": err}
    return out, [["t", "points", "integral", "exact", "abs_error"], [a.t, a.points, repr(value), str(exact), repr(err)]], True


def cmd_ledger(a):
    led = bounds.build_ledger(a.kmax)
    out = led.to_json()
    rows = [["k", "name", "man", "exp", "log2"]]
    for row in out["rows"]:
        for name, v in row.items():
            if name in ("k", "log2"):
                continue
            if v is not None:
                rows.append([row["k"], name, v["man"], v["exp"], row["log2"].get(name, "")])
    return out, rows, True


def cmd_threshold(a):
    cert = bounds.block_threshold(a.epsilon)
    out = cert.to_json()
    ok = cert.verify()
    out["verified"] = ok
    rows = [
        ["epsilon", "radius", "order", "log2_r", "log2_min_blocks", "verified"],
        [str(cert.epsilon), cert.radius, cert.order, out["r_required_log2"], out["min_blocks_log2"], int(ok)],
    ]
    return out, rows, ok


def cmd_verify_bounds(a):
    if a.t < 1:
        raise UsageError("t must be >= 1")
    rep = bounds.verify_moment_bounds(a.t, a.kmax, convention=a.convention)
    out = rep.to_json()
    out["convention"] = a.convention
    rows = [["name", "lhs", "rhs", "pass"]] + [[c.name, str(c.lhs), str(c.rhs), int(c.passed)] for c in rep.checks]
    return out, rows, rep.passed


def cmd_scan(a):
    cfg = scanner.ScanConfig(
        a.bits, a.mode, tail_cut=a.tail_cut, threads=a.threads, checkpoint_path=a.checkpoint,
        split=a.split, progress=a.progress,
    )
    stream = sys.stdout if a.stream else None
    res = scanner.scan_min_ct(cfg, stream=stream)
    out = res.to_json()
    rows = [["t", "ct"]] + [[t, str(res.min_ct)] for t in res.argmin_set]
    return out, rows, res.count_below_half == 0


def cmd_verify(a):
    cfg = scanner.ScanConfig(a.bits, a.mode, threads=a.threads, progress=a.progress)
    res = scanner.scan_min_ct(cfg)
    out = {"bits": a.bits, "mode": a.mode, "violations": res.count_below_half, "min_ct": str(res.min_ct)}
    return out, [["bits", "violations"], [a.bits, res.count_below_half]], res.count_below_half == 0


def cmd_blocks(a):
    r = carrydist.blocks_count(a.t)
    out = {"t": a.t, "r": r}
    return out, [["t", "r"], [a.t, r]], True


COMMANDS = {
    "density": cmd_density,
    "ct": cmd_ct,
    "moments": cmd_moments,
    "oracle": cmd_oracle,
    "charfn": cmd_charfn,
    "ct-integral": cmd_ct_integral,
    "ledger": cmd_ledger,
    "threshold": cmd_threshold,
    "verify-bounds": cmd_verify_bounds,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "blocks": cmd_blocks,
}


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="carrystat", description="Binary carry statistics and Cusick values.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    s = add("density", "exact distribution delta(., t)")
    s.add_argument("t", type=parse_nonneg)
    s.add_argument("--j", type=parse_range, help="also list delta(j, t) for j in a..b")

    s = add("ct", "exact Cusick value c_t")
    s.add_argument("t", type=parse_nonneg)

    s = add("moments", "normalized moments up to order kmax")
    s.add_argument("t", type=parse_nonneg)
    s.add_argument("--kmax", type=parse_nonneg, default=4)

    s = add("oracle", "brute-force delta(j, t)")
    s.add_argument("t", type=parse_nonneg)
    s.add_argument("--j", type=parse_int, required=True)
    s.add_argument("--m", type=parse_nonneg, help="modulus bits (default: bit length + 2)")
    s.add_argument("--samples", type=parse_nonneg, help="also count over n < SAMPLES (a power of two)")

    s = add("charfn", "characteristic function and its bounds")
    s.add_argument("t", type=parse_nonneg)
    s.add_argument("--theta", type=float, nargs="+", required=True)
    s.add_argument("--terms", type=parse_nonneg, default=2, help="odd moments in the imaginary-part bound")

    s = add("ct-integral", "c_t by quadrature of the integral representation")
    s.add_argument("t", type=parse_nonneg)
    s.add_argument("--points", type=parse_nonneg, default=1 << 14)

    s = add("ledger", "rigorous upper bounds for the moment constants")
    s.add_argument("--kmax", type=parse_nonneg, default=8)

    s = add("threshold", "certified minimum block count for eps")
    s.add_argument("--epsilon", type=parse_fraction, required=True)

    s = add("verify-bounds", "check the moment bounds on one t")
    s.add_argument("t", type=parse_nonneg)
    s.add_argument("--kmax", type=parse_nonneg, default=4)
    s.add_argument("--convention", choices=("stated", "expansion"), default="stated")

    for name, help_text in (("scan", "minimum of c_t over t < 2^B"), ("verify", "count t < 2^B with c_t <= 1/2")):
        s = add(name, help_text)
        s.add_argument("--bits", type=parse_nonneg, required=True)
        s.add_argument("--mode", choices=("exact", "float"), default="exact")
        s.add_argument("--threads", type=parse_nonneg, default=scanner.default_threads())
        s.add_argument("--progress", action="store_true", help="progress on stderr")
        if name == "scan":
            s.add_argument("--tail-cut", type=parse_int, default=-48)
            s.add_argument("--split", type=parse_nonneg)
            s.add_argument("--checkpoint", help="resumable checkpoint file")
            s.add_argument("--stream", action="store_true", help="JSON Lines per finished subtree before the result")

    s = add("blocks", "number of blocks r of t")
    s.add_argument("t", type=parse_nonneg)

    s = sub.add_parser("replay", help="re-run the config stored in an output or config file")
    s.add_argument("file")
    s.add_argument("--output", "-o", help="write to this file instead of stdout")
    return p


def _config_of(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("command", "output")}
    return {"command": args.command, "params": _jsonable(params)}


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def _namespace_from_config(cfg: dict) -> argparse.Namespace:
    """Rebuild arguments by re-parsing, so replay goes through the same validation."""
    command = cfg.get("command")
    if command not in COMMANDS:
        raise UsageError(f"unknown command in config: {command!r}")
    params = dict(cfg.get("params", {}))
    argv = [command]
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[command]
    for action in sub._actions:
        if not action.option_strings and action.dest in params:
            argv.append(str(params.pop(action.dest)))
    for action in sub._actions:
        if not action.option_strings or action.dest not in params:
            continue
        value = params.pop(action.dest)
        flag = max(action.option_strings, key=len)
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                argv.append(flag)
        elif value is None:
            continue
        elif action.dest == "j" and isinstance(value, list):
            argv.append(f"{flag}={value[0]}..{value[1]}")
        elif action.dest == "j":
            argv.append(f"{flag}={value}")
        elif isinstance(value, list):
            argv += [flag] + [repr(x) if isinstance(x, float) else str(x) for x in value]
        else:
            argv += [flag, repr(value) if isinstance(value, float) else str(value)]
    return parser.parse_args(argv)


def _emit(args, payload, rows) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows or [])
        return buf.getvalue()
    payload = dict(payload)
    payload["config"] = _config_of(args)
    return json.dumps(payload, separators=(",", ":")) + "\n"


def _glue_ranges(argv: list[str]) -> list[str]:
    # "--j -3..2" would otherwise read as an unknown option
    out = []
    for tok in argv:
        if out and out[-1] == "--j" and tok.startswith("-"):
            out[-1] = f"--j={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _glue_ranges(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "replay":
            with open(args.file) as fh:
                doc = json.load(fh)
            output = args.output
            args = _namespace_from_config(doc.get("config", doc))
            args.output = output
        payload, rows, ok = COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"carrystat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _emit(args, payload, rows)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
