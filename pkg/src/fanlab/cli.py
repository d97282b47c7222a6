"""The ``fanlab`` command line.

Every command prints a JSON report (or a short text summary with
``--format text``) and exits 0 when all certificates hold, 1 when one fails
or stays Unknown, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from mpmath import mp

from . import counterexample as cx
from .dynamics import t_min_enclosure, tower_endpoint
from .errors import FanlabError, InvalidInstance, NumericModeRequired, SpecError
from .itinerary import ItinerarySeq, PeriodicTail, seq_from_json, t_star
from .render import render_fan
from .sigma import basis_from_json, in_basis, in_En, in_Kn, l2_norm, sigma_from_json
from .strata import MEMBER, NON_MEMBER, canonical_xn_point, claim8_inequality, prop7_check, xn_member
from .suites import run_suite
from .tower import precision_audit, to_text

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_seq_spec(text: str) -> ItinerarySeq:
    """Sequence from inline JSON, a JSON file path, or ``zero`` / ``const:<v>`` / ``canonical:<n>:<c>``."""
    text = text.strip()
    if text == "zero":
        return ItinerarySeq()
    if text.startswith("const:"):
        v = _int(text[6:], "const value")
        return ItinerarySeq(tail=PeriodicTail((v,)))
    if text.startswith("canonical:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise SpecError("expected canonical:<n>:<c>")
        return canonical_xn_point(_int(parts[1], "n"), _int(parts[2], "c")).seq
    if text.startswith("{") or text.startswith('"'):
        return seq_from_json(_loads(text, "inline sequence"))
    path = Path(text)
    if path.is_file():
        return seq_from_json(_loads(path.read_text(), str(path)))
    raise SpecError(f"not a sequence spec or readable file: {text!r}")


def _int(s, what):
    try:
        return int(s)
    except ValueError:
        raise SpecError(f"{what} must be an integer, got {s!r}") from None


def _loads(text, where):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{where}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _json_arg(text, what):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.is_file():
        text = path.read_text()
    return _loads(text, what)


def parse_range(text: str):
    """``3..40``, ``1,2,5`` or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad integer range {text!r}") from None


# --- commands --------------------------------------------------------------------


def cmd_tstar(args):
    s = parse_seq_spec(args.seq)
    cert = t_star(s, args.n)
    return {"tstar": to_text(cert.value), "index": cert.index, "source": cert.source, "window": cert.window}, True


def cmd_tmin(args):
    s = parse_seq_spec(args.seq)
    try:
        rec = t_min_enclosure(s, depth=args.depth, precision=args.precision, tol=args.tol)
        out = {
            "mode": "numeric",
            "lo": mp.nstr(rec.lo, 20),
            "hi": mp.nstr(rec.hi, 20),
            "width": mp.nstr(rec.width, 5),
            "depth": rec.depth,
            "tstar": to_text(rec.t_star0),
        }
    except NumericModeRequired:
        rec = tower_endpoint(s)
        out = {"mode": "tower", "lo": to_text(rec.lo), "hi": to_text(rec.hi), "depth": None, "tstar": to_text(rec.t_star0)}
    return out, True


def cmd_xn(args):
    v = xn_member(parse_seq_spec(args.seq), args.n, args.kmax)
    return v.to_json(), v.verdict in (MEMBER, NON_MEMBER)


def cmd_prop7(args):
    r = prop7_check(parse_seq_spec(args.seq), args.k, args.j, args.l, args.n)
    return r.to_json(), True


def cmd_claim8(args):
    results = [claim8_inequality(k).to_json() for k in parse_range(args.k)]
    return {"results": results, "anomalies": [r["k"] for r in results if r["result"] == "Fails"]}, True


def cmd_claim9(args):
    s = parse_seq_spec(args.seq)
    reports = cx.verify_claim9(s, args.n, parse_range(args.N), min_K=args.min_K, strict=False)
    ok = all(r.ok for r in reports)
    return {"reports": [r.to_json() for r in reports], "growth": cx.k_growth(reports), "all_ok": ok}, ok


def cmd_sigma(args):
    q = sigma_from_json(_json_arg(args.point, "point"))
    if args.check == "norm":
        coords = [{"index": i, "norm": mp.nstr(l2_norm(c, args.precision), 20)} for i, c in enumerate(q.coords)]
        return {"norms": coords}, True
    if args.check == "kn":
        return {"n": args.n, "in_Kn": [in_Kn(c, args.n) for c in q.coords]}, True
    if args.check == "en":
        return {"n": args.n, "in_En": in_En(q, args.n)}, True
    if args.basis is None:
        raise UsageError("--check basis needs --basis")
    return {"in_basis": in_basis(q, basis_from_json(_json_arg(args.basis, "basis")))}, True


def cmd_render(args):
    out = args.out or "fan.svg"
    family = None
    if args.seq:
        family = [parse_seq_spec(t) for t in args.seq]
    t0 = time.perf_counter()
    pic = render_fan(args.spines, args.depth, out, family=family, precision=args.precision, tol=args.tol)
    xs = [sp.x for sp in pic.spines]
    return {
        "svg": str(out),
        "csv": str(Path(out).with_suffix(".csv")),
        "spines": len(pic.spines),
        "base": pic.base,
        "injective": len(set(xs)) == len(xs),
        "render_seconds": round(time.perf_counter() - t0, 3),
    }, True


def cmd_verify(args):
    cfg = _json_arg(args.config, "config") if args.config else {}
    rep = run_suite(args.suite, cfg)
    return rep, rep["exit_status"] == 0


COMMANDS = {
    "tstar": cmd_tstar,
    "tmin": cmd_tmin,
    "xn": cmd_xn,
    "prop7": cmd_prop7,
    "claim8": cmd_claim8,
    "claim9": cmd_claim9,
    "sigma": cmd_sigma,
    "render": cmd_render,
    "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=128, help="interval precision in bits")
    common.add_argument("--tol", type=float, default=1e-9, help="enclosure width tolerance")
    common.add_argument("--out", help="also write the JSON report here (render: SVG path)")
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = argparse.ArgumentParser(prog="fanlab", description="Certified computations for the exponential fan model.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("tstar", parents=[common], help="supremum t* of a shifted sequence")
    q.add_argument("--seq", required=True)
    q.add_argument("--n", type=int, default=0)

    q = sub.add_parser("tmin", parents=[common], help="enclosure of the minimal escape height")
    q.add_argument("--seq", required=True)
    q.add_argument("--depth", type=int)

    q = sub.add_parser("xn", parents=[common], help="membership in the stratum X_n")
    q.add_argument("--seq", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--kmax", type=int, default=6)

    q = sub.add_parser("prop7", parents=[common], help="witness transfer to an interior index 2l^2")
    q.add_argument("--seq", required=True)
    for name in ("k", "l", "j", "n"):
        q.add_argument(f"--{name}", type=int, required=True)

    q = sub.add_parser("claim8", parents=[common], help="F^(k^2)(1) - 1 > F^k(1) per k")
    q.add_argument("--k", default="1..6")

    q = sub.add_parser("claim9", parents=[common], help="approximation construction and its certificates")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--N", default="3..40")
    q.add_argument("--seq", default=None)
    q.add_argument("--min-K", dest="min_K", type=int, default=None, help="smallest K allowed (default n + 2)")

    q = sub.add_parser("sigma", parents=[common], help="sigma-product predicates")
    q.add_argument("--check", choices=("norm", "kn", "en", "basis"), required=True)
    q.add_argument("--point", required=True, help="JSON file or inline JSON")
    q.add_argument("--n", type=int, default=0)
    q.add_argument("--basis")

    q = sub.add_parser("render", parents=[common], help="SVG and CSV of a spine family")
    q.add_argument("--spines", type=int, default=64)
    q.add_argument("--depth", type=int, default=6)
    q.add_argument("--seq", action="append", help="explicit family member (repeatable)")

    q = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    q.add_argument("--suite", required=True, choices=sorted(["prop6", "prop7", "claim8", "claim9", "sigma", "tower-oracle", "tmin", "domination"]))
    q.add_argument("--config", help="JSON object (inline or file)")
    return p


def _text_summary(report):
    lines = [f"fanlab {' '.join(report['command'])}", f"status: {'pass' if report['exit_status'] == 0 else 'fail'}"]
    result = report["result"]
    if isinstance(result, dict):
        for key in sorted(result):
            val = result[key]
            if isinstance(val, (dict, list)):
                val = json.dumps(val, sort_keys=True)
                if len(val) > 120:
                    val = val[:117] + "..."
            lines.append(f"  {key}: {val}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "claim9" and args.seq is None:
        args.seq = f"canonical:{args.n}:1"
    start = time.perf_counter()
    try:
        with precision_audit() as audit:
            result, ok = COMMANDS[args.command](args)
    except (UsageError, SpecError, InvalidInstance) as exc:
        print(f"fanlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FanlabError as exc:
        print(f"fanlab: certificate failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    code = EXIT_OK if ok else EXIT_FAIL
    report = {
        "command": argv,
        "result": result,
        "precision_audit": dict(audit),
        "exit_status": code,
        "timing": {"seconds": round(time.perf_counter() - start, 3)},
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out and args.command != "render":
        Path(args.out).write_text(text + "\n")
    if args.format == "json":
        print(text)
    else:
        sys.stdout.write(_text_summary(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
