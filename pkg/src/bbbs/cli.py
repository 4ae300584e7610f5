"""Command line front end: ``bbbs evolve | scatter | verify | classify | trace``.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or unparsable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .core import INF, ParseError, format_capacity, parse_capacity, parse_configuration, render_ascii, render_configuration
from .evolution import CarrierNotReturned, orbit
from .scattering import (
    BadOrdering,
    HorizonTooSmall,
    InsufficientGap,
    UnsupportedPair,
    build_experiment,
    run_n_body,
)
from .solitons import Decomposition, blocks, classify_basic, count_solitons, decompose, parse_soliton_spec, tokens_of_sites
from .tracer import trace_fast_slow
from .verify import DEFAULT_COUNTS, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _capacity(text: str):
    try:
        cap = parse_capacity(text)
    except (ParseError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"capacity must be 'inf' or a positive integer, got {text!r}") from exc
    if cap is not INF and cap < 1:
        raise argparse.ArgumentTypeError("capacity must be at least 1")
    return cap


def _read_state(args) -> str:
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from exc
    if args.state is None or args.state == "-":
        return sys.stdin.read().strip()
    return args.state


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("state", nargs="?", help="configuration, e.g. 'F F F V V B1 U3 F' or '@3 (1,2,2) F'; '-' or absent reads stdin")
    p.add_argument("--file", help="read the configuration from a file")


# -- commands ---------------------------------------------------------------------


def cmd_evolve(args) -> int:
    cfg = parse_configuration(_read_state(args))
    rows = orbit(cfg, args.l, args.steps)
    if args.format == "json":
        doc = [json.loads(render_configuration(r, "json")) for r in rows]
        print(json.dumps({"capacity": format_capacity(args.l), "rows": doc}, indent=2))
    elif args.format == "ascii":
        nonempty = [r for r in rows if len(r)]
        lo = min((r.origin for r in nonempty), default=0)
        hi = max((r.end for r in nonempty), default=0)
        print("\n\n".join(f"t={t}\n{render_ascii(r, lo, hi)}" for t, r in enumerate(rows)))
    else:
        for r in rows:
            print(render_configuration(r, args.format))
    return EXIT_OK


def _gaps(text: str | None):
    if text is None:
        return None
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--gaps takes comma separated integers, got {text!r}") from exc
    return vals[0] if len(vals) == 1 else vals


def cmd_scatter(args) -> int:
    specs = [parse_soliton_spec(s) for s in args.solitons]
    exp = build_experiment(specs, _gaps(args.gaps), args.l, args.horizon)
    verdict = run_n_body(exp, staged=args.staged)
    if args.format == "json":
        doc = verdict.to_json()
        doc["initial"] = render_configuration(exp.config, "tokens")
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"initial: {render_configuration(exp.config, 'tokens')}")
        print(f"capacity: {format_capacity(exp.capacity)}  steps: {','.join(map(str, verdict.measured.steps))}")
        for m, p in zip(verdict.measured.solitons, verdict.predicted.solitons):
            print(f"{m.label}: measured {m.delta:+d}, predicted {p.delta:+d}")
        print(f"final: {verdict.measured.final}")
        for d in verdict.diffs:
            print(f"mismatch: {d}")
        print("verdict: " + ("PASS" if verdict.ok else "FAIL"))
    return EXIT_OK if verdict.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(n, seed=args.seed, count=args.count) for n in names]
    if args.format == "json":
        print(json.dumps([r.to_json() for r in results], indent=2))
    else:
        for r in results:
            print(r.summary())
            for note in r.notes:
                print(f"  {note}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_classify(args) -> int:
    cfg = parse_configuration(_read_state(args))
    dec = decompose(cfg, args.l)
    found = []
    for pos, sites in blocks(cfg):
        toks = tokens_of_sites(sites)
        kind = "NotBasic(multiple balls in one site)" if toks is None else str(classify_basic(toks))
        word = " ".join(s.token() or s.triple() for s in sites)
        found.append({"position": pos, "word": word, "kind": kind})
    doc: dict = {"blocks": found}
    if isinstance(dec, Decomposition):
        doc["decomposition"] = [s.to_json() for s in dec.solitons]
        doc["counts"] = count_solitons(dec).to_json()
    else:
        doc["not_separated"] = dec.reason
    if args.format == "json":
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    for b in found:
        print(f"@{b['position']} {b['word']}: {b['kind']}")
    if isinstance(dec, Decomposition):
        print(f"decomposition: {dec}")
        c = doc["counts"]
        print(f"ball solitons: {c['ball_solitons']} amplitudes {','.join(map(str, c['fast_amplitudes'])) or '-'}")
        print(f"basket solitons: {c['basket_solitons']} amplitudes {','.join(map(str, c['basket_amplitudes'])) or '-'}")
    else:
        print(str(dec))
    return EXIT_OK


def cmd_trace(args) -> int:
    fast = parse_soliton_spec(args.fast)
    if set(fast.tokens) != {"F"} or len(fast.tokens) < 2:
        raise UsageError(f"the first soliton must be F_m with m >= 2, got {args.fast}")
    rep = trace_fast_slow(len(fast.tokens), parse_soliton_spec(args.slow).tokens, args.gap)
    if args.format == "json":
        print(rep.dumps())
    else:
        print(f"special baskets: {', '.join(map(str, rep.special_baskets)) or 'none'}")
        print(f"fast shift: {rep.fast_shift:+d}")
        for t, st in enumerate(rep.steps):
            print(f"t={t} interval={st.interval}")
        for v in rep.violations:
            print(f"violation: {v}")
        print("verdict: " + ("PASS" if rep.ok else "FAIL"))
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbbs", description="Box-basket-ball simulator and verification lab.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="print the orbit of a configuration")
    _add_input(p)
    p.add_argument("--l", type=_capacity, default=INF, help="carrier capacity: 'inf' or a positive integer")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--format", choices=["tokens", "triples", "ascii", "json"], default="tokens")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scatter", help="scatter solitons and compare measured and predicted phase shifts")
    p.add_argument("solitons", nargs="+", help="soliton words, fastest first, e.g. F3 B1U3F")
    p.add_argument("--l", type=_capacity, default=INF)
    p.add_argument("--gaps", help="one gap for all, or comma separated gaps")
    p.add_argument("--horizon", type=int, help="maximum steps per stage")
    p.add_argument("--staged", action="store_true", help="evolve by T_2, T_3, ... in turn")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("verify", help="run a seeded verification suite")
    p.add_argument("suite", choices=[*SUITES, "all"])
    p.add_argument("--count", type=int, help=f"number of random cases (defaults: {DEFAULT_COUNTS})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="classify the solitons of a configuration and count pure solitons")
    _add_input(p)
    p.add_argument("--l", type=_capacity, default=INF)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("trace", help="trace F_m overtaking a slow soliton move by move")
    p.add_argument("fast", help="fast soliton, e.g. F3")
    p.add_argument("slow", help="slow soliton, e.g. B1U3F")
    p.add_argument("--gap", type=int)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "steps", 0) is not None and getattr(args, "steps", 0) < 0:
        parser.error("--steps must be non-negative")
    try:
        return args.func(args)
    except (ParseError, UsageError, BadOrdering, InsufficientGap, UnsupportedPair, ValueError) as exc:
        print(f"bbbs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HorizonTooSmall, CarrierNotReturned) as exc:
        print(f"bbbs {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
