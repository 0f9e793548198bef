"""Command-line entry point: ``liffig check|run|vcs|verify|synth|transpile``.

Exit codes: 0 success (including a halted run), 1 usage or parse error,
2 abort / assertion violation / counterexample, 3 fault.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import interpreter, printer, transpile, vc
from .model import (Aborted, AssertionViolation, Fault, Halted, LiffigError, Nondeterminism,
                    format_state)
from .parser import ParseError, parse_program, parse_term

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_FAULT = 0, 1, 2, 3


def _load(path: str):
    return parse_program(Path(path).read_text(encoding="utf-8"))


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_sets(items: list[str]) -> dict[str, int]:
    values = {}
    for item in items:
        for pair in item.split(","):
            if not pair.strip():
                continue
            name, sep, value = pair.partition("=")
            if not sep:
                raise ValueError(f"expected var=value, got {pair!r}")
            values[name.strip()] = int(value)
    return values


def cmd_check(args) -> int:
    program = _load(args.file)
    for w in program.warnings:
        print(f"{args.file}:{w}")
    print(f"{args.file}: {len(program.blocks)} blocks, {len(program.warnings)} warnings, "
          f"0 errors")
    return EXIT_OK


def cmd_run(args) -> int:
    program = _load(args.file)
    try:
        inputs = _parse_sets(args.set)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.bind_ghosts:
        for name, value in list(inputs.items()):
            ghost = name + "0"
            if ghost not in inputs and program.decl(ghost) is not None:
                inputs[ghost] = value
    unknown = [n for n in inputs if program.decl(n) is None]
    if unknown:
        print(f"error: unknown variable {unknown[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    variant = parse_term(args.variant) if args.variant else None
    cfg = interpreter.RunConfig(
        fuel=args.fuel,
        check_annotations=args.check_annotations,
        guard_policy="fail-on-overlap" if args.overlap else "first-true",
        variant=variant,
        record=bool(args.trace or variant),
    )
    trace = interpreter.run(program, inputs, cfg)
    print(f"RESULT {trace.result}")
    print(f"VISITS {trace.visit_count}")
    print(f"STATE {format_state(trace.final_state)}")
    if variant is not None:
        print(interpreter.check_variant(program, trace, variant))
    if args.trace:
        Path(args.trace).write_text(trace.export(), encoding="utf-8")
    r = trace.result
    if isinstance(r, Fault):
        return EXIT_FAULT
    if isinstance(r, (Aborted, AssertionViolation, Nondeterminism)):
        return EXIT_FAIL
    return EXIT_OK


def cmd_vcs(args) -> int:
    _write(vc.write_vclist(vc.program_vclist(_load(args.file))), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    program = _load(args.file)
    window = vc.parse_window(args.window, state_cap=args.state_cap)
    report = vc.check_program(program, window, workers=args.workers)
    for line in report.lines():
        print(line)
    print(f"{report.summary()} (over window {window})")
    return EXIT_FAIL if report.counts["COUNTEREXAMPLE"] else EXIT_OK


def cmd_synth(args) -> int:
    vl = vc.read_vclist(Path(args.vcfile).read_text(encoding="utf-8"))
    _write(printer.program(vc.synthesize(vl)), args.out)
    return EXIT_OK


def cmd_transpile(args) -> int:
    program = _load(args.file)
    params = [p for p in (args.params or "").split(",") if p]
    text = transpile.to_c(program, args.name, params, args.returns,
                          checked=args.checked, wide=args.wide, indent=args.indent)
    _write(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liffig", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and report diagnostics")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", help="execute with assertion checking")
    p.add_argument("file")
    p.add_argument("--set", action="append", default=[], metavar="VAR=VALUE[,...]")
    p.add_argument("--fuel", type=int, default=interpreter.DEFAULT_FUEL)
    p.add_argument("--variant", metavar="EXPR")
    p.add_argument("--trace", metavar="OUT")
    p.add_argument("--bind-ghosts", action="store_true",
                   help="copy each input v into v0 when v0 is declared")
    p.add_argument("--check-annotations", action="store_true")
    p.add_argument("--overlap", action="store_true", help="fail when two guards are true")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("vcs", help="write the verification condition list")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_vcs)

    p = sub.add_parser("verify", help="brute-force check every condition")
    p.add_argument("file")
    p.add_argument("--window", default="1..12", metavar="LO..HI")
    p.add_argument("--state-cap", type=int, default=10**7)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("synth", help="transcribe a condition list into a program")
    p.add_argument("vcfile")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("transpile", help="emit C")
    p.add_argument("file")
    p.add_argument("--name", default="f")
    p.add_argument("--params", default="")
    p.add_argument("--returns", metavar="VAR")
    p.add_argument("--checked", action="store_true", help="assert every label's assertion")
    p.add_argument("--wide", action="store_true", help="use long long instead of int")
    p.add_argument("--indent", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_transpile)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return args.fn(args)
    except ParseError as e:
        for d in e.diagnostics:
            print(f"{getattr(args, 'file', getattr(args, 'vcfile', ''))}:{d}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LiffigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
