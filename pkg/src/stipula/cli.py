"""Command-line front end.

Exit status: 0 ok, 1 semantic failure (diagnostics, stuck run, NOT RELATED,
fuzz violation), 2 unreadable or malformed input, 3 exploration cap hit.

Any file argument may be written ``corpus:NAME`` to pick a bundled file,
e.g. ``corpus:bike_rental`` or ``corpus:traces/bike_rental.table3``.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from stipula.driver.fuzz import fuzz
from stipula.driver.repl import run_repl
from stipula.driver.session import run_trace
from stipula.driver.traceio import load_script, result_lines, write_script
from stipula.equiv.bisim import bisimilar, replay_witness
from stipula.equiv.lts import explore, to_dot
from stipula.equiv.universe import Universe, load_universe
from stipula.errors import ExplosionError, LexError, ParseError, ScriptError
from stipula.syntax import check_wellformed, errors, lint_asset_drain, parse_source, pretty

OK, FAILED, BAD_INPUT, TOO_BIG = 0, 1, 2, 3


class InputError(Exception):
    """Raised for unreadable or malformed inputs; maps to exit status 2."""


def corpus_dir() -> Path:
    return Path(str(resources.files("stipula") / "corpus"))


def resolve(arg: str, ext: str) -> Path:
    if arg.startswith("corpus:"):
        name = arg[len("corpus:"):]
        base = corpus_dir() / name
        return base if base.suffix == ext else base.with_name(base.name + ext)
    return Path(arg)


def read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


def load_contract(arg: str, out=None, lint: bool = False):
    """Parse and check a contract; returns ``None`` (after printing) if it is rejected."""
    out = out or sys.stderr
    path = resolve(arg, ".stipula")
    source = read_text(path)
    try:
        decl = parse_source(source)
    except (LexError, ParseError) as exc:
        print(f"{path}:{exc}", file=out)
        return None
    diags = check_wellformed(decl) + (lint_asset_drain(decl) if lint else [])
    for d in diags:
        if lint or d.severity == "error":
            print(d.render(str(path)), file=out)
    if errors(diags):
        return None
    return decl


def load_universe_arg(arg: str) -> Universe:
    path = resolve(arg, ".json")
    read_text(path)
    try:
        return load_universe(path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc.msg} at line {exc.lineno}") from None
    except ScriptError as exc:
        raise InputError(f"{path}: {exc}") from None


def default_universe(contract_arg: str, explicit):
    """The explicit universe, else the ``.json`` sitting next to the contract."""
    if explicit:
        return load_universe_arg(explicit)
    sibling = resolve(contract_arg, ".stipula").with_suffix(".json")
    if sibling.exists():
        return load_universe_arg(str(sibling))
    return None


# -- commands ----------------------------------------------------------------

def cmd_parse(args) -> int:
    decl = load_contract(args.file)
    if decl is None:
        return FAILED
    sys.stdout.write(pretty(decl))
    return OK


def cmd_check(args) -> int:
    decl = load_contract(args.file, out=sys.stdout, lint=True)
    if decl is None:
        return FAILED
    print(f"{resolve(args.file, '.stipula')}: ok")
    return OK


def cmd_run(args) -> int:
    decl = load_contract(args.file)
    if decl is None:
        return FAILED
    path = resolve(args.trace, ".trace")
    read_text(path)
    try:
        script = load_script(path)
        result = run_trace(decl, script, until=args.until, strict=args.strict_events)
    except ScriptError as exc:
        raise InputError(f"{path}: {exc}") from None
    for line in result_lines(result, hide_silent=args.hide_silent):
        print(line)
    if result.stuck:
        print(f"stuck: {result.stuck}", file=sys.stderr)
        return FAILED
    return OK


def cmd_repl(args) -> int:
    decl = load_contract(args.file)
    if decl is None:
        return FAILED
    u = default_universe(args.file, args.universe)
    agrees, calls = (u.agrees, u.calls) if u else ((), ())
    print("stipula repl; :help for commands")
    run_repl(decl, agrees, calls, strict=args.strict_events)
    return OK


def cmd_lts(args) -> int:
    decl = load_contract(args.file)
    if decl is None:
        return FAILED
    u = load_universe_arg(args.universe)
    lts = explore(decl, u)
    counts = lts.edge_counts()
    frontier = sum(1 for e in lts.edges if e[3] is None)
    print(f"{len(lts.nodes)} nodes, {len(lts.edges)} edges "
          f"({', '.join(f'{k} {n}' for k, n in sorted(counts.items()))}); "
          f"{frontier} reach the horizon or get stuck")
    if args.dot:
        text = to_dot(lts)
        if args.dot == "-":
            sys.stdout.write(text)
        else:
            try:
                Path(args.dot).write_text(text, encoding="utf-8")
            except OSError as exc:
                raise InputError(f"cannot write {args.dot}: {exc.strerror}") from None
    return OK


def cmd_equiv(args) -> int:
    c1, c2 = load_contract(args.file1), load_contract(args.file2)
    if c1 is None or c2 is None:
        return FAILED
    u = load_universe_arg(args.universe)
    verdict = bisimilar(c1, c2, u)
    print(verdict.describe())
    if verdict.related:
        return OK
    script = verdict.script()
    print(f"witness ({verdict.attacker} attacks):")
    for line in write_script(script).splitlines():
        print("  " + line)
    if not replay_witness(c1, c2, verdict):
        print("note: replaying the witness with the run policy shows no difference "
              "(the defender's failure lies in an alternative interleaving)")
    if args.witness:
        try:
            Path(args.witness).write_text(write_script(script), encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {args.witness}: {exc.strerror}") from None
    return FAILED


def cmd_fuzz(args) -> int:
    decl = load_contract(args.file)
    if decl is None:
        return FAILED
    u = default_universe(args.file, args.universe)
    if u is None:
        raise InputError("fuzzing needs a universe for its alphabets (--universe)")
    report = fuzz(decl, u.agrees, u.calls, runs=args.runs, seed=args.seed)
    print(f"{report.runs} runs, {report.stuck} stuck, {report.rejected} rejected calls, "
          f"{len(report.violations)} violations")
    for i, script, msg in report.violations[:5]:
        print(f"run {i}: {msg}")
        for line in write_script(script).splitlines():
            print("  " + line)
    return OK if report.ok else FAILED


def cmd_corpus(args) -> int:
    root = corpus_dir()
    for p in sorted(root.glob("*.stipula")):
        print(f"corpus:{p.stem}")
    for p in sorted((root / "traces").glob("*.trace")):
        print(f"corpus:traces/{p.stem}")
    return OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stipula", description="Parse, run and compare Stipula contracts.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a contract")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", help="well-formedness checks and lints")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a trace script, printing JSON-lines labels")
    p.add_argument("file")
    p.add_argument("trace")
    p.add_argument("--until", type=int, help="keep ticking up to this clock")
    p.add_argument("--strict-events", action="store_true",
                   help="never discard stale events (a stale event deadlocks)")
    p.add_argument("--hide-silent", action="store_true", help="omit silent steps and ticks")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("repl", help="step through a contract interactively")
    p.add_argument("file")
    p.add_argument("--universe", help="alphabet for the menu (default: sibling .json)")
    p.add_argument("--strict-events", action="store_true")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("lts", help="explore the bounded transition system")
    p.add_argument("file")
    p.add_argument("universe")
    p.add_argument("--dot", help="write Graphviz output here ('-' for stdout)")
    p.set_defaults(func=cmd_lts)

    p = sub.add_parser("equiv", help="decide bounded legal bisimilarity")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("universe")
    p.add_argument("--witness", help="write a distinguishing trace script here")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("fuzz", help="random runs checked for asset conservation")
    p.add_argument("file")
    p.add_argument("--universe")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1000)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("corpus", help="list the bundled contracts and traces")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except ExplosionError as exc:
        print(f"error: {exc}; raise STIPULA_NODE_CAP or shrink the universe", file=sys.stderr)
        return TOO_BIG


if __name__ == "__main__":
    sys.exit(main())
