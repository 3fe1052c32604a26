"""Command-line driver.

Exit codes: 0 success, 1 user error (parse, ill-typed, invalid configuration),
2 repair or oracle failure, 3 correspondence failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .driver import ConfigInvalid, Driver, DriverError, ProperFailed
from .kernel import IllTyped, KernelError
from .propergen import generate_proper
from .rewriting import RewriteError
from .setoids import ProperInstance, proper_statement, register_proper
from .surface.lexer import ParseError
from .surface.parser import parse_plan, parse_term
from .surface.printer import Printer
from .surface.resolve import ResolveError, resolve
from .transform import ImproperAnnotation, MissingDependency

USER_ERRORS = (ParseError, ResolveError, IllTyped, KernelError, ConfigInvalid)
REPAIR_ERRORS = (RewriteError, ImproperAnnotation, MissingDependency, ProperFailed)


def _emit(driver: Driver, out: str | None, since: int):
    printer = Printer(driver.env)
    lines = []
    for (name, kind) in driver.emitted[since:]:
        if kind == "inductive":
            continue
        d = driver.env.definition(name)
        lines.append(printer.definition(name, d.type, d.body, d.opaque_for_repair))
    text = "\n\n".join(lines) + ("\n" if lines else "")
    if out:
        Path(out).write_text(text)
    elif lines:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    driver = Driver()
    for path in args.paths:
        driver.load_file(path)
        print(f"checked {path}: ok")
    return 0


def cmd_repair(args) -> int:
    driver = Driver()
    driver.load_file(args.config)
    since = len(driver.emitted)
    if args.src and args.tgt:
        if not args.use:
            print("error: --from/--as need --use CONFIG", file=sys.stderr)
            return 1
        from .surface.ast import ILift
        driver.run_item(ILift(0, args.use, args.src, args.tgt))
    _emit(driver, args.out, 0 if args.full else since)
    return 0


def cmd_proper(args) -> int:
    driver = Driver()
    driver.load_file(args.config)
    sig = []
    for part in args.sig.split("==>"):
        sig.append(resolve(driver.env, parse_term(part.strip())))
    from .kernel import ConstRef, declare_definition
    inst = generate_proper(driver.env, driver._registry(), ConstRef(args.fn), sig)
    if inst is None:
        print(f"failed: no properness proof found for {args.fn}")
        return 2
    name = f"{args.fn}_proper"
    stmt = proper_statement(driver.env, inst.subject, list(inst.signature))
    driver.env = declare_definition(driver.env, name, stmt, inst.proof)
    printer = Printer(driver.env)
    text = printer.definition(name, stmt, inst.proof)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_correspond(args) -> int:
    driver = Driver()
    plan = parse_plan(Path(args.plan).read_text())
    report = driver.run_plan(plan, base_dir=Path(args.plan).parent,
                             budget=args.budget, seed=args.seed)
    if args.json:
        payload = [{"src": r.src, "tgt": r.tgt, "checked": r.total,
                    "failed": r.failed, "ok": r.ok,
                    "counterexample": r.counterexample, "error": r.error}
                   for r in report.results]
        print(json.dumps(payload, indent=2))
    else:
        for line in report.lines():
            print(line)
    return 0 if report.ok else 3


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="proofrepair")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type-check declaration files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("repair", help="run a repair development")
    p.add_argument("--config", required=True)
    p.add_argument("--use", help="configuration name for --from/--as")
    p.add_argument("--from", dest="src")
    p.add_argument("--as", dest="tgt")
    p.add_argument("--out")
    p.add_argument("--full", action="store_true",
                   help="emit every declaration, not only new ones")
    p.set_defaults(fn=cmd_repair)

    p = sub.add_parser("proper", help="generate a properness instance")
    p.add_argument("--config", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--sig", required=True, help='e.g. "eq_GZ ==> eq_GZ ==> eq_GZ"')
    p.add_argument("--out")
    p.set_defaults(fn=cmd_proper)

    p = sub.add_parser("correspond", help="run a correspondence plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_correspond)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except USER_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except REPAIR_ERRORS as e:
        print(f"repair failure: {e}", file=sys.stderr)
        return 2
    except DriverError as e:
        cause = str(e)
        print(f"error: {cause}", file=sys.stderr)
        return 2 if "pointwise gate" in cause or "oracle" in cause else 1


if __name__ == "__main__":
    raise SystemExit(main())
