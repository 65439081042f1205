"""Operator command line: check, run, serve, replay.

Exit codes: 0 success, 1 input error, 2 stopped before terminal,
3 replay divergence.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from typing import Dict, List, Optional

from .engine import Policy, make_policy, run_headless
from .errors import DivergenceError, MalformedLog, ParseError, SidlError
from .parser import parse_sidl, validate
from .recorder import dumps_entry, replay_file, write_record
from .server import GgmaServer, ServerConfig


def _color_enabled(args) -> bool:
    return not args.no_color and not os.environ.get("NO_COLOR") \
        and sys.stdout.isatty()


def _paint(text: str, code: str, enabled: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if enabled else text


def _load_spec(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            source = f.read()
    except OSError as e:
        raise SidlError(f"cannot read {path}: {e}")
    return parse_sidl(source)


def _parse_policies(pairs: List[str], seed: int) -> Dict[str, Policy]:
    policies = {}
    for pair in pairs:
        agent, _, kind = pair.partition("=")
        if not agent or not kind:
            raise SidlError(f"bad --policy {pair!r}, expected agent=kind")
        policies[agent] = make_policy(kind, seed=f"{seed}:{agent}")
    return policies


def cmd_check(args) -> int:
    spec = _load_spec(args.file)
    report = validate(spec)
    color = _color_enabled(args)
    for issue in report.errors:
        print(_paint(f"error {issue}", "31", color))
    for issue in report.warnings:
        print(_paint(f"warning {issue}", "33", color))
    if report.ok:
        print(_paint("OK", "32", color))
        return 0
    return 1


def cmd_run(args) -> int:
    spec = _load_spec(args.file)
    report = validate(spec)
    if not report.ok:
        for issue in report.errors:
            print(f"error {issue}", file=sys.stderr)
        return 1
    policies = _parse_policies(args.policy, args.seed)
    result = run_headless(spec, policies, seed=args.seed,
                          max_chronons=args.max_chronons)
    if args.record:
        write_record(result.entries, args.record)
        print(f"record: {args.record}")
    for agent in spec.agents:
        print(f"{agent} {result.final_state.accounts[agent]}")
    if result.max_chronons_exceeded:
        print(f"stopped after {args.max_chronons} chronons without terminal",
              file=sys.stderr)
        return 2
    return 0


def cmd_serve(args) -> int:
    spec = _load_spec(args.file)
    report = validate(spec)
    if not report.ok:
        for issue in report.errors:
            print(f"error {issue}", file=sys.stderr)
        return 1
    if args.config:
        config = ServerConfig.from_file(args.config)
    else:
        config = ServerConfig()
    if args.port is not None:
        config.port = args.port
    if args.chronon_ms is not None:
        config.chronon_ms = args.chronon_ms
    if args.seed is not None:
        config.seed = args.seed
    if args.record:
        config.record_path = args.record
    for pair in args.bots:
        agent, _, kind = pair.partition("=")
        config.bots[agent] = kind

    async def main():
        server = GgmaServer(spec, config)
        await server.start()
        print(f"serving on {config.host}:{server.port} "
              f"(chronon {config.chronon_ms} ms)")
        try:
            await server.run_game()
        finally:
            await server.close()

    try:
        asyncio.run(main())
    except OSError as e:
        print(f"PortUnavailable: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    return 0


def cmd_replay(args) -> int:
    try:
        result = replay_file(args.file)
    except DivergenceError as e:
        print(str(e), file=sys.stderr)
        return 3
    except MalformedLog as e:
        print(f"malformed log: {e}", file=sys.stderr)
        return 1
    state = result.final_state
    print(f"replay OK: {state.chronon} chronons")
    for agent, balance in state.accounts.items():
        print(f"{agent} {balance}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidl", description="SIDL game tools: validate, run, serve, replay")
    parser.add_argument("--no-color", action="store_true",
                        help="disable ANSI colors (NO_COLOR also honored)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check", help="validate a game file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="headless run with scripted policies")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record", help="write a .sidlrec log here")
    p.add_argument("--max-chronons", type=int, default=1000)
    p.add_argument("--policy", action="append", default=[],
                   metavar="AGENT=KIND",
                   help="idle | random | fixed:a,b,c (repeatable)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="serve a game to networked players")
    p.add_argument("file")
    p.add_argument("--port", type=int)
    p.add_argument("--chronon-ms", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--record")
    p.add_argument("--bots", action="append", default=[],
                   metavar="AGENT=KIND", help="fill an agent with a policy")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="verify and replay a .sidlrec log")
    p.add_argument("file")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except SidlError as e:
        print(str(e), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
