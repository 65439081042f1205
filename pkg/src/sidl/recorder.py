"""Append-only run log (.sidlrec) and deterministic replay.

One JSON object per line, keys in fixed order, terms in canonical text
form, reals in shortest round-trip decimal form. The header embeds the
full game source so a record is self-contained; replay re-executes the
engine from it and demands bit-identical chronon entries.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import IO, List, Optional, Tuple

from .engine import (
    Command, StepResult, annotated_facts, apply_command, is_terminal,
    step_chronon,
)
from .errors import CommandError, DivergenceError, MalformedLog
from .parser import parse_sidl
from .state import GameState, init_game
from .terms import to_text

FORMAT_VERSION = 1


def source_hash(source: str) -> str:
    return hashlib.sha256(source.encode("utf-8")).hexdigest()


def header_entry(source: str, seed: int, agents: List[str],
                 chronon_ms: int) -> dict:
    return {
        "type": "header",
        "version": FORMAT_VERSION,
        "spec_sha256": source_hash(source),
        "seed": seed,
        "agents": list(agents),
        "chronon_ms": chronon_ms,
        "source": source,
    }


def command_entry(chronon: int, agent: str, bid: int, alias: str,
                  accepted: bool, error: Optional[str] = None) -> dict:
    entry = {
        "type": "command",
        "chronon": chronon,
        "agent": agent,
        "bid": bid,
        "alias": alias,
        "accepted": accepted,
    }
    if error is not None:
        entry["error"] = error
    return entry


def chronon_entry(chronon: int, result: StepResult, state: GameState,
                  spec) -> dict:
    executed = [
        {
            "branching": idx,
            "operator": to_text(op),
            "effects": {
                "removals": [to_text(f) for f in eff.removals],
                "next": [to_text(f) for f in eff.next_facts],
                "payoffs": [[agent, amount] for agent, amount in eff.payoffs],
            },
        }
        for idx, op, eff in result.executed
    ]
    facts = [[to_text(f), barred] for f, barred in annotated_facts(state, spec)]
    return {
        "type": "chronon",
        "chronon": chronon,
        "executed": executed,
        "facts": facts,
        "accounts": dict(state.accounts),
        "terminal": result.terminal,
    }


def dumps_entry(entry: dict) -> str:
    return json.dumps(entry, separators=(",", ":"))


class Recorder:
    """Single-writer append-only log; flushed at chronon boundaries."""

    def __init__(self, out: IO[str]):
        self._out = out
        self._wrote_header = False

    def record(self, entry: dict) -> None:
        if not self._wrote_header:
            if entry.get("type") != "header":
                raise MalformedLog("first record entry must be the header")
            self._wrote_header = True
        elif entry.get("type") == "header":
            raise MalformedLog("duplicate header entry")
        self._out.write(dumps_entry(entry) + "\n")
        if entry.get("type") == "chronon":
            self._out.flush()


def write_record(entries: List[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        rec = Recorder(f)
        for entry in entries:
            rec.record(entry)


def load_record(path: str) -> List[str]:
    with open(path, "r", encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f if line.strip()]


@dataclass
class ReplayResult:
    final_state: GameState
    entries: List[dict]


def _first_mismatch_field(expected: dict, got: dict) -> str:
    for key in expected:
        if expected.get(key) != got.get(key):
            return key
    return "entry"


def replay(lines: List[str]) -> ReplayResult:
    """Re-execute a record and verify every chronon entry bit-for-bit."""
    if not lines:
        raise MalformedLog("empty log")
    try:
        entries = [json.loads(line) for line in lines]
    except json.JSONDecodeError as e:
        raise MalformedLog(f"bad JSON: {e}") from e
    header = entries[0]
    if header.get("type") != "header":
        raise MalformedLog("log does not start with a header entry")
    if header.get("version") != FORMAT_VERSION:
        raise MalformedLog(f"unsupported format version {header.get('version')}")
    source = header.get("source")
    if not isinstance(source, str):
        raise MalformedLog("header carries no source")
    if header.get("spec_sha256") != source_hash(source):
        raise MalformedLog("header source hash mismatch")

    spec = parse_sidl(source)
    state = init_game(spec)
    rng = random.Random(header["seed"])
    out_entries = [header_entry(source, header["seed"], header["agents"],
                                header["chronon_ms"])]
    if dumps_entry(out_entries[0]) != lines[0]:
        raise DivergenceError(-1, "header", "header does not re-serialize")

    expected_chronon = 0
    for line, entry in zip(lines[1:], entries[1:]):
        kind = entry.get("type")
        if kind == "command":
            if entry.get("chronon") != state.chronon:
                raise MalformedLog(
                    f"command entry at chronon {entry.get('chronon')} while "
                    f"engine is at {state.chronon}")
            cmd = Command(entry["agent"], entry["bid"], entry["alias"],
                          arrival=state.chronon)
            accepted, error = True, None
            try:
                apply_command(state, spec, cmd)
            except CommandError as e:
                accepted, error = False, e.code
            regenerated = command_entry(entry["chronon"], entry["agent"],
                                        entry["bid"], entry["alias"],
                                        accepted, error)
            if dumps_entry(regenerated) != line:
                raise DivergenceError(state.chronon,
                                      _first_mismatch_field(entry, regenerated))
            out_entries.append(regenerated)
        elif kind == "chronon":
            if entry.get("chronon") != expected_chronon:
                raise MalformedLog(
                    f"chronon entries out of order: expected "
                    f"{expected_chronon}, got {entry.get('chronon')}")
            result = step_chronon(state, spec, rng)
            regenerated = chronon_entry(expected_chronon, result, state, spec)
            if dumps_entry(regenerated) != line:
                raise DivergenceError(expected_chronon,
                                      _first_mismatch_field(entry, regenerated))
            out_entries.append(regenerated)
            expected_chronon += 1
        else:
            raise MalformedLog(f"unknown entry type {kind!r}")
    return ReplayResult(final_state=state, entries=out_entries)


def replay_file(path: str) -> ReplayResult:
    return replay(load_record(path))
