"""Networked game manager: lobby, wall-clock chronon windows, filtered views.

One persistent bidirectional connection per player. Two framings of the
same JSON message protocol are served on a single port, selected by
peeking at the first bytes: newline-delimited JSON for programmatic
clients, and WebSocket text frames for browsers (an HTTP GET upgrade
request switches the connection).

Messages
  client -> server:  {"type": "join", "agent": a, "token": t?}
                     {"type": "command", "bid": n, "alias": s}
  server -> client:  {"type": "welcome", "agent": a, "source": sidl,
                      "switches": [bids], "chronon_ms": n}
                     {"type": "reject", "code": c, "detail": d}
                     {"type": "view", "chronon": n, "facts": [t...],
                      "accounts": {...}, "terminal": b}
                     {"type": "command_ack", "chronon": n, "accepted": b,
                      "error": c?}
                     {"type": "game_over", "accounts": {...}}
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .ast import GameSpec
from .engine import (
    Command, apply_command, is_terminal, make_policy, step_chronon,
    visible_view,
)
from .errors import CommandError, SidlError
from .recorder import Recorder, chronon_entry, command_entry, header_entry
from .state import init_game
from .terms import to_text

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class LobbyTimeout(SidlError):
    pass


@dataclass
class ServerConfig:
    port: int = 0
    host: str = "127.0.0.1"
    chronon_ms: int = 1000
    seed: int = 0
    lobby_timeout_ms: int = 60000
    bots: Dict[str, str] = field(default_factory=dict)
    record_path: Optional[str] = None
    tokens: Dict[str, str] = field(default_factory=dict)
    max_chronons: int = 100000

    @classmethod
    def from_file(cls, path: str) -> "ServerConfig":
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        known = {k: raw[k] for k in raw
                 if k in cls.__dataclass_fields__}  # ignore unknown keys
        return cls(**known)


class _Transport:
    """Framing-independent JSON message channel."""

    async def send(self, message: dict) -> None:
        raise NotImplementedError

    async def recv(self) -> Optional[dict]:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError


class _NdjsonTransport(_Transport):
    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter):
        self.reader = reader
        self.writer = writer

    async def send(self, message: dict) -> None:
        self.writer.write(json.dumps(message, separators=(",", ":")).encode()
                          + b"\n")
        await self.writer.drain()

    async def recv(self) -> Optional[dict]:
        line = await self.reader.readline()
        if not line:
            return None
        try:
            return json.loads(line)
        except json.JSONDecodeError:
            return {"type": "_malformed"}

    def close(self) -> None:
        self.writer.close()


class _WebSocketTransport(_Transport):
    """Minimal RFC 6455 server side: text frames, ping/pong, close."""

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter):
        self.reader = reader
        self.writer = writer

    @classmethod
    async def handshake(cls, reader, writer, request_line: bytes):
        headers = {}
        while True:
            line = await reader.readline()
            if line in (b"\r\n", b"\n", b""):
                break
            name, _, value = line.decode("latin-1").partition(":")
            headers[name.strip().lower()] = value.strip()
        key = headers.get("sec-websocket-key", "")
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode()).digest()).decode()
        writer.write(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\n"
            b"Connection: Upgrade\r\n"
            b"Sec-WebSocket-Accept: " + accept.encode() + b"\r\n\r\n")
        await writer.drain()
        return cls(reader, writer)

    def _frame(self, opcode: int, payload: bytes) -> bytes:
        header = bytes([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header += bytes([n])
        elif n < 1 << 16:
            header += bytes([126]) + n.to_bytes(2, "big")
        else:
            header += bytes([127]) + n.to_bytes(8, "big")
        return header + payload

    async def send(self, message: dict) -> None:
        payload = json.dumps(message, separators=(",", ":")).encode()
        self.writer.write(self._frame(0x1, payload))
        await self.writer.drain()

    async def recv(self) -> Optional[dict]:
        while True:
            try:
                head = await self.reader.readexactly(2)
            except (asyncio.IncompleteReadError, ConnectionError):
                return None
            opcode = head[0] & 0x0F
            masked = head[1] & 0x80
            n = head[1] & 0x7F
            if n == 126:
                n = int.from_bytes(await self.reader.readexactly(2), "big")
            elif n == 127:
                n = int.from_bytes(await self.reader.readexactly(8), "big")
            mask = await self.reader.readexactly(4) if masked else b"\0" * 4
            payload = await self.reader.readexactly(n)
            if masked:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == 0x8:  # close
                self.writer.write(self._frame(0x8, b""))
                await self.writer.drain()
                return None
            if opcode == 0x9:  # ping
                self.writer.write(self._frame(0xA, payload))
                await self.writer.drain()
                continue
            if opcode in (0x1, 0x2):
                try:
                    return json.loads(payload)
                except json.JSONDecodeError:
                    return {"type": "_malformed"}

    def close(self) -> None:
        self.writer.close()


@dataclass
class _Player:
    agent: str
    transport: _Transport


class GgmaServer:
    """One game instance served over one listening port."""

    def __init__(self, spec: GameSpec, config: ServerConfig):
        self.spec = spec
        self.config = config
        self.players: Dict[str, _Player] = {}
        self.commands: asyncio.Queue = asyncio.Queue()
        self.entries: List[dict] = []
        self._lobby_full = asyncio.Event()
        self._game_over = False
        self._terminal = False
        self._current_chronon = 0
        self._server: Optional[asyncio.AbstractServer] = None
        self.port: Optional[int] = None

    # --- connection side ---

    async def _handle_connection(self, reader: asyncio.StreamReader,
                                 writer: asyncio.StreamWriter) -> None:
        first = await reader.readline()
        if not first:
            writer.close()
            return
        if first.startswith(b"GET "):
            transport: _Transport = await _WebSocketTransport.handshake(
                reader, writer, first)
            join = await transport.recv()
        else:
            transport = _NdjsonTransport(reader, writer)
            try:
                join = json.loads(first)
            except json.JSONDecodeError:
                join = {"type": "_malformed"}
        try:
            await self._run_session(transport, join)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            transport.close()

    async def _run_session(self, transport: _Transport,
                           join: Optional[dict]) -> None:
        if not isinstance(join, dict) or join.get("type") != "join":
            await transport.send({"type": "reject", "code": "MalformedMessage",
                                  "detail": "expected a join message"})
            return
        agent = join.get("agent")
        if agent not in self.spec.agents:
            await transport.send({"type": "reject", "code": "UnknownAgent",
                                  "detail": f"no agent {agent!r} in this game"})
            return
        if agent in self.players or agent in self.config.bots:
            await transport.send({"type": "reject", "code": "AgentTaken",
                                  "detail": f"{agent} is already claimed"})
            return
        expected = self.config.tokens.get(agent)
        if expected is not None and join.get("token") != expected:
            await transport.send({"type": "reject", "code": "BadToken",
                                  "detail": "join token mismatch"})
            return
        player = _Player(agent, transport)
        self.players[agent] = player
        await transport.send({
            "type": "welcome",
            "agent": agent,
            "source": self.spec.source,
            "switches": [s.bid for s in self.spec.switches if s.owner == agent],
            "chronon_ms": self.config.chronon_ms,
        })
        if self._claimed_agents() >= len(self.spec.agents):
            self._lobby_full.set()
        while True:
            message = await transport.recv()
            if message is None:
                break
            if message.get("type") == "command":
                if self._game_over:
                    await transport.send({
                        "type": "command_ack",
                        "chronon": self._current_chronon,
                        "accepted": False, "error": "GameOver"})
                    continue
                await self.commands.put((agent, message.get("bid"),
                                         message.get("alias")))
            else:
                await transport.send({"type": "reject",
                                      "code": "MalformedMessage",
                                      "detail": "unknown message type"})

    def _claimed_agents(self) -> int:
        return len(set(self.players) | set(self.config.bots))

    # --- engine side ---

    async def _process_command(self, state, agent, bid, alias, t,
                               recorder: Optional[Recorder]) -> None:
        player = self.players.get(agent)
        if not isinstance(bid, int) or not isinstance(alias, str):
            if player:
                await player.transport.send({
                    "type": "command_ack", "chronon": t,
                    "accepted": False, "error": "MalformedMessage"})
            return
        accepted, error = True, None
        try:
            apply_command(state, self.spec, Command(agent, bid, alias, t))
        except CommandError as e:
            accepted, error = False, e.code
        # the log keeps the engine code so replays re-derive it exactly;
        # the wire uses the protocol-level name for ownership errors
        wire_error = "NotYourSwitch" if error == "NotOwner" else error
        entry = command_entry(t, agent, bid, alias, accepted, error)
        self.entries.append(entry)
        if recorder:
            recorder.record(entry)
        if player:
            ack = {"type": "command_ack", "chronon": t, "accepted": accepted}
            if wire_error:
                ack["error"] = wire_error
            await player.transport.send(ack)

    async def run_game(self) -> List[dict]:
        """Lobby, then the chronon loop; returns the record entries."""
        cfg = self.config
        if self._claimed_agents() >= len(self.spec.agents):
            self._lobby_full.set()  # bots alone can fill the lobby
        try:
            await asyncio.wait_for(self._lobby_full.wait(),
                                   cfg.lobby_timeout_ms / 1000)
        except asyncio.TimeoutError:
            raise LobbyTimeout(
                f"agents unclaimed after {cfg.lobby_timeout_ms} ms: "
                f"{sorted(set(self.spec.agents) - set(self.players) - set(cfg.bots))}")
        bots = {agent: make_policy(kind, seed=f"{cfg.seed}:{agent}")
                for agent, kind in cfg.bots.items()}
        state = init_game(self.spec)
        rng = random.Random(cfg.seed)
        out = None
        recorder = None
        if cfg.record_path:
            out = open(cfg.record_path, "w", encoding="utf-8")
            recorder = Recorder(out)
        try:
            header = header_entry(self.spec.source, cfg.seed, self.spec.agents,
                                  cfg.chronon_ms)
            self.entries.append(header)
            if recorder:
                recorder.record(header)
            loop = asyncio.get_running_loop()
            terminal = is_terminal(state, self.spec)
            while not terminal and state.chronon < cfg.max_chronons:
                t = state.chronon
                self._current_chronon = t
                for agent, policy in bots.items():
                    for bid, alias in policy.commands(self.spec, state, agent, t):
                        await self.commands.put((agent, bid, alias))
                deadline = loop.time() + cfg.chronon_ms / 1000
                while True:
                    timeout = deadline - loop.time()
                    if timeout <= 0:
                        break
                    try:
                        agent, bid, alias = await asyncio.wait_for(
                            self.commands.get(), timeout)
                    except asyncio.TimeoutError:
                        break
                    await self._process_command(state, agent, bid, alias, t,
                                                recorder)
                result = step_chronon(state, self.spec, rng)
                entry = chronon_entry(t, result, state, self.spec)
                self.entries.append(entry)
                if recorder:
                    recorder.record(entry)
                for agent, player in list(self.players.items()):
                    view = visible_view(state, self.spec, agent)
                    try:
                        await player.transport.send({
                            "type": "view",
                            "chronon": t,
                            "facts": [to_text(f) for f in view.facts],
                            "accounts": view.accounts,
                            "terminal": result.terminal,
                        })
                    except ConnectionError:
                        del self.players[agent]
                terminal = result.terminal
            self._terminal = terminal
            self._game_over = True
            for player in list(self.players.values()):
                try:
                    await player.transport.send({
                        "type": "game_over",
                        "accounts": dict(state.accounts),
                    })
                except ConnectionError:
                    pass
            return self.entries
        finally:
            if out:
                out.close()

    # --- lifecycle ---

    async def start(self) -> None:
        self._server = await asyncio.start_server(
            self._handle_connection, self.config.host, self.config.port)
        self.port = self._server.sockets[0].getsockname()[1]

    async def close(self) -> None:
        for player in self.players.values():
            player.transport.close()
        if self._server:
            self._server.close()
            await self._server.wait_closed()


async def serve(spec: GameSpec, config: ServerConfig) -> List[dict]:
    """Start a server, run one full game, shut down; returns the record."""
    server = GgmaServer(spec, config)
    await server.start()
    try:
        return await server.run_game()
    finally:
        await server.close()
