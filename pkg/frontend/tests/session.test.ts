import { describe, expect, it } from "vitest";

import {
  ClientMessage,
  ServerMessage,
  parseServerMessage,
} from "../src/protocol.js";
import { ClientSession } from "../src/session.js";

import transcript from "./fixtures/example1_transcript.json";

class FakeSocket {
  sent: ClientMessage[] = [];
  send(message: ClientMessage): void {
    this.sent.push(message);
  }
}

function makeSession(now: () => number = () => 0) {
  const socket = new FakeSocket();
  const session = new ClientSession(socket, "alice", () => {}, now);
  return { socket, session };
}

const WELCOME = transcript.find((e) => e.msg.type === "welcome")!
  .msg as ServerMessage;

describe("transcript round trip", () => {
  it("replays a full session against the recorded server messages", () => {
    const { socket, session } = makeSession();
    session.join();
    for (const entry of transcript) {
      if (entry.dir === "recv") {
        const msg = parseServerMessage(JSON.stringify(entry.msg));
        expect(msg).not.toBeNull();
        // the pre-terminal view must show an empty visible-fact list:
        // state(X) is hidden from alice
        if (msg!.type === "view" && !(msg as { terminal?: boolean }).terminal) {
          expect((msg as { facts: string[] }).facts).toEqual([]);
        }
        session.handleMessage(msg!);
      } else if (entry.msg.type === "command") {
        const cmd = entry.msg as { bid: number; alias: string };
        session.selectAlias(cmd.bid, cmd.alias);
      }
    }
    expect(session.phase).toBe("over");
    expect(session.finalAccounts).toEqual({ alice: 1.0 });
    expect(socket.sent).toEqual([
      { type: "join", agent: "alice" },
      { type: "command", bid: 1, alias: "A" },
    ]);
    // ack promoted the pending choice into the confirmed selection
    expect(session.switches[0].selection).toBe("A");
    expect(session.switches[0].pending).toBeNull();
  });
});

describe("welcome handling", () => {
  it("builds controls only for owned switches, seeded from init does", () => {
    const { session } = makeSession();
    session.handleMessage(WELCOME);
    expect(session.phase).toBe("playing");
    expect(session.chrononMs).toBe(40);
    expect(session.switches).toEqual([
      { bid: 1, aliases: ["A", "B", "Wait"], selection: "Wait", pending: null },
    ]);
  });
});

describe("selectAlias", () => {
  it("ignores clicks before the welcome arrives", () => {
    const { socket, session } = makeSession();
    session.selectAlias(1, "A");
    expect(socket.sent).toEqual([]);
  });

  it("ignores aliases that do not belong to the switch", () => {
    const { socket, session } = makeSession();
    session.handleMessage(WELCOME);
    session.selectAlias(1, "Q");
    expect(socket.sent).toEqual([]);
  });

  it("last write wins while unacknowledged", () => {
    const { socket, session } = makeSession();
    session.handleMessage(WELCOME);
    session.selectAlias(1, "A");
    session.selectAlias(1, "B");
    expect(socket.sent.filter((m) => m.type === "command")).toHaveLength(2);
    expect(session.switches[0].pending).toBe("B");
    session.handleMessage({ type: "command_ack", chronon: 1, accepted: true });
    expect(session.switches[0].selection).toBe("B");
  });

  it("keeps the old selection when the ack is negative", () => {
    const { session } = makeSession();
    session.handleMessage(WELCOME);
    session.selectAlias(1, "B");
    session.handleMessage({
      type: "command_ack",
      chronon: 1,
      accepted: false,
      error: "NotYourSwitch",
    });
    expect(session.switches[0].selection).toBe("Wait");
    expect(session.switches[0].pending).toBeNull();
    expect(session.lastAckError).toBe("NotYourSwitch");
  });
});

describe("reject handling", () => {
  it("moves to rejected when the join is refused", () => {
    const { session } = makeSession();
    session.handleMessage({ type: "reject", code: "AgentTaken" });
    expect(session.phase).toBe("rejected");
    expect(session.rejectCode).toBe("AgentTaken");
  });
});

describe("countdown", () => {
  it("tracks elapsed window time and clamps to [0, 1]", () => {
    let t = 1000;
    const { session } = makeSession(() => t);
    session.handleMessage(WELCOME); // chronon_ms = 40
    session.handleMessage({
      type: "view",
      chronon: 0,
      facts: [],
      accounts: { alice: 0 },
      terminal: false,
    });
    expect(session.countdownFraction()).toBe(0);
    t = 1020;
    expect(session.countdownFraction()).toBe(0.5);
    expect(session.countdownRemainingMs()).toBe(20);
    t = 2000;
    expect(session.countdownFraction()).toBe(1);
    expect(session.countdownRemainingMs()).toBe(0);
  });

  it("reports 0 before any view arrives", () => {
    const { session } = makeSession();
    expect(session.countdownFraction()).toBe(0);
  });
});
