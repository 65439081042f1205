import { describe, expect, it } from "vitest";

import {
  ServerMessage,
  parseServerMessage,
} from "../src/protocol.js";
import {
  renderAccounts,
  renderCountdown,
  renderFacts,
  renderGameOver,
  renderSession,
  renderStatus,
  renderSwitches,
} from "../src/render.js";
import { ClientSession } from "../src/session.js";

import transcript from "./fixtures/example1_transcript.json";

function playedSession(): ClientSession {
  const session = new ClientSession({ send: () => {} }, "alice", () => {}, () => 0);
  for (const entry of transcript) {
    if (entry.dir === "recv") {
      session.handleMessage(parseServerMessage(JSON.stringify(entry.msg))!);
    } else if (entry.msg.type === "command") {
      const cmd = entry.msg as { bid: number; alias: string };
      session.selectAlias(cmd.bid, cmd.alias);
    }
  }
  return session;
}

describe("renderFacts", () => {
  it("shows a placeholder for an empty view", () => {
    expect(renderFacts([])).toContain("(nothing visible)");
  });

  it("renders each fact as canonical text", () => {
    const html = renderFacts(["state(1)", "onhand(bob, 13)"]);
    expect(html).toContain("<code>state(1)</code>");
    expect(html).toContain("<code>onhand(bob, 13)</code>");
  });

  it("escapes markup in fact text", () => {
    expect(renderFacts(["f('<b>')"])).toContain("f('&lt;b&gt;')");
    expect(renderFacts(["f('<b>')"])).not.toContain("<b>");
  });
});

describe("renderAccounts", () => {
  it("renders one row per agent", () => {
    const html = renderAccounts({ alice: 1.0, bob: -0.5 });
    expect(html).toContain("<td>alice</td><td>1</td>");
    expect(html).toContain("<td>bob</td><td>-0.5</td>");
  });
});

describe("renderCountdown", () => {
  it("inverts the fraction into remaining width", () => {
    expect(renderCountdown(0.25, 30)).toContain("width:75%");
    expect(renderCountdown(0.25, 30)).toContain("30 ms");
  });

  it("handles the extremes", () => {
    expect(renderCountdown(0, 40)).toContain("width:100%");
    expect(renderCountdown(1, 0)).toContain("width:0%");
  });
});

describe("renderSwitches", () => {
  it("marks the confirmed and pending aliases", () => {
    const session = new ClientSession({ send: () => {} }, "alice");
    session.handleMessage(
      parseServerMessage(
        JSON.stringify(transcript.find((e) => e.msg.type === "welcome")!.msg),
      ) as ServerMessage,
    );
    session.selectAlias(1, "A");
    const html = renderSwitches(session);
    expect(html).toContain('class="alias pending" data-bid="1" data-alias="A"');
    expect(html).toContain('class="alias selected" data-bid="1" data-alias="Wait"');
    expect(html).toContain('class="alias" data-bid="1" data-alias="B"');
  });
});

describe("full session render", () => {
  it("shows the engine-reported final balance on the game-over screen", () => {
    const session = playedSession();
    const html = renderSession(session);
    expect(html).toContain("Game over");
    expect(html).toContain("<td>alice</td><td>1</td>");
  });

  it("shows a rejection banner for refused joins", () => {
    const session = new ClientSession({ send: () => {} }, "alice");
    session.handleMessage({ type: "reject", code: "BadToken" });
    expect(renderSession(session)).toContain("rejected: BadToken");
  });

  it("renders the empty fact list while the game is live", () => {
    const session = new ClientSession({ send: () => {} }, "alice", () => {}, () => 0);
    const welcome = transcript.find((e) => e.msg.type === "welcome")!.msg;
    session.handleMessage(parseServerMessage(JSON.stringify(welcome))!);
    session.handleMessage({
      type: "view",
      chronon: 0,
      facts: [],
      accounts: { alice: 0 },
      terminal: false,
    });
    const html = renderSession(session);
    expect(html).toContain("(nothing visible)");
    expect(html).toContain("chronon 0");
  });
});

describe("renderStatus / renderGameOver", () => {
  it("includes the agent name and last ack error", () => {
    const session = new ClientSession({ send: () => {} }, "bob");
    session.lastAckError = "NotYourSwitch";
    const html = renderStatus(session);
    expect(html).toContain("bob");
    expect(html).toContain("NotYourSwitch");
  });

  it("renders final accounts", () => {
    expect(renderGameOver({ alice: 2 })).toContain("<td>alice</td><td>2</td>");
  });
});
