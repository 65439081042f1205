import { describe, expect, it } from "vitest";

import { parseServerMessage } from "../src/protocol.js";

describe("parseServerMessage", () => {
  it("accepts a well-formed view", () => {
    const msg = parseServerMessage(
      '{"type":"view","chronon":3,"facts":["state(1)"],"accounts":{"alice":0.0},"terminal":false}',
    );
    expect(msg).not.toBeNull();
    expect(msg!.type).toBe("view");
  });

  it("accepts welcome with switches and chronon_ms", () => {
    const msg = parseServerMessage(
      '{"type":"welcome","agent":"alice","source":"terminal.","switches":[1],"chronon_ms":40}',
    );
    expect(msg).toMatchObject({ type: "welcome", agent: "alice", chronon_ms: 40 });
  });

  it("rejects invalid JSON", () => {
    expect(parseServerMessage("{nope")).toBeNull();
  });

  it("rejects unknown types", () => {
    expect(parseServerMessage('{"type":"mystery"}')).toBeNull();
  });

  it("rejects non-object payloads", () => {
    expect(parseServerMessage('"view"')).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
  });

  it("rejects views missing required fields", () => {
    expect(parseServerMessage('{"type":"view","chronon":1}')).toBeNull();
    expect(
      parseServerMessage('{"type":"view","chronon":1,"facts":[],"accounts":null,"terminal":true}'),
    ).toBeNull();
  });

  it("rejects command_ack without accepted flag", () => {
    expect(parseServerMessage('{"type":"command_ack","chronon":2}')).toBeNull();
  });

  it("rejects reject without a code", () => {
    expect(parseServerMessage('{"type":"reject"}')).toBeNull();
  });
});
