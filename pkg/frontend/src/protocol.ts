/** Wire protocol messages, mirroring the server's JSON schema. */

export interface JoinMessage {
  type: "join";
  agent: string;
  token?: string;
}

export interface CommandMessage {
  type: "command";
  bid: number;
  alias: string;
}

export type ClientMessage = JoinMessage | CommandMessage;

export interface WelcomeMessage {
  type: "welcome";
  agent: string;
  source: string;
  switches: number[];
  chronon_ms: number;
}

export interface RejectMessage {
  type: "reject";
  code: string;
  detail?: string;
}

export interface ViewMessage {
  type: "view";
  chronon: number;
  facts: string[];
  accounts: Record<string, number>;
  terminal: boolean;
}

export interface CommandAckMessage {
  type: "command_ack";
  chronon: number;
  accepted: boolean;
  error?: string;
}

export interface GameOverMessage {
  type: "game_over";
  accounts: Record<string, number>;
}

export type ServerMessage =
  | WelcomeMessage
  | RejectMessage
  | ViewMessage
  | CommandAckMessage
  | GameOverMessage;

const SERVER_TYPES = new Set([
  "welcome",
  "reject",
  "view",
  "command_ack",
  "game_over",
]);

/** Parse one incoming frame; returns null for anything malformed. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as { type?: unknown };
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) return null;
  switch (msg.type) {
    case "welcome": {
      const m = msg as Partial<WelcomeMessage>;
      if (typeof m.agent !== "string" || typeof m.source !== "string") return null;
      if (!Array.isArray(m.switches) || typeof m.chronon_ms !== "number") return null;
      break;
    }
    case "view": {
      const m = msg as Partial<ViewMessage>;
      if (typeof m.chronon !== "number" || !Array.isArray(m.facts)) return null;
      if (typeof m.accounts !== "object" || m.accounts === null) return null;
      if (typeof m.terminal !== "boolean") return null;
      break;
    }
    case "command_ack": {
      const m = msg as Partial<CommandAckMessage>;
      if (typeof m.chronon !== "number" || typeof m.accepted !== "boolean") return null;
      break;
    }
    case "reject": {
      if (typeof (msg as Partial<RejectMessage>).code !== "string") return null;
      break;
    }
    case "game_over": {
      const m = msg as Partial<GameOverMessage>;
      if (typeof m.accounts !== "object" || m.accounts === null) return null;
      break;
    }
  }
  return msg as ServerMessage;
}
