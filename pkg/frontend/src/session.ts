/** Client session state machine, independent of DOM and transport.
 *
 * State changes only happen in handleMessage (driven by the socket's
 * message events) and selectAlias (driven by the user). The UI re-renders
 * from the session after every change.
 */

import {
  ClientMessage,
  ServerMessage,
  ViewMessage,
} from "./protocol.js";
import { parseInitialDoes, parseSwitches } from "./spec.js";

export interface MessageSink {
  send(message: ClientMessage): void;
}

export interface SwitchControl {
  bid: number;
  aliases: string[];
  /** last server-confirmed selection */
  selection: string;
  /** alias sent but not yet acknowledged */
  pending: string | null;
}

export type SessionPhase = "joining" | "playing" | "over" | "rejected";

export class ClientSession {
  readonly agent: string;
  phase: SessionPhase = "joining";
  chrononMs = 0;
  switches: SwitchControl[] = [];
  latestView: ViewMessage | null = null;
  finalAccounts: Record<string, number> | null = null;
  rejectCode: string | null = null;
  lastAckError: string | null = null;
  /** monotonic-ish timestamp of the last view, for the countdown bar */
  lastViewAt = 0;

  private socket: MessageSink;
  private onChange: () => void;
  private now: () => number;

  constructor(
    socket: MessageSink,
    agent: string,
    onChange: () => void = () => {},
    now: () => number = () => Date.now(),
  ) {
    this.socket = socket;
    this.agent = agent;
    this.onChange = onChange;
    this.now = now;
  }

  join(token?: string): void {
    const msg: ClientMessage = token
      ? { type: "join", agent: this.agent, token }
      : { type: "join", agent: this.agent };
    this.socket.send(msg);
  }

  /** Flip an owned switch; last selection in a window wins server-side. */
  selectAlias(bid: number, alias: string): void {
    if (this.phase !== "playing") return;
    const control = this.switches.find((s) => s.bid === bid);
    if (!control || !control.aliases.includes(alias)) return;
    control.pending = alias;
    this.socket.send({ type: "command", bid, alias });
    this.onChange();
  }

  handleMessage(msg: ServerMessage): void {
    switch (msg.type) {
      case "welcome": {
        const owned = new Set(msg.switches);
        const initial = parseInitialDoes(msg.source);
        this.switches = parseSwitches(msg.source)
          .filter((s) => owned.has(s.bid))
          .map((s) => ({
            bid: s.bid,
            aliases: s.aliases,
            selection: initial.get(s.bid) ?? s.aliases[0],
            pending: null,
          }));
        this.chrononMs = msg.chronon_ms;
        this.phase = "playing";
        break;
      }
      case "reject": {
        this.rejectCode = msg.code;
        if (this.phase === "joining") this.phase = "rejected";
        break;
      }
      case "view": {
        this.latestView = msg;
        this.lastViewAt = this.now();
        break;
      }
      case "command_ack": {
        for (const control of this.switches) {
          if (control.pending === null) continue;
          if (msg.accepted) {
            control.selection = control.pending;
          }
          control.pending = null;
        }
        this.lastAckError = msg.accepted ? null : (msg.error ?? "rejected");
        break;
      }
      case "game_over": {
        this.finalAccounts = msg.accounts;
        this.phase = "over";
        break;
      }
    }
    this.onChange();
  }

  /** Fraction of the current chronon window already elapsed, in [0, 1]. */
  countdownFraction(at: number = this.now()): number {
    if (this.chrononMs <= 0 || this.lastViewAt === 0) return 0;
    const elapsed = at - this.lastViewAt;
    return Math.max(0, Math.min(1, elapsed / this.chrononMs));
  }

  countdownRemainingMs(at: number = this.now()): number {
    return Math.round(this.chrononMs * (1 - this.countdownFraction(at)));
  }
}
