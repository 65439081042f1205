/** Pure HTML renderers; the game is generic, so the UI is generic too.
 * Facts arrive as canonical term text and are shown verbatim.
 */

import { ClientSession } from "./session.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderFacts(facts: string[]): string {
  if (facts.length === 0) {
    return '<ul class="facts"><li class="empty">(nothing visible)</li></ul>';
  }
  const items = facts
    .map((f) => `<li><code>${escapeHtml(f)}</code></li>`)
    .join("");
  return `<ul class="facts">${items}</ul>`;
}

export function renderAccounts(accounts: Record<string, number>): string {
  const rows = Object.entries(accounts)
    .map(
      ([agent, balance]) =>
        `<tr><td>${escapeHtml(agent)}</td><td>${balance}</td></tr>`,
    )
    .join("");
  return `<table class="accounts"><tbody>${rows}</tbody></table>`;
}

export function renderSwitches(session: ClientSession): string {
  const blocks = session.switches.map((control) => {
    const buttons = control.aliases
      .map((alias) => {
        const classes = ["alias"];
        if (alias === control.selection) classes.push("selected");
        if (alias === control.pending) classes.push("pending");
        return (
          `<button class="${classes.join(" ")}" data-bid="${control.bid}" ` +
          `data-alias="${escapeHtml(alias)}">${escapeHtml(alias)}</button>`
        );
      })
      .join("");
    return `<div class="switch" data-bid="${control.bid}">` +
      `<span class="label">switch ${control.bid}</span>${buttons}</div>`;
  });
  return blocks.join("");
}

export function renderCountdown(fraction: number, remainingMs: number): string {
  const percent = Math.round((1 - fraction) * 100);
  return (
    `<div class="countdown"><div class="bar" style="width:${percent}%"></div>` +
    `<span class="remaining">${remainingMs} ms</span></div>`
  );
}

export function renderStatus(session: ClientSession): string {
  if (session.phase === "rejected") {
    return `<div class="banner error">rejected: ${escapeHtml(session.rejectCode ?? "")}</div>`;
  }
  const chronon = session.latestView ? session.latestView.chronon : "-";
  const err = session.lastAckError
    ? ` <span class="ack-error">${escapeHtml(session.lastAckError)}</span>`
    : "";
  return `<div class="banner">${escapeHtml(session.agent)} | chronon ${chronon}${err}</div>`;
}

export function renderGameOver(accounts: Record<string, number>): string {
  return `<div class="game-over"><h2>Game over</h2>${renderAccounts(accounts)}</div>`;
}

/** Whole-page render from session state; main.ts injects this into #app. */
export function renderSession(session: ClientSession): string {
  if (session.phase === "rejected") {
    return renderStatus(session);
  }
  if (session.phase === "over" && session.finalAccounts) {
    return renderStatus(session) + renderGameOver(session.finalAccounts);
  }
  const view = session.latestView;
  const facts = view ? renderFacts(view.facts) : renderFacts([]);
  const accounts = view ? renderAccounts(view.accounts) : "";
  return (
    renderStatus(session) +
    renderCountdown(session.countdownFraction(), session.countdownRemainingMs()) +
    renderSwitches(session) +
    facts +
    accounts
  );
}
