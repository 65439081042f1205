/** Browser entry point: ?server=host:port&agent=name&token=... */

import { parseServerMessage } from "./protocol.js";
import { renderSession } from "./render.js";
import { ClientSession } from "./session.js";

function start(): void {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? window.location.host;
  const agent = params.get("agent") ?? "";
  const token = params.get("token") ?? undefined;
  const app = document.getElementById("app")!;
  if (!agent) {
    app.innerHTML = "<p>missing ?agent= query parameter</p>";
    return;
  }

  const ws = new WebSocket(`ws://${server}/`);
  const session = new ClientSession(
    { send: (m) => ws.send(JSON.stringify(m)) },
    agent,
    () => {
      app.innerHTML = renderSession(session);
    },
  );

  ws.onopen = () => session.join(token);
  ws.onmessage = (event) => {
    const msg = parseServerMessage(String(event.data));
    if (msg === null) {
      app.innerHTML = '<div class="banner error">connection error: malformed message</div>';
      return;
    }
    session.handleMessage(msg);
  };
  ws.onclose = () => {
    if (session.phase === "playing") {
      app.innerHTML += '<div class="banner error">connection closed</div>';
    }
  };

  app.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.tagName === "BUTTON" && target.dataset.bid !== undefined) {
      session.selectAlias(Number(target.dataset.bid), target.dataset.alias!);
    }
  });

  // countdown bar between views
  window.setInterval(() => {
    if (session.phase === "playing" && session.latestView) {
      const bar = app.querySelector<HTMLElement>(".countdown .bar");
      if (bar) {
        bar.style.width = `${Math.round((1 - session.countdownFraction()) * 100)}%`;
      }
    }
  }, 100);
}

start();
