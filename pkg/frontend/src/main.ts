/** Console entry point: wire the shift client, the event stream and the board. */

import { ApiError, ShiftClient } from "./api.js";
import { apply, emptyBoard } from "./board.js";
import { subscribe } from "./events.js";
import { connectionBanner, noteStart, render, toast } from "./ui.js";
import type { Agent, ShiftEvent } from "./types.js";

const root = document.getElementById("app")!;
const state = emptyBoard();
let client: ShiftClient | null = null;

const handlers = {
  onDelegate: (task: number) => send("delegate", task),
  onReassign: (task: number) => send("reassign", task),
  onDone: (task: number) => {
    client?.complete(task).catch((err) => toast(describe(err)));
  },
};

function describe(err: unknown): string {
  return err instanceof ApiError ? `refused: ${err.detail}` : String(err);
}

function send(kind: "delegate" | "reassign", task: number): void {
  client?.message(kind, task).catch((err) => toast(describe(err)));
}

function onEvent(event: ShiftEvent): void {
  if (event.kind === "task_start" && state.active) {
    noteStart(state.active, Number(event.task), event.agent as Agent);
  }
  apply(state, event);
  render(root, state, handlers);
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const shiftId = params.get("shift") ?? "1";
  const speed = Number(params.get("speed") ?? "1");
  client = ShiftClient.attach("", shiftId);

  const controls = document.getElementById("controls")!;
  const startButton = document.createElement("button");
  startButton.className = "btn primary";
  startButton.textContent = `Start shift ${shiftId} (x${speed})`;
  startButton.onclick = () => {
    client!
      .start(speed)
      .then(() => (startButton.disabled = true))
      .catch((err) => toast(describe(err)));
  };
  controls.appendChild(startButton);

  subscribe(
    (from) => client!.eventsUrl(from),
    onEvent,
    (connected) => connectionBanner(!connected),
    () => {
      state.finished = true;
      render(root, state, handlers);
    },
  );
  render(root, state, handlers);
}

void boot();
