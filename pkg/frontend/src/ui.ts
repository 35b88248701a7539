/**
 * DOM rendering for the operator console.  Strictly presentational: every
 * click turns into a service call, and the board re-renders only from
 * acknowledged server events (no optimistic updates).
 */

import type { BoardState, JobBoard } from "./board.js";
import type { Agent } from "./types.js";

export interface Handlers {
  onDelegate(task: number): void;
  onReassign(task: number): void;
  onDone(task: number): void;
}

const el = (tag: string, cls?: string, text?: string): HTMLElement => {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
};

const taskLabel = (task: number) => (task === -1 ? "homing" : `T${task}`);

function taskCard(
  board: JobBoard,
  agent: Agent,
  task: number,
  status: "queued" | "current" | "completed",
  handlers: Handlers,
): HTMLElement {
  const card = el("div", `task ${status}`);
  card.appendChild(el("span", "task-name", taskLabel(task)));
  if (task === -1) return card;
  if (status === "current" && agent === "human") {
    const done = el("button", "btn done", "Done");
    done.onclick = () => handlers.onDone(task);
    card.appendChild(done);
  } else if (status !== "completed") {
    if (agent === "robot") {
      const take = el("button", "btn", "I'll take this");
      take.onclick = () => handlers.onReassign(task);
      card.appendChild(take);
    } else {
      const give = el("button", "btn", "Robot, take this");
      give.onclick = () => handlers.onDelegate(task);
      card.appendChild(give);
    }
  }
  return card;
}

function column(board: JobBoard, agent: Agent, handlers: Handlers): HTMLElement {
  const root = el("div", "column");
  root.appendChild(el("h3", undefined, agent === "human" ? "You" : "Robot"));
  const current = board.current[agent];
  board.levels.forEach((queues, index) => {
    const levelNo = index + 1;
    const box = el("div", `level ${levelNo === board.level ? "active" : ""}`);
    box.appendChild(el("div", "level-tag", `level ${levelNo}`));
    if (levelNo === board.level && current !== null) {
      box.appendChild(taskCard(board, agent, current, "current", handlers));
    }
    for (const task of agent === "human" ? queues.human : queues.robot) {
      box.appendChild(taskCard(board, agent, task, "queued", handlers));
    }
    root.appendChild(box);
  });
  const doneBox = el("div", "level completed-box");
  doneBox.appendChild(el("div", "level-tag", "completed"));
  for (const task of board.completed) {
    if ((agent === "human") === humanDid(board, task)) {
      doneBox.appendChild(taskCard(board, agent, task, "completed", handlers));
    }
  }
  root.appendChild(doneBox);
  return root;
}

// completion events do not say which queue a task came from; remember starts
const startedBy = new WeakMap<JobBoard, Map<number, Agent>>();

export function noteStart(board: JobBoard, task: number, agent: Agent): void {
  let map = startedBy.get(board);
  if (!map) {
    map = new Map();
    startedBy.set(board, map);
  }
  map.set(task, agent);
}

function humanDid(board: JobBoard, task: number): boolean {
  return startedBy.get(board)?.get(task) === "human";
}

function gauges(board: JobBoard): HTMLElement {
  const root = el("div", "gauges");
  for (const metric of board.metrics) {
    const gauge = el("div", `gauge ${metric.satisfied ? "ok" : "violated"}`);
    gauge.appendChild(el("span", "gauge-name", metric.id));
    const bar = el("div", "bar");
    const fill = el("div", "fill");
    fill.style.width = `${Math.min(100, (metric.value / metric.bound) * 100)}%`;
    bar.appendChild(fill);
    gauge.appendChild(bar);
    gauge.appendChild(
      el("span", "gauge-value", `${metric.value.toFixed(2)} / ${metric.bound}`),
    );
    root.appendChild(gauge);
  }
  return root;
}

export function render(root: HTMLElement, state: BoardState, handlers: Handlers): void {
  root.textContent = "";
  const header = el("div", "status-line");
  header.appendChild(el("span", "clock", `t = ${(state.clock / 1000).toFixed(1)} s`));
  if (state.finished) header.appendChild(el("span", "badge done", "shift complete"));
  root.appendChild(header);

  const board = state.active;
  if (board) {
    root.appendChild(el("h2", undefined, `Job ${board.job}`));
    const columns = el("div", "board");
    columns.appendChild(column(board, "human", handlers));
    columns.appendChild(column(board, "robot", handlers));
    root.appendChild(columns);
  }

  for (const job of state.jobs) {
    if (job.metrics.length) {
      root.appendChild(el("h4", undefined, `Job ${job.job} quality`));
      root.appendChild(gauges(job));
    }
  }

  const ticker = el("div", "ticker");
  ticker.appendChild(el("h4", undefined, "Events"));
  for (const entry of state.ticker.slice(-12).reverse()) {
    ticker.appendChild(
      el("div", `tick ${entry.flavor}`, `[${(entry.t / 1000).toFixed(1)}s] ${entry.text}`),
    );
  }
  root.appendChild(ticker);
}

export function toast(message: string): void {
  const node = el("div", "toast", message);
  document.body.appendChild(node);
  setTimeout(() => node.remove(), 3500);
}

export function connectionBanner(visible: boolean): void {
  let banner = document.getElementById("conn-banner");
  if (!banner) {
    banner = el("div", "conn-banner", "connection lost - resubscribing...");
    banner.id = "conn-banner";
    document.body.appendChild(banner);
  }
  banner.style.display = visible ? "block" : "none";
}
