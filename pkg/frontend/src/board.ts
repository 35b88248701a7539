/**
 * Board state as a pure function of the event stream.
 *
 * No scheduling logic lives here: the reducer only mirrors what the server
 * announced, so replaying the log from seq 0 always reproduces the same
 * board (the round-trip test holds the server to that).
 */

import type { Agent, MetricSnapshot, ShiftEvent } from "./types.js";

export interface TickerEntry {
  t: number;
  text: string;
  flavor: "info" | "move" | "reject" | "done";
}

export interface JobBoard {
  job: string;
  levels: { human: number[]; robot: number[] }[];
  level: number;
  current: { human: number | null; robot: number | null };
  completed: number[];
  metrics: MetricSnapshot[];
  cycleMs: number | null;
}

export interface BoardState {
  clock: number;
  jobs: JobBoard[];
  active: JobBoard | null;
  finished: boolean;
  ticker: TickerEntry[];
  acceptedMessages: { t: number; msg: string; task: number }[];
}

export function emptyBoard(): BoardState {
  return {
    clock: 0,
    jobs: [],
    active: null,
    finished: false,
    ticker: [],
    acceptedMessages: [],
  };
}

const taskName = (task: number) => (task === -1 ? "homing" : `T${task}`);

function queuesOf(board: JobBoard, agent: Agent): number[][] {
  return board.levels.map((lv) => (agent === "human" ? lv.human : lv.robot));
}

function removeTask(board: JobBoard, agent: Agent, task: number): void {
  for (const queue of queuesOf(board, agent)) {
    const at = queue.indexOf(task);
    if (at >= 0) {
      queue.splice(at, 1);
      return;
    }
  }
}

/** Apply one event in place; events must arrive in seq order. */
export function apply(state: BoardState, event: ShiftEvent): BoardState {
  state.clock = event.t;
  const board = state.active;
  switch (event.kind) {
    case "job_start": {
      const assignment = event.assignment as { levels: { S_H: number[]; S_R: number[] }[] };
      const job: JobBoard = {
        job: String(event.job),
        levels: assignment.levels.map((lv) => ({
          human: [...lv.S_H],
          robot: [...lv.S_R],
        })),
        level: 1,
        current: { human: null, robot: null },
        completed: [],
        metrics: [],
        cycleMs: null,
      };
      state.jobs.push(job);
      state.active = job;
      state.ticker.push({ t: event.t, text: `job ${job.job} assigned`, flavor: "info" });
      break;
    }
    case "level_start":
      if (board) board.level = Number(event.level);
      break;
    case "task_start": {
      if (!board) break;
      const agent = event.agent as Agent;
      const task = Number(event.task);
      removeTask(board, agent, task);
      board.current[agent] = task;
      break;
    }
    case "task_complete": {
      if (!board) break;
      const agent = event.agent as Agent;
      const task = Number(event.task);
      if (board.current[agent] === task) board.current[agent] = null;
      if (task !== -1) board.completed.push(task);
      break;
    }
    case "robot_abort":
      if (board && board.current.robot === Number(event.task)) board.current.robot = null;
      break;
    case "robot_failure":
      state.ticker.push({
        t: event.t,
        text: `robot failed on ${taskName(Number(event.task))}`,
        flavor: "reject",
      });
      break;
    case "task_moved": {
      if (!board) break;
      const task = Number(event.task);
      const from = event.from as Agent;
      const to = event.to as Agent;
      if (board.current[from] === task) board.current[from] = null;
      removeTask(board, from, task);
      const queue = queuesOf(board, to)[Number(event.level) - 1];
      if (queue) queue.unshift(task);
      state.ticker.push({
        t: event.t,
        text: `${taskName(task)} moved to the ${to}`,
        flavor: "move",
      });
      break;
    }
    case "home_enqueued": {
      if (!board) break;
      const queue = board.levels[Number(event.level) - 1];
      if (queue) queue.robot.unshift(-1);
      break;
    }
    case "reschedule_pull": {
      if (!board) break;
      const tasks = event.tasks as number[];
      for (const task of tasks) {
        removeTask(board, "robot", task);
        const queue = queuesOf(board, "robot")[Number(event.level) - 1];
        if (queue) queue.push(task);
      }
      state.ticker.push({
        t: event.t,
        text: `robot anticipates ${tasks.map(taskName).join(", ")}`,
        flavor: "move",
      });
      break;
    }
    case "message_accepted":
      state.acceptedMessages.push({
        t: event.t,
        msg: String(event.msg),
        task: Number(event.task),
      });
      state.ticker.push({
        t: event.t,
        text: `${event.sender} ${event.msg} ${taskName(Number(event.task))}`,
        flavor: "move",
      });
      break;
    case "message_rejected":
      state.ticker.push({
        t: event.t,
        text: `${event.msg} ${taskName(Number(event.task))} rejected (${event.reason})`,
        flavor: "reject",
      });
      break;
    case "job_end":
      if (board) {
        board.cycleMs = Number(event.cycle);
        board.metrics = (event.metrics as MetricSnapshot[]) ?? [];
        state.ticker.push({
          t: event.t,
          text: `job ${board.job} done in ${(board.cycleMs / 1000).toFixed(1)} s`,
          flavor: "done",
        });
      }
      break;
    default:
      break;
  }
  return state;
}

/** Rebuild the whole board from scratch. */
export function replay(events: ShiftEvent[]): BoardState {
  const state = emptyBoard();
  for (const event of events) apply(state, event);
  state.finished = true;
  return state;
}
