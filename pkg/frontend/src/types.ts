/** Wire types of the scheduler service. */

export type Agent = "human" | "robot";
export type MessageKind = "delegate" | "reassign";

/** One line of the server's JSON-lines event stream. */
export interface ShiftEvent {
  seq: number;
  t: number; // simulation milliseconds
  kind: string;
  [key: string]: unknown;
}

export interface AssignmentLevel {
  S_H: number[];
  S_R: number[];
  c: number;
}

export interface MetricSnapshot {
  id: string;
  kind: "summed" | "average";
  value: number;
  bound: number;
  satisfied: boolean;
}

export interface StateSnapshot {
  started: boolean;
  finished: boolean;
  speed: number;
  jobs_total: number;
  jobs_done: number;
  events: number;
  clock: number;
  job?: string;
  job_index?: number;
  level?: number;
  done?: boolean;
  schedules?: { S_H: number[][]; S_R: number[][] };
  current?: { human: number | null; robot: number | null };
  completed?: number[];
  metrics?: MetricSnapshot[];
  assignment?: { levels: AssignmentLevel[]; objective: number };
}
