/**
 * Console round-trip against the real service: loading the first job,
 * delegating the heavy lift, steering the shift to completion, then
 * replaying the event stream through the board reducer and holding it up
 * against the server's own snapshot and report.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ShiftClient } from "../src/api.js";
import { replay } from "../src/board.js";
import type { ShiftEvent, StateSnapshot } from "../src/types.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const SPEED = 40;

// the batch communication scenario accepts exactly this message sequence
const EXPECTED_ACCEPTED = [
  { msg: "delegate", task: 5 },
  { msg: "reassign", task: 2 },
];

const SERVE = `
import json, tempfile
from hrcsched import golden
from hrcsched.model import shift_to_json
from hrcsched.cli import main
path = tempfile.mktemp(suffix=".json")
with open(path, "w") as fh:
    json.dump(shift_to_json(golden.job1_only()), fh)
main(["serve", "--port", "${PORT}", "--scenario", path])
`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 200; attempt++) {
    try {
      const response = await fetch(`${BASE}/shift/1/state`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await sleep(100);
  }
  throw new Error("service did not come up");
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

async function poll(
  client: ShiftClient,
  predicate: (snap: StateSnapshot) => boolean,
  timeoutMs = 30000,
): Promise<StateSnapshot> {
  const deadline = Date.now() + timeoutMs;
  let snap: StateSnapshot = await client.state();
  while (Date.now() < deadline) {
    snap = await client.state();
    if (predicate(snap)) return snap;
    await sleep(25);
  }
  throw new Error(`timed out; last state ${JSON.stringify(snap)}`);
}

beforeAll(async () => {
  server = spawn("python3", ["-c", SERVE], { stdio: "ignore" });
  await waitForServer();
}, 40000);

afterAll(() => {
  server?.kill();
});

describe("console round-trip", () => {
  it("drives the first job and replays to the server's state", async () => {
    const client = ShiftClient.attach(BASE, "1");

    // operator decisions at the console before starting
    await client.message("delegate", 5);
    await expect(client.message("delegate", 7)).rejects.toMatchObject({ status: 409 });

    await client.start(SPEED);

    // the delegated task leads the robot schedule
    let snap = await poll(client, (s) => s.current?.robot === 5);
    expect(snap.current?.human).toBe(7);

    // once the shapes are placed, take the U shape back from the robot
    await poll(client, (s) => {
      const done = new Set(s.completed ?? []);
      return done.has(3) && done.has(4);
    });
    await client.message("reassign", 2);

    // work through the operator's queue as the board offers tasks
    await client.complete(7);
    await poll(client, (s) => s.current?.human === 2);
    await client.complete(2);
    await poll(client, (s) => s.current?.human === 8);
    await client.complete(8);
    await poll(client, (s) => s.current?.human === 9);
    await client.complete(9);

    const finalSnap = await poll(client, (s) => Boolean(s.finished));

    // full replay through the board reducer
    const body = await (await fetch(client.eventsUrl(0))).text();
    const events = body
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line) as ShiftEvent);
    expect(events.map((e) => e.seq)).toEqual(events.map((_, i) => i));

    const board = replay(events);

    // the UI-driven run reproduces the communication scenario's sequence
    expect(board.acceptedMessages.map(({ msg, task }) => ({ msg, task }))).toEqual(
      EXPECTED_ACCEPTED,
    );

    // board state equals the server's snapshot after the run
    expect(board.finished).toBe(finalSnap.finished);
    expect(board.jobs.length).toBe(finalSnap.jobs_done);
    expect(board.clock).toBe(finalSnap.clock);

    const job = board.jobs[0];
    expect([...job.completed].sort((a, b) => a - b)).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9]);
    for (const level of job.levels) {
      expect(level.human).toEqual([]);
      expect(level.robot).toEqual([]);
    }
    expect(job.current).toEqual({ human: null, robot: null });

    // and against the server's report: the delegate ran on the robot,
    // the reassigned task on the human
    const report = await client.report();
    const agents = new Map(
      report.jobs[0].tasks.map((t: any) => [t.task, t.agent]),
    );
    expect(agents.get(5)).toBe("robot");
    expect(agents.get(2)).toBe("human");
  }, 60000);
});
