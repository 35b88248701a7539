/** Thin typed client for the scheduler service. */

import type { MessageKind, StateSnapshot } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function unwrap(response: Response): Promise<any> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      detail = (await response.json()).detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return response.json();
}

export class ShiftClient {
  constructor(public base: string, public shiftId: string) {}

  static async load(base: string, scenario: unknown, trace?: unknown): Promise<ShiftClient> {
    const body: Record<string, unknown> = { scenario };
    if (trace) body.trace = trace;
    const doc = await unwrap(
      await fetch(`${base}/shift`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
    return new ShiftClient(base, String(doc.shift));
  }

  static attach(base: string, shiftId: string): ShiftClient {
    return new ShiftClient(base, shiftId);
  }

  private url(path: string): string {
    return `${this.base}/shift/${this.shiftId}${path}`;
  }

  async start(speed: number): Promise<void> {
    await unwrap(await fetch(this.url(`/start?speed=${speed}`), { method: "POST" }));
  }

  async state(): Promise<StateSnapshot> {
    return unwrap(await fetch(this.url("/state")));
  }

  async message(kind: MessageKind, task: number): Promise<void> {
    await unwrap(
      await fetch(this.url("/message"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ kind, task }),
      }),
    );
  }

  async complete(task: number): Promise<void> {
    await unwrap(
      await fetch(this.url("/complete"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ task }),
      }),
    );
  }

  async report(): Promise<any> {
    return unwrap(await fetch(this.url("/report")));
  }

  eventsUrl(from: number): string {
    return this.url(`/events?start=${from}`);
  }
}
