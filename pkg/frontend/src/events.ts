/**
 * Event-stream subscription: reads the server's JSON-lines feed and hands
 * each event to the consumer exactly once, resubscribing from the last seen
 * seq when the connection drops.
 */

import type { ShiftEvent } from "./types.js";

export interface Subscription {
  stop(): void;
}

export function subscribe(
  urlFor: (from: number) => string,
  onEvent: (event: ShiftEvent) => void,
  onStatus: (connected: boolean) => void,
  onDone: () => void,
): Subscription {
  let next = 0;
  let stopped = false;

  async function connect(): Promise<void> {
    while (!stopped) {
      try {
        const response = await fetch(urlFor(next));
        if (!response.ok || !response.body) throw new Error(`stream ${response.status}`);
        onStatus(true);
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { value, done } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let newline;
          while ((newline = buffer.indexOf("\n")) >= 0) {
            const line = buffer.slice(0, newline).trim();
            buffer = buffer.slice(newline + 1);
            if (!line) continue;
            const event = JSON.parse(line) as ShiftEvent;
            if (event.seq >= next) {
              next = event.seq + 1;
              onEvent(event);
            }
          }
        }
        // a clean close means the shift is over
        if (!stopped) onDone();
        return;
      } catch {
        onStatus(false);
        await new Promise((resolve) => setTimeout(resolve, 500));
      }
    }
  }

  void connect();
  return {
    stop() {
      stopped = true;
    },
  };
}
