// Tap recording with client-side wall clocks and batched submission.
//
// The wall clock is captured synchronously at tap time, never at server
// acknowledgement, so network latency cannot shift an event. Batches go
// out at most once per second and on stop; a failed flush keeps the
// events queued (in order) for the next attempt.

import type { TapEvent } from "./types.js";

export interface EventSink {
  send(events: TapEvent[]): Promise<void>;
}

export interface RecorderOptions {
  clock: () => number;
  sink: EventSink;
  flushIntervalMs?: number;
  onError?: (error: unknown) => void;
  onFlushed?: (count: number) => void;
}

export class TapRecorder {
  private pending: TapEvent[] = [];
  private inFlight: Promise<void> | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  readonly flushIntervalMs: number;

  constructor(private options: RecorderOptions) {
    this.flushIntervalMs = options.flushIntervalMs ?? 1000;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  /** Stamp a tap now; returns the captured wall clock. */
  tap(objectId: string): number {
    const wallMs = this.options.clock();
    this.pending.push({ object_id: objectId, wall_ms: wallMs });
    return wallMs;
  }

  startAutoFlush(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.flush(), this.flushIntervalMs);
  }

  stopAutoFlush(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Push pending events to the sink. One in-flight request at a time;
   * on failure the batch stays queued and onError fires. */
  flush(): Promise<void> {
    if (this.inFlight !== null) return this.inFlight;
    if (this.pending.length === 0) return Promise.resolve();
    const batch = this.pending.slice();
    this.inFlight = this.options.sink
      .send(batch)
      .then(() => {
        this.pending = this.pending.slice(batch.length);
        this.options.onFlushed?.(batch.length);
      })
      .catch((error) => {
        this.options.onError?.(error);
      })
      .finally(() => {
        this.inFlight = null;
      });
    return this.inFlight;
  }

  /** Final drain: retries until the queue is empty or an attempt fails. */
  async drain(): Promise<boolean> {
    this.stopAutoFlush();
    while (this.pending.length > 0) {
      const before = this.pending.length;
      await this.flush();
      if (this.pending.length === before) return false; // flush failed
    }
    return true;
  }
}
