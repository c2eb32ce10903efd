// Sound clip area logic: transport mirror, elapsed clock, event markers.

import type { Timeline, TransportState, TriggerEvent } from "./types.js";

/** Marker positions as fractions of the timeline width. */
export function markerFractions(events: TriggerEvent[], durationMs: number): number[] {
  if (durationMs <= 0) return events.map(() => 0);
  return events.map((e) => Math.min(1, e.offset_ms / durationMs));
}

export function formatClock(ms: number): string {
  const clamped = Math.max(0, Math.floor(ms));
  const minutes = Math.floor(clamped / 60000);
  const seconds = Math.floor((clamped % 60000) / 1000);
  const tenths = Math.floor((clamped % 1000) / 100);
  return `${minutes}:${String(seconds).padStart(2, "0")}.${tenths}`;
}

export interface TransportView {
  state: TransportState;
  elapsedMs: number;
  markers: number[];
  durationMs: number;
}

/**
 * What the panel shows: while recording the elapsed clock runs against
 * the session start and markers are placed optimistically over the music
 * length; once stopped everything mirrors the server timeline.
 */
export function transportView(
  state: TransportState,
  timeline: Timeline | null,
  sessionStartWall: number | null,
  pendingOffsets: number[],
  nowWall: number,
  musicDurationMs: number,
): TransportView {
  if (state === "recording" && sessionStartWall !== null) {
    const span = Math.max(musicDurationMs, 1);
    return {
      state,
      elapsedMs: nowWall - sessionStartWall,
      markers: pendingOffsets.map((o) => Math.min(1, o / span)),
      durationMs: span,
    };
  }
  if (timeline !== null && timeline.duration_ms > 0) {
    return {
      state,
      elapsedMs: 0,
      markers: markerFractions(timeline.events, timeline.duration_ms),
      durationMs: timeline.duration_ms,
    };
  }
  return { state, elapsedMs: 0, markers: [], durationMs: 0 };
}
