// Chat panel helpers (pure; the DOM wiring lives in app.ts).

import type { DialogueState, MusicOption } from "./types.js";

export function latestRound(rounds: MusicOption[][]): MusicOption[] {
  return rounds.length > 0 ? rounds[rounds.length - 1] : [];
}

export function inputPlaceholder(state: DialogueState): string {
  switch (state) {
    case "await_image":
      return "Pick a photo to begin";
    case "described":
      return "Describe the sound memory you want";
    case "options_offered":
      return "Refine the music, or pick an option";
    case "music_selected":
      return "Music locked in - bind sounds and record";
  }
}

export function canSendText(state: DialogueState, hasImage: boolean): boolean {
  if (!hasImage) return false;
  return state === "described" || state === "options_offered";
}
