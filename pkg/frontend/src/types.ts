// JSON shapes exchanged with the service.

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface SceneObject {
  id: string;
  box: Box;
  label: string;
  confidence: number;
  source: "auto" | "manual";
}

export interface ImageInfo {
  id: string;
  width: number;
  height: number;
  format: "png" | "jpeg";
  content_hash: string;
  payload_ref: string | null;
}

export interface Binding {
  object_id: string;
  asset_id: string;
  gain: number;
}

export interface ChatTurn {
  role: "user" | "agent";
  text: string;
  timestamp_ms: number;
}

export interface MusicOption {
  id: string;
  asset_id: string;
  caption: string;
}

export interface AssetInfo {
  id: string;
  role: "music" | "ambient" | "effect";
  labels: string[];
  loopable: boolean;
  duration_ms: number;
  sample_rate: number;
  channels: number;
  payload: string;
}

export interface TriggerEvent {
  offset_ms: number;
  object_id: string;
  asset_id: string;
  gain: number;
}

export interface Timeline {
  music_asset: string | null;
  music_gain: number;
  ambient_asset: string | null;
  ambient_gain: number;
  duration_ms: number;
  events: TriggerEvent[];
}

export type DialogueState =
  | "await_image"
  | "described"
  | "options_offered"
  | "music_selected";

export type TransportState = "idle" | "recording" | "stopped";

export interface ProjectView {
  id: string;
  created_at_ms: number;
  scene: { image: ImageInfo; objects: SceneObject[] } | null;
  bindings: Record<string, Binding>;
  dialogue: {
    state: DialogueState;
    turns: ChatTurn[];
    brief: string | null;
    feedback: string[];
    rounds: MusicOption[][];
  };
  timeline: Timeline | null;
  transport: TransportState;
  renders: Record<string, string>;
}

export interface TapEvent {
  object_id: string;
  wall_ms: number;
}
