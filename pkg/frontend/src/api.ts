// Typed client over the service's HTTP API. Nothing here touches the DOM,
// so the same client runs in the browser and in node tests.

import type {
  AssetInfo,
  Binding,
  Box,
  ChatTurn,
  DialogueState,
  ImageInfo,
  MusicOption,
  ProjectView,
  SceneObject,
  TapEvent,
  Timeline,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorType: string,
    detail: string,
  ) {
    super(`${status} ${errorType}: ${detail}`);
  }
}

type FetchLike = typeof fetch;

async function parseError(resp: Response): Promise<never> {
  let errorType = "HttpError";
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    errorType = body.error ?? errorType;
    detail = body.detail ?? JSON.stringify(body);
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, errorType, detail);
}

export class StudioApi {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchLike = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(this.baseUrl + "/");
      return resp.ok;
    } catch {
      return false;
    }
  }

  async createProject(): Promise<string> {
    const body = await this.json<{ project_id: string }>("/projects", { method: "POST" });
    return body.project_id;
  }

  getProject(projectId: string): Promise<ProjectView> {
    return this.json(`/projects/${projectId}`);
  }

  uploadImage(
    projectId: string,
    bytes: ArrayBuffer | Uint8Array,
    contentType: "image/png" | "image/jpeg",
  ): Promise<{ image: ImageInfo; detected_objects: SceneObject[] }> {
    return this.json(`/projects/${projectId}/image`, {
      method: "POST",
      headers: { "content-type": contentType },
      body: bytes as BodyInit,
    });
  }

  chat(
    projectId: string,
    text: string,
  ): Promise<{ turns: ChatTurn[]; state: DialogueState; options?: MusicOption[] }> {
    return this.post(`/projects/${projectId}/chat`, { text });
  }

  selectMusic(
    projectId: string,
    optionId: string,
  ): Promise<{ option: MusicOption; state: DialogueState; timeline: Timeline }> {
    return this.post(`/projects/${projectId}/music/select`, { option_id: optionId });
  }

  catalog(params: {
    label?: string;
    role?: string;
    page?: number;
    page_size?: number;
  }): Promise<{ assets: AssetInfo[]; total: number }> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) query.set(key, String(value));
    }
    const suffix = query.toString() ? `?${query}` : "";
    return this.json(`/catalog${suffix}`);
  }

  async assetPayload(assetId: string): Promise<ArrayBuffer> {
    const resp = await this.fetchFn(`${this.baseUrl}/catalog/assets/${assetId}`);
    if (!resp.ok) await parseError(resp);
    return resp.arrayBuffer();
  }

  addAsset(
    wav: ArrayBuffer | Uint8Array,
    role: string,
    labels: string[],
    loopable = false,
  ): Promise<{ asset: AssetInfo }> {
    const query = new URLSearchParams({
      role,
      labels: labels.join(","),
      loopable: String(loopable),
    });
    return this.json(`/catalog/assets?${query}`, {
      method: "POST",
      headers: { "content-type": "audio/wav" },
      body: wav as BodyInit,
    });
  }

  addManualBox(
    projectId: string,
    box: Box,
    label?: string,
  ): Promise<{ object: SceneObject; binding: null; candidates: AssetInfo[] }> {
    return this.post(`/projects/${projectId}/bindings`, { box, label });
  }

  bind(
    projectId: string,
    objectId: string,
    assetId: string,
    gain = 1.0,
  ): Promise<{ object: SceneObject | null; binding: Binding }> {
    return this.post(`/projects/${projectId}/bindings`, {
      object_id: objectId,
      asset_id: assetId,
      gain,
    });
  }

  sessionStart(
    projectId: string,
    body: {
      wall_ms: number;
      discard?: boolean;
      music_gain?: number;
      ambient_asset_id?: string;
      ambient_gain?: number;
    },
  ): Promise<{ session_id: string; state: string; start_wall_ms: number }> {
    return this.post(`/projects/${projectId}/session/start`, body);
  }

  sessionEvents(
    projectId: string,
    sessionId: string | null,
    events: TapEvent[],
  ): Promise<{ accepted: number; events: TriggerEventJson[] }> {
    return this.post(`/projects/${projectId}/session/events`, {
      session_id: sessionId,
      events,
    });
  }

  sessionStop(
    projectId: string,
    wallMs: number,
  ): Promise<{ timeline: Timeline; state: string }> {
    return this.post(`/projects/${projectId}/session/stop`, { wall_ms: wallMs });
  }

  async render(
    projectId: string,
    options: { target_rate?: number; master_gain?: number; normalize?: boolean } = {},
  ): Promise<string> {
    const body = await this.post<{ render_id: string }>(`/projects/${projectId}/render`, options);
    return body.render_id;
  }

  async fetchRender(projectId: string, renderId: string): Promise<ArrayBuffer> {
    const resp = await this.fetchFn(`${this.baseUrl}/projects/${projectId}/renders/${renderId}`);
    if (!resp.ok) await parseError(resp);
    return resp.arrayBuffer();
  }
}

interface TriggerEventJson {
  offset_ms: number;
  object_id: string;
  asset_id: string;
  gain: number;
}
