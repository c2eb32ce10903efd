// Studio wiring: three panes (chat, stage, sound clip area) driving the
// service. All domain logic lives in the sibling modules; this file is
// DOM plumbing.

import { StudioApi } from "./api.js";
import { LocalPlayer } from "./audio.js";
import { canSendText, inputPlaceholder, latestRound } from "./chat.js";
import { resolveTap } from "./hitTest.js";
import { TapRecorder } from "./recorder.js";
import { dragToBox, drawOverlays, fitImage, viewToImage, type FitTransform } from "./stage.js";
import { transportView } from "./transport.js";
import type { AssetInfo, ProjectView, SceneObject } from "./types.js";

const params = new URLSearchParams(location.search);
const api = new StudioApi(params.get("api") ?? "http://127.0.0.1:8080");
const player = new LocalPlayer(api);

const el = {
  turns: document.getElementById("turns") as HTMLDivElement,
  options: document.getElementById("options") as HTMLDivElement,
  chatInput: document.getElementById("chat-input") as HTMLInputElement,
  chatSend: document.getElementById("chat-send") as HTMLButtonElement,
  imageInput: document.getElementById("image-input") as HTMLInputElement,
  stage: document.getElementById("stage") as HTMLCanvasElement,
  stageHint: document.getElementById("stage-hint") as HTMLDivElement,
  recordBtn: document.getElementById("record") as HTMLButtonElement,
  stopBtn: document.getElementById("stop") as HTMLButtonElement,
  playBtn: document.getElementById("play") as HTMLButtonElement,
  clock: document.getElementById("clock") as HTMLSpanElement,
  markers: document.getElementById("markers") as HTMLDivElement,
  layers: document.getElementById("layers") as HTMLUListElement,
  banner: document.getElementById("banner") as HTMLDivElement,
  bindDialog: document.getElementById("bind-dialog") as HTMLDivElement,
  bindTitle: document.getElementById("bind-title") as HTMLSpanElement,
  bindList: document.getElementById("bind-list") as HTMLUListElement,
  bindClose: document.getElementById("bind-close") as HTMLButtonElement,
};

let projectId: string | null = null;
let view: ProjectView | null = null;
let imageBitmap: ImageBitmap | null = null;
let transform: FitTransform = { scale: 1, offsetX: 0, offsetY: 0 };
let sessionStartWall: number | null = null;
let pendingOffsets: number[] = [];
let lastRenderId: string | null = null;
let dragStart: { x: number; y: number } | null = null;

const recorder = new TapRecorder({
  clock: () => Math.round(performance.now()),
  sink: {
    send: async (events) => {
      if (projectId === null) throw new Error("no project");
      await api.sessionEvents(projectId, null, events);
    },
  },
  onError: () => showBanner("Event upload failed - retrying, taps are kept locally"),
  onFlushed: () => hideBanner(),
});

function showBanner(text: string): void {
  el.banner.textContent = text;
  el.banner.style.display = "block";
}

function hideBanner(): void {
  el.banner.style.display = "none";
}

async function refresh(): Promise<void> {
  if (projectId === null) return;
  view = await api.getProject(projectId);
  renderChat();
  renderStage();
  renderTransport();
}

// --- chat pane -----------------------------------------------------------

function renderChat(): void {
  if (view === null) return;
  el.turns.replaceChildren(
    ...view.dialogue.turns.map((turn) => {
      const div = document.createElement("div");
      div.className = `turn ${turn.role}`;
      div.textContent = turn.text;
      return div;
    }),
  );
  el.turns.scrollTop = el.turns.scrollHeight;
  el.chatInput.placeholder = inputPlaceholder(view.dialogue.state);
  el.chatSend.disabled = !canSendText(view.dialogue.state, view.scene !== null);

  const options = latestRound(view.dialogue.rounds);
  el.options.replaceChildren(
    ...options.map((option) => {
      const card = document.createElement("div");
      card.className = "option-card";
      const caption = document.createElement("span");
      caption.textContent = option.caption;
      const preview = document.createElement("button");
      preview.textContent = "preview";
      preview.onclick = () => player.playOnce(option.asset_id);
      const pick = document.createElement("button");
      pick.textContent = "use";
      pick.disabled = view!.dialogue.state !== "options_offered";
      pick.onclick = async () => {
        await api.selectMusic(projectId!, option.id);
        await refresh();
      };
      card.append(caption, preview, pick);
      return card;
    }),
  );
}

async function sendChat(): Promise<void> {
  const text = el.chatInput.value.trim();
  if (projectId === null) return;
  el.chatInput.value = "";
  try {
    await api.chat(projectId, text);
  } catch (error) {
    showBanner(String(error));
  }
  await refresh();
}

// --- stage pane ------------------------------------------------------------

function renderStage(): void {
  const ctx = el.stage.getContext("2d");
  if (ctx === null) return;
  ctx.clearRect(0, 0, el.stage.width, el.stage.height);
  if (view?.scene == null || imageBitmap === null) {
    el.stageHint.textContent = "Import a photo to turn it into an instrument";
    return;
  }
  const { width, height } = view.scene.image;
  transform = fitImage(width, height, el.stage.width, el.stage.height);
  ctx.drawImage(imageBitmap, transform.offsetX, transform.offsetY,
    width * transform.scale, height * transform.scale);
  drawOverlays(ctx, transform, view.scene.objects, new Set(Object.keys(view.bindings)));
  el.stageHint.textContent =
    view.transport === "recording"
      ? "Tap objects to place sounds"
      : "Drag a box around an object to bind a sound";
}

function stagePoint(event: MouseEvent): { x: number; y: number } {
  const rect = el.stage.getBoundingClientRect();
  return viewToImage(transform, event.clientX - rect.left, event.clientY - rect.top);
}

el.stage.addEventListener("mousedown", (event) => {
  if (view?.transport !== "recording") dragStart = stagePoint(event);
});

el.stage.addEventListener("mouseup", async (event) => {
  const point = stagePoint(event);
  if (view?.transport === "recording") {
    onStageTap(point.x, point.y);
    return;
  }
  if (dragStart === null || view?.scene == null) return;
  const box = dragToBox(dragStart, point, view.scene.image.width, view.scene.image.height);
  dragStart = null;
  if (box === null) return; // zero-area drag
  try {
    const created = await api.addManualBox(projectId!, box);
    await refresh();
    openBindDialog(created.object, created.candidates);
  } catch (error) {
    showBanner(String(error));
  }
});

function onStageTap(x: number, y: number): void {
  if (view?.scene == null) return;
  const outcome = resolveTap(
    view.scene.objects, view.bindings, x, y, view.transport === "recording");
  if (outcome.kind === "queued") {
    player.playOnce(outcome.binding.asset_id, outcome.binding.gain); // local, immediate
    const wall = recorder.tap(outcome.object.id);
    if (sessionStartWall !== null) pendingOffsets.push(wall - sessionStartWall);
    renderTransport();
  } else if (outcome.kind === "unbound") {
    showBanner(`"${outcome.object.label}" has no sound yet - stop and bind one`);
  } else if (outcome.kind === "miss") {
    el.stage.classList.remove("nudge");
    void el.stage.offsetWidth; // restart the animation
    el.stage.classList.add("nudge");
  }
}

function openBindDialog(object: SceneObject, candidates: AssetInfo[]): void {
  el.bindTitle.textContent = `Sound for "${object.label}"`;
  el.bindList.replaceChildren(
    ...candidates.slice(0, 5).map((asset) => {
      const li = document.createElement("li");
      const name = document.createElement("span");
      name.textContent = `${asset.labels.join(", ")} (${(asset.duration_ms / 1000).toFixed(1)} s)`;
      const preview = document.createElement("button");
      preview.textContent = "preview";
      preview.onclick = () => player.playOnce(asset.id);
      const use = document.createElement("button");
      use.textContent = "bind";
      use.onclick = async () => {
        await api.bind(projectId!, object.id, asset.id);
        el.bindDialog.style.display = "none";
        await refresh();
      };
      li.append(name, preview, use);
      return li;
    }),
  );
  el.bindDialog.style.display = candidates.length > 0 ? "block" : "none";
  if (candidates.length === 0) showBanner(`No effects labeled "${object.label}" in the library`);
}

el.bindClose.onclick = () => (el.bindDialog.style.display = "none");

// --- sound clip area ----------------------------------------------------------

function renderTransport(): void {
  if (view === null) return;
  const musicDuration = view.timeline?.duration_ms ?? 0;
  const tv = transportView(
    view.transport, view.timeline, sessionStartWall, pendingOffsets,
    Math.round(performance.now()), musicDuration || 8000);
  el.clock.textContent = tv.state === "recording" ? "REC" : "";
  el.markers.replaceChildren(
    ...tv.markers.map((fraction) => {
      const mark = document.createElement("div");
      mark.className = "marker";
      mark.style.left = `${(fraction * 100).toFixed(2)}%`;
      return mark;
    }),
  );
  el.recordBtn.disabled = view.timeline?.music_asset == null || tv.state === "recording";
  el.recordBtn.title = el.recordBtn.disabled && tv.state !== "recording"
    ? "Select background music with the agent first" : "";
  el.stopBtn.disabled = tv.state !== "recording";
  el.playBtn.disabled = lastRenderId === null;

  const entries: string[] = [];
  if (view.timeline?.music_asset) entries.push(`music: ${view.timeline.music_asset}`);
  if (view.timeline?.ambient_asset) entries.push(`ambient: ${view.timeline.ambient_asset}`);
  for (const [objectId, binding] of Object.entries(view.bindings)) {
    entries.push(`effect: ${binding.asset_id} on ${objectId}`);
  }
  el.layers.replaceChildren(
    ...entries.map((text) => {
      const li = document.createElement("li");
      li.textContent = text;
      return li;
    }),
  );
}

el.recordBtn.onclick = async () => {
  if (projectId === null || view?.timeline?.music_asset == null) return;
  const wall = Math.round(performance.now());
  try {
    await api.sessionStart(projectId, { wall_ms: wall, discard: true });
  } catch (error) {
    showBanner(String(error));
    return;
  }
  sessionStartWall = wall;
  pendingOffsets = [];
  await player.startLayers(
    { assetId: view.timeline.music_asset, gain: view.timeline.music_gain },
    view.timeline.ambient_asset
      ? { assetId: view.timeline.ambient_asset, gain: view.timeline.ambient_gain }
      : null,
  );
  recorder.startAutoFlush();
  await refresh();
};

el.stopBtn.onclick = async () => {
  if (projectId === null) return;
  player.stopLayers();
  const drained = await recorder.drain();
  if (!drained) showBanner("Some taps could not reach the server; they stay queued");
  await api.sessionStop(projectId, Math.round(performance.now()));
  sessionStartWall = null;
  lastRenderId = await api.render(projectId);
  await refresh();
};

el.playBtn.onclick = async () => {
  if (projectId === null || lastRenderId === null) return;
  const wav = await api.fetchRender(projectId, lastRenderId);
  await player.playWav(wav);
};

// --- bootstrap -------------------------------------------------------------------

el.chatSend.onclick = () => void sendChat();
el.chatInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void sendChat();
});

el.imageInput.addEventListener("change", async () => {
  const file = el.imageInput.files?.[0];
  if (file === undefined) return;
  if (projectId === null) projectId = await api.createProject();
  const bytes = await file.arrayBuffer();
  const contentType = file.type === "image/jpeg" ? "image/jpeg" : "image/png";
  try {
    await api.uploadImage(projectId, bytes, contentType);
  } catch (error) {
    showBanner(String(error));
    return;
  }
  imageBitmap = await createImageBitmap(new Blob([bytes]));
  await api.chat(projectId, ""); // opening description + question
  await refresh();
});

void (async () => {
  if (!(await api.health())) {
    showBanner(`Service unreachable at ${api.baseUrl} - start it with: soundscene serve`);
  }
})();
