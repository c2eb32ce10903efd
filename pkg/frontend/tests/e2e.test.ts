// Full studio happy path against the real service with mock backends:
// create -> upload (with detector sidecar) -> chat -> select -> bind ->
// record with a simulated clock -> stop -> render -> play check.
//
// The service process is spawned from the sibling Python package;
// everything below talks to it over plain HTTP like the browser would.

import { spawn, type ChildProcess } from "node:child_process";
import { createHash } from "node:crypto";
import { mkdtempSync, mkdirSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { StudioApi } from "../src/api.js";
import { hitTest, resolveTap } from "../src/hitTest.js";
import { TapRecorder } from "../src/recorder.js";
import { markerFractions } from "../src/transport.js";
import type { Binding, SceneObject } from "../src/types.js";
import { FIXTURE_IMAGE, fixturePng, inspectWav, sineWav } from "./helpers.js";

const SIDECAR = [
  { label: "dog", x: 20, y: 30, w: 50, h: 50, confidence: 0.92 },
  { label: "table", x: 90, y: 50, w: 60, h: 60, confidence: 0.8 },
  { label: "cup", x: 100, y: 60, w: 16, h: 16, confidence: 0.75 },
];

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      srv.close(() => resolve(address.port));
    });
  });
}

let proc: ChildProcess | null = null;
let api: StudioApi;
let storeDir: string;

beforeAll(async () => {
  const port = await freePort();
  storeDir = join(mkdtempSync(join(tmpdir(), "studio-e2e-")), "store");
  proc = spawn(
    "python3",
    ["-m", "soundscene.cli", "serve",
     "--addr", `127.0.0.1:${port}`, "--store", storeDir, "--backend", "mock"],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  api = new StudioApi(`http://127.0.0.1:${port}`);
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (await api.health()) return;
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service did not come up");
}, 40_000);

afterAll(() => {
  proc?.kill("SIGTERM");
});

describe("studio happy path", () => {
  let projectId: string;
  let objects: SceneObject[];
  let bindings: Record<string, Binding> = {};
  let barkId: string;
  let chirpId: string;

  it("uploads the photo and gets its objects back", async () => {
    projectId = await api.createProject();
    const image = fixturePng();
    const digest = createHash("sha256").update(image).digest("hex");
    mkdirSync(join(storeDir, "annotations"), { recursive: true });
    writeFileSync(
      join(storeDir, "annotations", `${digest}.annotations.json`),
      JSON.stringify(SIDECAR),
    );
    const uploaded = await api.uploadImage(projectId, image, "image/png");
    expect(uploaded.image.width).toBe(FIXTURE_IMAGE.width);
    expect(uploaded.detected_objects.map((o) => o.label)).toEqual(["dog", "table", "cup"]);
    objects = uploaded.detected_objects;
  });

  it("chats: description, fixed question, three options, selection", async () => {
    const opening = await api.chat(projectId, "");
    expect(opening.turns[0].text).toBe("A scene containing: cup, dog, table.");
    expect(opening.turns[1].text).toBe("What kind of sound memory do you want to create?");

    const offered = await api.chat(projectId, "calm waves at dusk");
    expect(offered.options?.length).toBe(3);

    const refined = await api.chat(projectId, "slower and softer");
    expect(refined.options?.length).toBe(3);

    const picked = await api.selectMusic(projectId, refined.options![0].id);
    expect(picked.timeline.music_asset).toBe(refined.options![0].asset_id);
  });

  it("binds effects to the dog and the cup", async () => {
    barkId = (await api.addAsset(sineWav(880, 0.2), "effect", ["dog", "bark"])).asset.id;
    chirpId = (await api.addAsset(sineWav(1320, 0.15), "effect", ["cup", "clink"])).asset.id;
    const dog = objects.find((o) => o.label === "dog")!;
    const cup = objects.find((o) => o.label === "cup")!;
    await api.bind(projectId, dog.id, barkId);
    await api.bind(projectId, cup.id, chirpId);
    const view = await api.getProject(projectId);
    bindings = view.bindings;
    expect(Object.keys(bindings).length).toBe(2);
  });

  it("records scripted taps at {0, 500, 1500} ms on a simulated clock", async () => {
    let now = 50_000;
    const recorder = new TapRecorder({
      clock: () => now,
      sink: { send: (events) => api.sessionEvents(projectId, null, events).then(() => {}) },
    });

    await api.sessionStart(projectId, { wall_ms: now });

    // taps go through the real stage pipeline: point -> hit test -> queue
    const tapAt = (x: number, y: number) => {
      const outcome = resolveTap(objects, bindings, x, y, true);
      expect(outcome.kind).toBe("queued");
      recorder.tap((outcome as { object: SceneObject }).object.id);
    };

    tapAt(30, 40); // dog, +0
    now += 500;
    tapAt(30, 40); // dog, +500
    now += 1000;
    // nested boxes: (105, 65) is inside both table and cup; cup must win
    expect(hitTest(objects, 105, 65)?.label).toBe("cup");
    tapAt(105, 65); // cup, +1500

    expect(await recorder.drain()).toBe(true);
    const stopped = await api.sessionStop(projectId, now + 6500);
    expect(stopped.timeline.events.map((e) => e.offset_ms)).toEqual([0, 500, 1500]);
    expect(stopped.timeline.events.map((e) => e.asset_id)).toEqual([barkId, barkId, chirpId]);
    expect(stopped.timeline.duration_ms).toBe(8000); // the 8 s generated music
  });

  it("renders a playable WAV whose markers match the taps", async () => {
    const renderId = await api.render(projectId);
    const wav = await api.fetchRender(projectId, renderId);
    const info = inspectWav(wav);
    expect(info.channels).toBe(2);
    expect(info.bitsPerSample).toBe(16);
    expect(info.sampleRate).toBe(48000);
    expect(Math.abs(info.frames - 8 * 48000)).toBeLessThanOrEqual(1);
    expect(info.peak).toBeGreaterThan(0.1); // audibly non-silent

    const view = await api.getProject(projectId);
    expect(view.timeline).not.toBeNull();
    const markers = markerFractions(view.timeline!.events, view.timeline!.duration_ms);
    expect(markers).toEqual([0, 500 / 8000, 1500 / 8000]);
  });

  it("server state matches what the UI displays (nothing fabricated)", async () => {
    const first = await api.getProject(projectId);
    const second = await api.getProject(projectId);
    expect(second).toEqual(first);
    expect(first.transport).toBe("stopped");
    expect(Object.keys(first.renders).length).toBe(1);
  });
});
