// Local WebAudio playback: effect previews on tap and the synced
// music+ambient bed while recording. Buffers are cached per asset so a
// tap plays with no fetch on the hot path.

import type { StudioApi } from "./api.js";

export class LocalPlayer {
  private ctx: AudioContext | null = null;
  private buffers = new Map<string, AudioBuffer>();
  private layers: AudioBufferSourceNode[] = [];

  constructor(private api: StudioApi) {}

  private context(): AudioContext {
    if (this.ctx === null) {
      this.ctx = new AudioContext();
    }
    return this.ctx;
  }

  async preload(assetId: string): Promise<void> {
    if (this.buffers.has(assetId)) return;
    const raw = await this.api.assetPayload(assetId);
    const decoded = await this.context().decodeAudioData(raw);
    this.buffers.set(assetId, decoded);
  }

  /** Fire-and-forget one-shot; silently skips assets not yet preloaded. */
  playOnce(assetId: string, gain = 1.0): void {
    const buffer = this.buffers.get(assetId);
    if (buffer === undefined) {
      void this.preload(assetId).then(() => this.playOnce(assetId, gain));
      return;
    }
    const ctx = this.context();
    const src = ctx.createBufferSource();
    src.buffer = buffer;
    const g = ctx.createGain();
    g.gain.value = gain;
    src.connect(g).connect(ctx.destination);
    src.start();
  }

  /** Start the music layer (and looping ambient, if set) in sync. */
  async startLayers(
    music: { assetId: string; gain: number },
    ambient: { assetId: string; gain: number } | null,
  ): Promise<void> {
    await this.preload(music.assetId);
    if (ambient !== null) await this.preload(ambient.assetId);
    const ctx = this.context();
    const at = ctx.currentTime + 0.02;
    const startLayer = (assetId: string, gain: number, loop: boolean) => {
      const src = ctx.createBufferSource();
      src.buffer = this.buffers.get(assetId)!;
      src.loop = loop;
      const g = ctx.createGain();
      g.gain.value = gain;
      src.connect(g).connect(ctx.destination);
      src.start(at);
      this.layers.push(src);
    };
    startLayer(music.assetId, music.gain, false);
    if (ambient !== null) startLayer(ambient.assetId, ambient.gain, true);
  }

  stopLayers(): void {
    for (const src of this.layers) {
      try {
        src.stop();
      } catch {
        // already ended
      }
    }
    this.layers = [];
  }

  /** Play rendered WAV bytes (the bounce fetched from the service). */
  async playWav(data: ArrayBuffer): Promise<void> {
    const ctx = this.context();
    const buffer = await ctx.decodeAudioData(data);
    const src = ctx.createBufferSource();
    src.buffer = buffer;
    src.connect(ctx.destination);
    src.start();
  }
}
