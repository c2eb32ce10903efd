// Node-side fixtures for the e2e test: a real PNG and hand-packed WAVs.

// 160x120 RGB PNG with two colored blocks (drawable regions for boxes).
const PNG_B64 =
  "iVBORw0KGgoAAAANSUhEUgAAAKAAAAB4CAIAAAD6wG44AAABbUlEQVR4nO3doQ3CUBRAUSDMwRBoNBrNHIzRYdAMwRCdBI2paUnLzTm+yU9unnv9f3+5Dzu6DmsfgN8SOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI47zvl4uL2XOseCHs/z2kfYEBMcJ3CcwHECxwkcJ3CcwHECxwkcJ3CcwHECxwkcJ3CcwHECxwkcJ3CcwHGzdrJ6TtctbplNG19TO2gmOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOE7gOIHjBI4TOG7W34XuVt8+ExwncJzAcQLHCRwncJzAcQLHCRwncJzAcQLHCRwncJzAcQLHCRwncJzAcQLHCRwncJzAcQLHCRwncJzAcQLHCRzn7cIv0+8A/iMTHCdwnMBxAscJHCdwnMBxAscJHPcBW9ULPjQ1MVQAAAAASUVORK5CYII=";

export function fixturePng(): Uint8Array {
  return Uint8Array.from(Buffer.from(PNG_B64, "base64"));
}

export const FIXTURE_IMAGE = { width: 160, height: 120 };

/** Minimal canonical 16-bit PCM WAV: a decaying sine burst. */
export function sineWav(freq: number, seconds: number, rate = 48000, amp = 0.5): Uint8Array {
  const frames = Math.round(seconds * rate);
  const data = new ArrayBuffer(44 + frames * 2);
  const view = new DataView(data);
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  ascii(0, "RIFF");
  view.setUint32(4, 36 + frames * 2, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, rate, true);
  view.setUint32(28, rate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  ascii(36, "data");
  view.setUint32(40, frames * 2, true);
  for (let i = 0; i < frames; i++) {
    const envelope = 1 - i / frames;
    const value = amp * envelope * Math.sin((2 * Math.PI * freq * i) / rate);
    view.setInt16(44 + i * 2, Math.round(value * 32767), true);
  }
  return new Uint8Array(data);
}

export interface WavInfo {
  channels: number;
  sampleRate: number;
  bitsPerSample: number;
  frames: number;
  peak: number;
}

/** Parse a canonical PCM WAV and report its shape plus peak amplitude. */
export function inspectWav(data: ArrayBuffer): WavInfo {
  const view = new DataView(data);
  const tag = (offset: number) =>
    String.fromCharCode(...new Uint8Array(data.slice(offset, offset + 4)));
  if (tag(0) !== "RIFF" || tag(8) !== "WAVE") throw new Error("not a WAV file");
  let pos = 12;
  let fmt: { channels: number; rate: number; bits: number } | null = null;
  let dataAt = -1;
  let dataLen = 0;
  while (pos + 8 <= view.byteLength) {
    const id = tag(pos);
    const size = view.getUint32(pos + 4, true);
    if (id === "fmt ") {
      fmt = {
        channels: view.getUint16(pos + 10, true),
        rate: view.getUint32(pos + 12, true),
        bits: view.getUint16(pos + 22, true),
      };
    } else if (id === "data") {
      dataAt = pos + 8;
      dataLen = size;
    }
    pos += 8 + size + (size % 2);
  }
  if (fmt === null || dataAt < 0) throw new Error("missing fmt/data chunk");
  const bytesPerFrame = (fmt.bits / 8) * fmt.channels;
  const frames = dataLen / bytesPerFrame;
  let peak = 0;
  for (let i = 0; i < dataLen / 2; i++) {
    peak = Math.max(peak, Math.abs(view.getInt16(dataAt + i * 2, true)));
  }
  return {
    channels: fmt.channels,
    sampleRate: fmt.rate,
    bitsPerSample: fmt.bits,
    frames,
    peak: peak / 32767,
  };
}
