"""Offline three-layer mixdown: WAV codec, resampling, looping, and the mixer.

The render model is additive: one background music layer, one looping
ambient layer, and any number of one-shot effect events placed at
millisecond offsets. Everything here is a pure function of its inputs so
renders are byte-reproducible across runs and platforms.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EmptySource,
    EmptyTimeline,
    InvalidWav,
    MissingAsset,
    UnknownAsset,
    UnsupportedEncoding,
)
from .timeline import Timeline

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_IEEE_FLOAT = 3

# Peak target used by the optional normalization pass (-1 dBFS).
NORMALIZE_PEAK = 0.891

OUTPUT_CHANNELS = 2
ALLOWED_RATES = (44100, 48000)


@dataclass
class PcmBuffer:
    """Floating-point audio, one row per channel, nominal range [-1, 1]."""

    sample_rate: int
    samples: np.ndarray  # shape (channels, frames), float64

    def __post_init__(self) -> None:
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.samples.shape[0] not in (1, 2):
            raise ValueError("only mono and stereo buffers are supported")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def frames(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_ms(self) -> int:
        return round(1000 * self.frames / self.sample_rate)


@dataclass
class RenderOptions:
    """Mixdown settings. Output is always stereo 16-bit PCM."""

    target_rate: int = 48000
    master_gain: float = 1.0
    normalize: bool = False

    def __post_init__(self) -> None:
        if self.target_rate not in ALLOWED_RATES:
            raise ValueError(f"target_rate must be one of {ALLOWED_RATES}")
        if not 0.0 <= self.master_gain <= 4.0:
            raise ValueError("master_gain must be in [0, 4]")


def ms_to_samples(ms: int, rate: int) -> int:
    """Millisecond offset to sample index, round half up."""
    return (ms * rate + 500) // 1000


# --- WAV decoding -----------------------------------------------------------


def _parse_chunks(data: bytes) -> dict[bytes, bytes]:
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise InvalidWav("missing RIFF/WAVE header")
    chunks: dict[bytes, bytes] = {}
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise InvalidWav(f"truncated {cid!r} chunk")
        if cid not in chunks:  # first occurrence wins
            chunks[cid] = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    return chunks


def decode_wav(data: bytes) -> PcmBuffer:
    """Decode PCM WAV bytes to a float buffer in [-1, 1].

    Accepts 8/16/24-bit integer and 32-bit float encodings, mono or
    stereo. Integer samples are scaled by their full negative range
    (16-bit: s/32768); float samples pass through untouched.
    """
    chunks = _parse_chunks(data)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise InvalidWav("missing fmt or data chunk")
    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise InvalidWav("fmt chunk too short")
    audio_format, channels, sample_rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt
    )
    if audio_format not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedEncoding(f"audio format {audio_format} is not PCM")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"{channels} channels (only mono/stereo)")
    if sample_rate <= 0:
        raise InvalidWav("zero sample rate")
    if audio_format == WAVE_FORMAT_PCM and bits not in (8, 16, 24):
        raise UnsupportedEncoding(f"{bits}-bit integer PCM")
    if audio_format == WAVE_FORMAT_IEEE_FLOAT and bits != 32:
        raise UnsupportedEncoding(f"{bits}-bit float PCM")

    raw = chunks[b"data"]
    bytes_per_frame = channels * bits // 8
    if block_align and block_align != bytes_per_frame:
        raise InvalidWav("block alignment disagrees with fmt fields")
    if bytes_per_frame == 0 or len(raw) % bytes_per_frame:
        raise InvalidWav("data chunk is not a whole number of frames")

    if audio_format == WAVE_FORMAT_IEEE_FLOAT:
        flat = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    elif bits == 8:
        flat = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif bits == 16:
        flat = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    else:  # 24-bit little-endian, sign-extend by hand
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
        vals = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        vals -= (vals >= 1 << 23) * (1 << 24)
        flat = vals.astype(np.float64) / 8388608.0

    frames = flat.reshape(-1, channels).T
    return PcmBuffer(sample_rate=sample_rate, samples=frames)


# --- WAV encoding -----------------------------------------------------------


def _quantize16(x: np.ndarray) -> np.ndarray:
    """Round half away from zero at full scale 32767."""
    y = x * 32767.0
    q = np.trunc(y + np.copysign(0.5, y))
    return np.clip(q, -32767, 32767).astype("<i2")


def encode_wav_pcm16(buf: PcmBuffer, dither: bool = False) -> bytes:
    """Encode to a canonical 44-byte-header 16-bit PCM WAV.

    Quantization is round-half-away-from-zero of sample*32767, which is
    symmetric around zero and byte-exact across platforms. Optional TPDF
    dither uses a fixed seed so dithered output is still reproducible.
    """
    x = buf.samples
    if dither and buf.frames:
        rng = np.random.default_rng(0x5EED)
        lsb = 1.0 / 32767.0
        x = x + (rng.random(x.shape) - rng.random(x.shape)) * lsb
    interleaved = _quantize16(x.T.reshape(-1))
    payload = interleaved.tobytes()

    block_align = buf.channels * 2
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        WAVE_FORMAT_PCM,
        buf.channels,
        buf.sample_rate,
        buf.sample_rate * block_align,
        block_align,
        16,
        b"data",
        len(payload),
    )
    return header + payload


# --- sample-rate conversion and looping -------------------------------------


def resample_linear(buf: PcmBuffer, dst_rate: int) -> PcmBuffer:
    """Linear-interpolation resample; positions past the end clamp to the
    last source sample. Output length is round(frames * dst/src)."""
    if dst_rate <= 0:
        raise ValueError("dst_rate must be positive")
    if dst_rate == buf.sample_rate:
        return buf
    n = buf.frames
    n_out = (2 * n * dst_rate + buf.sample_rate) // (2 * buf.sample_rate)
    if n == 0 or n_out == 0:
        return PcmBuffer(dst_rate, np.zeros((buf.channels, 0)))
    positions = np.arange(n_out, dtype=np.float64) * (buf.sample_rate / dst_rate)
    src_index = np.arange(n, dtype=np.float64)
    out = np.vstack([np.interp(positions, src_index, ch) for ch in buf.samples])
    return PcmBuffer(dst_rate, out)


def loop_to_length(buf: PcmBuffer, length_samples: int) -> PcmBuffer:
    """Repeat the buffer by modular indexing until it spans the target length."""
    if length_samples < 0:
        raise ValueError("length_samples must be >= 0")
    if length_samples == 0:
        return PcmBuffer(buf.sample_rate, np.zeros((buf.channels, 0)))
    if buf.frames == 0:
        raise EmptySource("cannot loop an empty buffer")
    idx = np.arange(length_samples) % buf.frames
    return PcmBuffer(buf.sample_rate, buf.samples[:, idx])


# --- the mixer ---------------------------------------------------------------


def _to_stereo(buf: PcmBuffer, rate: int) -> np.ndarray:
    """Resample to the target rate and duplicate mono to both channels."""
    b = resample_linear(buf, rate)
    if b.channels == 1:
        return np.vstack([b.samples[0], b.samples[0]])
    return b.samples


def mix_timeline(
    timeline: Timeline,
    resolve: Callable[[str], PcmBuffer],
    options: RenderOptions | None = None,
) -> PcmBuffer:
    """Mix a stopped timeline down to a stereo buffer at the target rate.

    Per channel: music at unity offset, ambient looped over the whole
    length, and every trigger event added at its sample offset, each term
    scaled by its own gain. The optional normalize pass scales the pre-clip
    sum down to a -1 dBFS peak; the master gain is applied last and the
    result hard-clamped to [-1, 1].
    """
    options = options or RenderOptions()
    rate = options.target_rate
    if timeline.duration_ms <= 0:
        raise EmptyTimeline("timeline has zero duration")

    def fetch(asset_id: str) -> PcmBuffer:
        try:
            buf = resolve(asset_id)
        except (KeyError, FileNotFoundError, UnknownAsset) as exc:
            raise MissingAsset(str(exc)) from exc
        if buf is None:
            raise MissingAsset(asset_id)
        return buf

    n_total = ms_to_samples(timeline.duration_ms, rate)
    out = np.zeros((OUTPUT_CHANNELS, n_total))

    if timeline.music_asset is not None:
        music = _to_stereo(fetch(timeline.music_asset), rate)
        span = min(music.shape[1], n_total)
        out[:, :span] += timeline.music_gain * music[:, :span]

    if timeline.ambient_asset is not None:
        ambient = _to_stereo(fetch(timeline.ambient_asset), rate)
        looped = loop_to_length(PcmBuffer(rate, ambient), n_total)
        out += timeline.ambient_gain * looped.samples

    for event in timeline.events:
        effect = _to_stereo(fetch(event.asset_id), rate)
        offset = ms_to_samples(event.offset_ms, rate)
        span = min(effect.shape[1], n_total - offset)
        if span > 0:
            out[:, offset : offset + span] += event.gain * effect[:, :span]

    if options.normalize and n_total:
        peak = float(np.max(np.abs(out)))
        if peak > NORMALIZE_PEAK:
            out *= NORMALIZE_PEAK / peak

    out = np.clip(options.master_gain * out, -1.0, 1.0)
    return PcmBuffer(rate, out)
