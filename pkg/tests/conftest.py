"""Shared fixtures: hand-built WAV bytes and image payloads.

The WAV builders here pack RIFF files with struct directly so decoder
tests never depend on the package's own encoder.
"""

from __future__ import annotations

import io
import math
import struct

import pytest
from PIL import Image


def build_wav(
    frames: list[tuple[int, ...]] | list[tuple[float, ...]],
    rate: int = 48000,
    bits: int = 16,
    audio_format: int = 1,
) -> bytes:
    """Pack interleaved frames into a RIFF/WAV file, independent of the
    package encoder. Integer frames for PCM, float frames for format 3."""
    channels = len(frames[0]) if frames else 1
    body = bytearray()
    for frame in frames:
        for value in frame:
            if audio_format == 3:
                body += struct.pack("<f", value)
            elif bits == 8:
                body += struct.pack("<B", value)
            elif bits == 16:
                body += struct.pack("<h", value)
            elif bits == 24:
                v = value & 0xFFFFFF
                body += bytes((v & 0xFF, (v >> 8) & 0xFF, (v >> 16) & 0xFF))
            else:
                raise ValueError(bits)
    block_align = channels * bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(body),
        b"WAVE",
        b"fmt ",
        16,
        audio_format,
        channels,
        rate,
        rate * block_align,
        block_align,
        bits,
        b"data",
        len(body),
    )
    return header + bytes(body)


def sine_wav(freq: float, seconds: float, rate: int = 48000, amp: float = 0.5) -> bytes:
    n = round(seconds * rate)
    frames = [
        (int(round(amp * 32767 * math.sin(2 * math.pi * freq * i / rate))),) for i in range(n)
    ]
    return build_wav(frames, rate=rate)


def constant_wav(value: float, n_frames: int, rate: int = 48000, channels: int = 1) -> bytes:
    q = int(round(value * 32767))
    return build_wav([(q,) * channels] * n_frames, rate=rate)


def png_bytes(width: int = 1, height: int = 1, color=(10, 20, 30)) -> bytes:
    img = Image.new("RGB", (width, height), color)
    out = io.BytesIO()
    img.save(out, format="PNG")
    return out.getvalue()


def jpeg_bytes(width: int = 640, height: int = 480) -> bytes:
    img = Image.new("RGB", (width, height), (200, 100, 50))
    out = io.BytesIO()
    img.save(out, format="JPEG")
    return out.getvalue()


def bmp_bytes() -> bytes:
    img = Image.new("RGB", (4, 4), (1, 2, 3))
    out = io.BytesIO()
    img.save(out, format="BMP")
    return out.getvalue()


@pytest.fixture
def wav_1s_mono_48k() -> bytes:
    return build_wav([(0,)] * 48000, rate=48000)
