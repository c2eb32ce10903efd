"""The object-sound library: asset ingestion, retrieval, and bindings.

Assets come in three roles. Music and ambient assets feed whole layers;
effect assets are what objects get bound to and what taps trigger.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import (
    GainOutOfRange,
    RoleMismatch,
    UnknownAsset,
    UnknownObject,
)
from .render import PcmBuffer, decode_wav
from .scene import normalize_label
import enum


class Role(str, enum.Enum):
    MUSIC = "music"
    AMBIENT = "ambient"
    EFFECT = "effect"


MAX_GAIN = 4.0
MAX_PAGE_SIZE = 200


@dataclass
class SoundAsset:
    id: str
    role: Role
    labels: tuple[str, ...]  # ordered; labels[0] is the primary label
    duration_ms: int
    sample_rate: int
    channels: int
    loopable: bool
    payload_ref: str

    @property
    def primary_label(self) -> Optional[str]:
        return self.labels[0] if self.labels else None


@dataclass(frozen=True)
class SoundBinding:
    object_id: str
    asset_id: str
    gain: float = 1.0


@dataclass
class BrowsePage:
    assets: list[SoundAsset]
    total: int
    page: int
    page_size: int


def _duration_ms(frames: int, rate: int) -> int:
    # round to nearest ms, half up, in exact integer arithmetic
    return (2 * frames * 1000 + rate) // (2 * rate)


class Catalog:
    """Id-keyed asset collection with a label inverted index.

    With a root directory, payloads live in ``<root>/assets/`` and the
    manifest in ``<root>/catalog.json``; without one everything stays in
    memory (handy for tests).
    """

    def __init__(self, root: Optional[Path | str] = None):
        self.root = Path(root) if root is not None else None
        self.assets: dict[str, SoundAsset] = {}
        self.label_index: dict[str, set[str]] = {}
        self._payloads: dict[str, bytes] = {}
        if self.root is not None:
            (self.root / "assets").mkdir(parents=True, exist_ok=True)

    # -- ingestion ------------------------------------------------------

    def ingest(
        self,
        wav_bytes: bytes,
        role: Role,
        labels: Sequence[str] = (),
        loopable: bool = False,
        asset_id: Optional[str] = None,
    ) -> SoundAsset:
        """Validate and store a WAV payload; duration comes from the frames.

        Ambient assets are loopable by definition, whatever the caller says.
        """
        buf = decode_wav(wav_bytes)
        role = Role(role)
        normalized: list[str] = []
        for label in labels:
            token = normalize_label(label)
            if token not in normalized:
                normalized.append(token)
        aid = asset_id or f"ast-{uuid.uuid4().hex[:12]}"
        asset = SoundAsset(
            id=aid,
            role=role,
            labels=tuple(normalized),
            duration_ms=_duration_ms(buf.frames, buf.sample_rate),
            sample_rate=buf.sample_rate,
            channels=buf.channels,
            loopable=True if role is Role.AMBIENT else bool(loopable),
            payload_ref=f"assets/{aid}.wav",
        )
        if self.root is not None:
            (self.root / asset.payload_ref).write_bytes(wav_bytes)
        else:
            self._payloads[aid] = wav_bytes
        self.assets[aid] = asset
        for token in asset.labels:
            self.label_index.setdefault(token, set()).add(aid)
        return asset

    # -- payload access ---------------------------------------------------

    def payload(self, asset_id: str) -> bytes:
        asset = self.get(asset_id)
        if self.root is not None:
            return (self.root / asset.payload_ref).read_bytes()
        return self._payloads[asset_id]

    def buffer(self, asset_id: str) -> PcmBuffer:
        return decode_wav(self.payload(asset_id))

    def get(self, asset_id: str) -> SoundAsset:
        try:
            return self.assets[asset_id]
        except KeyError:
            raise UnknownAsset(asset_id) from None

    def duration_ms(self, asset_id: str) -> int:
        return self.get(asset_id).duration_ms

    def rebuild_label_index(self) -> dict[str, set[str]]:
        index: dict[str, set[str]] = {}
        for asset in self.assets.values():
            for token in asset.labels:
                index.setdefault(token, set()).add(asset.id)
        return index

    # -- persistence ------------------------------------------------------

    def save(self) -> None:
        if self.root is None:
            raise ValueError("in-memory catalog has nowhere to save")
        manifest = [
            {
                "id": a.id,
                "role": a.role.value,
                "labels": list(a.labels),
                "loopable": a.loopable,
                "duration_ms": a.duration_ms,
                "sample_rate": a.sample_rate,
                "channels": a.channels,
                "payload": a.payload_ref,
            }
            for a in sorted(self.assets.values(), key=lambda a: a.id)
        ]
        text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        (self.root / "catalog.json").write_text(text)

    @classmethod
    def load(cls, root: Path | str) -> "Catalog":
        catalog = cls(root)
        manifest_path = catalog.root / "catalog.json"
        if not manifest_path.exists():
            return catalog
        for entry in json.loads(manifest_path.read_text()):
            asset = SoundAsset(
                id=entry["id"],
                role=Role(entry["role"]),
                labels=tuple(entry["labels"]),
                duration_ms=int(entry["duration_ms"]),
                sample_rate=int(entry["sample_rate"]),
                channels=int(entry["channels"]),
                loopable=bool(entry["loopable"]),
                payload_ref=entry["payload"],
            )
            catalog.assets[asset.id] = asset
            for token in asset.labels:
                catalog.label_index.setdefault(token, set()).add(asset.id)
        return catalog


def lookup_by_label(
    catalog: Catalog, label: str, role_filter: Optional[Role] = None
) -> list[SoundAsset]:
    """Tiered retrieval: primary-label matches first, then any-label matches.

    Within a tier, assets order by id so results are reproducible.
    """
    token = normalize_label(label)
    ids = catalog.label_index.get(token, set())
    candidates = [catalog.assets[aid] for aid in sorted(ids)]
    if role_filter is not None:
        candidates = [a for a in candidates if a.role is Role(role_filter)]
    primary = [a for a in candidates if a.primary_label == token]
    secondary = [a for a in candidates if a.primary_label != token]
    return primary + secondary


def browse(
    catalog: Catalog,
    role_filter: Optional[Role] = None,
    page: int = 0,
    page_size: int = 50,
) -> BrowsePage:
    """Stable id-ordered paging over the whole library."""
    if page < 0:
        raise ValueError("page must be >= 0")
    if not 1 <= page_size <= MAX_PAGE_SIZE:
        raise ValueError(f"page_size must be in [1, {MAX_PAGE_SIZE}]")
    assets = sorted(catalog.assets.values(), key=lambda a: a.id)
    if role_filter is not None:
        role = Role(role_filter)
        assets = [a for a in assets if a.role is role]
    start = page * page_size
    return BrowsePage(
        assets=assets[start : start + page_size],
        total=len(assets),
        page=page,
        page_size=page_size,
    )


def bind_sound(
    scene_object_ids: Iterable[str],
    bindings: dict[str, SoundBinding],
    catalog: Catalog,
    object_id: str,
    asset_id: str,
    gain: float = 1.0,
) -> SoundBinding:
    """Attach an effect asset to an object; one active binding per object."""
    if not 0.0 <= gain <= MAX_GAIN:
        raise GainOutOfRange(f"gain {gain} outside [0, {MAX_GAIN}]")
    if object_id not in set(scene_object_ids):
        raise UnknownObject(object_id)
    asset = catalog.get(asset_id)
    if asset.role is not Role.EFFECT:
        raise RoleMismatch(f"{asset_id} has role {asset.role.value}, need effect")
    binding = SoundBinding(object_id=object_id, asset_id=asset_id, gain=gain)
    bindings[object_id] = binding
    return binding
