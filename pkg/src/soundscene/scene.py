"""Images and the objects inside them.

A scene is the creation surface: an imported photo plus detected or
hand-drawn boxes. Box overlap (IoU) against existing objects is what
turns an anonymous rectangle into a label we can look sounds up with.
"""

from __future__ import annotations

import enum
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence

from PIL import Image, UnidentifiedImageError

from .errors import CorruptImage, DetectorUnavailable, OutOfBounds, UnsupportedFormat

# Candidate labels below this overlap are considered unrelated.
MIN_LABEL_IOU = 0.1

_TOKEN_RE = re.compile(r"[^a-z0-9_\-]+")


class ImageFormat(str, enum.Enum):
    PNG = "png"
    JPEG = "jpeg"


def normalize_label(label: str) -> str:
    """Canonical lowercase token used as a catalog lookup key."""
    token = _TOKEN_RE.sub("_", label.strip().lower()).strip("_")
    if not token:
        raise ValueError(f"label {label!r} normalizes to nothing")
    return token


@dataclass(frozen=True)
class BoundingBox:
    """Pixel rectangle, origin at the image's top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError("box width and height must be >= 1")

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h


@dataclass(frozen=True)
class ImageRef:
    id: str
    width: int
    height: int
    format: ImageFormat
    content_hash: bytes  # sha-256 of the raw bytes
    payload_ref: Optional[str] = None  # relative path once persisted


class Source(str, enum.Enum):
    AUTO = "auto"
    MANUAL = "manual"


@dataclass
class DetectedObject:
    id: str
    box: BoundingBox
    label: str
    confidence: float
    source: Source


@dataclass
class Scene:
    image: ImageRef
    objects: list[DetectedObject] = field(default_factory=list)

    def next_object_id(self) -> str:
        return f"obj-{len(self.objects) + 1}"


def check_box_bounds(box: BoundingBox, width: int, height: int) -> None:
    if box.x < 0 or box.y < 0 or box.x + box.w > width or box.y + box.h > height:
        raise OutOfBounds(f"box {box} outside {width}x{height} image")


def import_image(data: bytes, format_hint: Optional[ImageFormat] = None) -> ImageRef:
    """Parse dimensions from the container header and fingerprint the bytes.

    Only PNG and JPEG are accepted. A provided hint must agree with what
    the bytes actually are.
    """
    if not data:
        raise CorruptImage("empty image payload")
    try:
        with Image.open(io.BytesIO(data)) as im:
            detected = im.format
            width, height = im.size
    except UnidentifiedImageError as exc:
        raise CorruptImage(str(exc)) from exc
    except Exception as exc:  # Pillow raises assorted errors on bad headers
        raise CorruptImage(str(exc)) from exc
    if detected not in ("PNG", "JPEG"):
        raise UnsupportedFormat(f"{detected or 'unknown'} is not png/jpeg")
    fmt = ImageFormat.PNG if detected == "PNG" else ImageFormat.JPEG
    if format_hint is not None and format_hint is not fmt:
        raise UnsupportedFormat(f"bytes are {fmt.value}, caller said {format_hint.value}")
    if width < 1 or height < 1:
        raise CorruptImage(f"degenerate dimensions {width}x{height}")
    digest = hashlib.sha256(data).digest()
    return ImageRef(
        id=f"img-{digest.hex()[:12]}",
        width=width,
        height=height,
        format=fmt,
        content_hash=digest,
    )


@dataclass(frozen=True)
class Detection:
    """Raw detector output before validation and id assignment."""

    label: str
    box: BoundingBox
    confidence: float


class DetectorPort(Protocol):
    def detect(self, image: ImageRef) -> Sequence[Detection]: ...


class SidecarDetector:
    """Deterministic detector stub fed by JSON annotation files.

    Looks for ``<image_hash_hex>.annotations.json`` in its directory; a
    missing file means no detections. Each entry is
    {label, x, y, w, h, confidence}.
    """

    def __init__(self, annotations_dir: Path | str):
        self.annotations_dir = Path(annotations_dir)

    def detect(self, image: ImageRef) -> list[Detection]:
        path = self.annotations_dir / f"{image.content_hash.hex()}.annotations.json"
        if not path.exists():
            return []
        entries = json.loads(path.read_text())
        return [
            Detection(
                label=str(e["label"]),
                box=BoundingBox(int(e["x"]), int(e["y"]), int(e["w"]), int(e["h"])),
                confidence=float(e["confidence"]),
            )
            for e in entries
        ]


def detect_objects(image: ImageRef, detector: DetectorPort) -> list[DetectedObject]:
    """Run the detector port and validate everything it claims.

    Port failures and invalid detections both surface as
    DetectorUnavailable; this never silently returns a truncated list.
    """
    try:
        raw = detector.detect(image)
    except Exception as exc:
        raise DetectorUnavailable(f"detector port failed: {exc}") from exc
    objects: list[DetectedObject] = []
    for i, det in enumerate(raw, start=1):
        try:
            check_box_bounds(det.box, image.width, image.height)
            label = normalize_label(det.label)
        except (OutOfBounds, ValueError) as exc:
            raise DetectorUnavailable(f"invalid detection #{i}: {exc}") from exc
        if not 0.0 <= det.confidence <= 1.0:
            raise DetectorUnavailable(
                f"invalid detection #{i}: confidence {det.confidence} outside [0, 1]"
            )
        objects.append(
            DetectedObject(
                id=f"obj-{i}",
                box=det.box,
                label=label,
                confidence=det.confidence,
                source=Source.AUTO,
            )
        )
    return objects


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; 0 when disjoint."""
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def resolve_label(scene: Scene, box: BoundingBox) -> list[tuple[str, float]]:
    """Rank existing objects by overlap with the query box.

    Entries under MIN_LABEL_IOU are dropped; equal scores order by label.
    """
    scored = [(obj.label, iou(obj.box, box)) for obj in scene.objects]
    kept = [(label, s) for label, s in scored if s >= MIN_LABEL_IOU]
    return sorted(kept, key=lambda pair: (-pair[1], pair[0]))


def add_manual_box(
    scene: Scene, box: BoundingBox, label: Optional[str] = None
) -> DetectedObject:
    """Append a hand-drawn object; the label falls back to the best overlap."""
    check_box_bounds(box, scene.image.width, scene.image.height)
    if label is not None:
        resolved = normalize_label(label)
    else:
        candidates = resolve_label(scene, box)
        resolved = candidates[0][0] if candidates else "object"
    obj = DetectedObject(
        id=scene.next_object_id(),
        box=box,
        label=resolved,
        confidence=1.0,
        source=Source.MANUAL,
    )
    scene.objects.append(obj)
    return obj
