"""Project state and its canonical on-disk form.

A project bundles everything one creation owns: the scene, bindings,
dialogue history, timeline, and render artifacts. Serialization is
canonical (sorted keys, stable formatting) so saving the same state twice
yields byte-identical project.json files.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .agent import ChatTurn, DialogueState, MusicOption
from .catalog import SoundBinding
from .errors import StorageFailure, UnknownProject, UnknownRender
from .scene import BoundingBox, DetectedObject, ImageFormat, ImageRef, Scene, Source
from .timeline import Session, Timeline, TransportState, TriggerEvent


@dataclass
class Project:
    id: str
    created_at_ms: int
    scene: Optional[Scene] = None
    bindings: dict[str, SoundBinding] = field(default_factory=dict)
    turns: list[ChatTurn] = field(default_factory=list)
    dialogue_state: DialogueState = DialogueState.AWAIT_IMAGE
    brief: Optional[str] = None
    feedback: list[str] = field(default_factory=list)
    rounds: list[list[MusicOption]] = field(default_factory=list)
    timeline: Optional[Timeline] = None
    transport: TransportState = TransportState.IDLE
    session: Optional[Session] = None
    renders: dict[str, str] = field(default_factory=dict)
    # transient: not persisted, re-entrancy guard for generation rounds
    generation_in_flight: bool = False

    def binding_for(self, object_id: str) -> Optional[tuple[str, float]]:
        binding = self.bindings.get(object_id)
        if binding is None:
            return None
        return binding.asset_id, binding.gain


# --- serialization -------------------------------------------------------------


def _timeline_to_dict(t: Timeline) -> dict[str, Any]:
    return {
        "music_asset": t.music_asset,
        "music_gain": float(t.music_gain),
        "ambient_asset": t.ambient_asset,
        "ambient_gain": float(t.ambient_gain),
        "duration_ms": int(t.duration_ms),
        "events": [
            {
                "offset_ms": int(e.offset_ms),
                "object_id": e.object_id,
                "asset_id": e.asset_id,
                "gain": float(e.gain),
            }
            for e in t.events
        ],
    }


def _timeline_from_dict(d: dict[str, Any]) -> Timeline:
    return Timeline(
        music_asset=d["music_asset"],
        music_gain=float(d["music_gain"]),
        ambient_asset=d["ambient_asset"],
        ambient_gain=float(d["ambient_gain"]),
        duration_ms=int(d["duration_ms"]),
        events=[
            TriggerEvent(
                offset_ms=int(e["offset_ms"]),
                object_id=e["object_id"],
                asset_id=e["asset_id"],
                gain=float(e["gain"]),
            )
            for e in d["events"]
        ],
    )


def project_to_dict(p: Project) -> dict[str, Any]:
    scene = None
    if p.scene is not None:
        scene = {
            "image": {
                "id": p.scene.image.id,
                "width": p.scene.image.width,
                "height": p.scene.image.height,
                "format": p.scene.image.format.value,
                "content_hash": p.scene.image.content_hash.hex(),
                "payload_ref": p.scene.image.payload_ref,
            },
            "objects": [
                {
                    "id": o.id,
                    "box": {"x": o.box.x, "y": o.box.y, "w": o.box.w, "h": o.box.h},
                    "label": o.label,
                    "confidence": float(o.confidence),
                    "source": o.source.value,
                }
                for o in p.scene.objects
            ],
        }
    session = None
    if p.session is not None:
        session = {
            "id": p.session.id,
            "project_id": p.session.project_id,
            "state": p.session.state.value,
            "start_wall_ms": int(p.session.start_wall_ms),
            "timeline": _timeline_to_dict(p.session.timeline),
        }
    return {
        "id": p.id,
        "created_at_ms": int(p.created_at_ms),
        "scene": scene,
        "bindings": {
            oid: {"object_id": b.object_id, "asset_id": b.asset_id, "gain": float(b.gain)}
            for oid, b in p.bindings.items()
        },
        "dialogue": {
            "state": p.dialogue_state.value,
            "turns": [
                {"role": t.role, "text": t.text, "timestamp_ms": int(t.timestamp_ms)}
                for t in p.turns
            ],
            "brief": p.brief,
            "feedback": list(p.feedback),
            "rounds": [
                [{"id": o.id, "asset_id": o.asset_id, "caption": o.caption} for o in rnd]
                for rnd in p.rounds
            ],
        },
        "timeline": _timeline_to_dict(p.timeline) if p.timeline is not None else None,
        "transport": p.transport.value,
        "session": session,
        "renders": dict(sorted(p.renders.items())),
    }


def project_from_dict(d: dict[str, Any]) -> Project:
    scene = None
    if d["scene"] is not None:
        img = d["scene"]["image"]
        scene = Scene(
            image=ImageRef(
                id=img["id"],
                width=int(img["width"]),
                height=int(img["height"]),
                format=ImageFormat(img["format"]),
                content_hash=bytes.fromhex(img["content_hash"]),
                payload_ref=img["payload_ref"],
            ),
            objects=[
                DetectedObject(
                    id=o["id"],
                    box=BoundingBox(**o["box"]),
                    label=o["label"],
                    confidence=float(o["confidence"]),
                    source=Source(o["source"]),
                )
                for o in d["scene"]["objects"]
            ],
        )
    dialogue = d["dialogue"]
    session = None
    if d["session"] is not None:
        s = d["session"]
        session = Session(
            id=s["id"],
            project_id=s["project_id"],
            state=TransportState(s["state"]),
            start_wall_ms=int(s["start_wall_ms"]),
            timeline=_timeline_from_dict(s["timeline"]),
        )
    return Project(
        id=d["id"],
        created_at_ms=int(d["created_at_ms"]),
        scene=scene,
        bindings={
            oid: SoundBinding(
                object_id=b["object_id"], asset_id=b["asset_id"], gain=float(b["gain"])
            )
            for oid, b in d["bindings"].items()
        },
        turns=[
            ChatTurn(role=t["role"], text=t["text"], timestamp_ms=int(t["timestamp_ms"]))
            for t in dialogue["turns"]
        ],
        dialogue_state=DialogueState(dialogue["state"]),
        brief=dialogue["brief"],
        feedback=list(dialogue["feedback"]),
        rounds=[
            [MusicOption(id=o["id"], asset_id=o["asset_id"], caption=o["caption"]) for o in rnd]
            for rnd in dialogue["rounds"]
        ],
        timeline=_timeline_from_dict(d["timeline"]) if d["timeline"] is not None else None,
        transport=TransportState(d["transport"]),
        session=session,
        renders=dict(d["renders"]),
    )


def canonical_json(data: dict[str, Any]) -> bytes:
    return (json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- the store -------------------------------------------------------------------


class ProjectStore:
    """Filesystem layout: one directory per project under the root.

    <root>/<project_id>/project.json
    <root>/<project_id>/assets/    uploaded images
    <root>/<project_id>/renders/   mixdown WAVs
    <root>/annotations/            detector sidecar files (shared)
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "annotations").mkdir(exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot prepare store root: {exc}") from exc

    # directory helpers

    def project_dir(self, project_id: str) -> Path:
        return self.root / project_id

    def annotations_dir(self) -> Path:
        return self.root / "annotations"

    def project_ids(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if (p / "project.json").exists()
        )

    # project lifecycle

    def create(self, now_ms: int, project_id: Optional[str] = None) -> Project:
        project = Project(id=project_id or f"prj-{uuid.uuid4().hex[:12]}", created_at_ms=now_ms)
        self.save(project)
        return project

    def save(self, project: Project) -> None:
        pdir = self.project_dir(project.id)
        try:
            pdir.mkdir(parents=True, exist_ok=True)
            (pdir / "assets").mkdir(exist_ok=True)
            (pdir / "renders").mkdir(exist_ok=True)
            payload = canonical_json(project_to_dict(project))
            tmp = pdir / "project.json.tmp"
            tmp.write_bytes(payload)
            tmp.replace(pdir / "project.json")
        except OSError as exc:
            raise StorageFailure(f"cannot persist project {project.id}: {exc}") from exc

    def load(self, project_id: str) -> Project:
        path = self.project_dir(project_id) / "project.json"
        if not path.exists():
            raise UnknownProject(project_id)
        return project_from_dict(json.loads(path.read_text()))

    # binary artifacts

    def write_image(self, project: Project, image: ImageRef, data: bytes) -> str:
        ext = "png" if image.format is ImageFormat.PNG else "jpg"
        rel = f"assets/{image.content_hash.hex()}.{ext}"
        try:
            (self.project_dir(project.id) / rel).write_bytes(data)
        except OSError as exc:
            raise StorageFailure(f"cannot store image: {exc}") from exc
        return rel

    def write_render(self, project: Project, render_id: str, data: bytes) -> str:
        rel = f"renders/{render_id}.wav"
        try:
            (self.project_dir(project.id) / rel).write_bytes(data)
        except OSError as exc:
            raise StorageFailure(f"cannot store render: {exc}") from exc
        return rel

    def read_render(self, project: Project, render_id: str) -> bytes:
        rel = project.renders.get(render_id)
        if rel is None:
            raise UnknownRender(render_id)
        path = self.project_dir(project.id) / rel
        if not path.exists():
            raise UnknownRender(render_id)
        return path.read_bytes()
