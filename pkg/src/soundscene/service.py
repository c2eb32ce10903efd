"""HTTP/JSON service over the engine.

One process serves many projects; mutations are serialized per project
with the last committed state always on disk, so every read after a write
reflects that write. Engine errors translate to HTTP statuses through a
single total mapping table.
"""

from __future__ import annotations

import hashlib
import threading
import time
import uuid
from dataclasses import replace
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import agent, errors
from .agent import (
    DialogueState,
    HttpDescriber,
    HttpMusicGen,
    MockDescriber,
    MockMusicGen,
)
from .catalog import Catalog, Role, SoundAsset, bind_sound, browse, lookup_by_label
from .project import (
    Project,
    ProjectStore,
    _timeline_to_dict,
    canonical_json,
    project_to_dict,
)
from .render import RenderOptions, encode_wav_pcm16, mix_timeline
from .scene import (
    BoundingBox,
    ImageFormat,
    Scene,
    SidecarDetector,
    add_manual_box,
    detect_objects,
    import_image,
)
from .timeline import (
    TransportState,
    record_trigger,
    start_recording,
    stop_recording,
)

# Engine error -> HTTP status. Total: every raisable engine error appears.
STATUS_BY_ERROR: dict[type, int] = {
    errors.UnknownProject: 404,
    errors.UnknownRender: 404,
    errors.UnknownObject: 404,
    errors.UnknownAsset: 404,
    errors.UnknownOption: 404,
    errors.UnsupportedFormat: 415,
    errors.CorruptImage: 422,
    errors.InvalidWav: 422,
    errors.UnsupportedEncoding: 422,
    errors.OutOfBounds: 422,
    errors.GainOutOfRange: 422,
    errors.RoleMismatch: 422,
    errors.UnboundObject: 422,
    errors.ClockBeforeStart: 422,
    errors.PastCap: 422,
    errors.IndexOutOfRange: 422,
    errors.EmptyBrief: 422,
    errors.EmptySource: 422,
    errors.RangeViolation: 422,
    errors.LengthMismatch: 422,
    errors.TooFewPairs: 422,
    errors.ZeroVariance: 422,
    errors.TooFewItems: 422,
    errors.ZeroTotalVariance: 422,
    errors.DivisionByZero: 422,
    errors.StateViolation: 409,
    errors.AlreadyRecording: 409,
    errors.NotRecording: 409,
    errors.NotStopped: 409,
    errors.NoMusicSelected: 409,
    errors.ReRecordRequiresConfirm: 409,
    errors.Busy: 409,
    errors.EmptyTimeline: 409,
    errors.MissingAsset: 409,
    errors.BackendFailure: 502,
    errors.DetectorUnavailable: 503,
    errors.StorageFailure: 507,
}


def _status_for(exc: Exception) -> int:
    for klass in type(exc).__mro__:
        if klass in STATUS_BY_ERROR:
            return STATUS_BY_ERROR[klass]
    return 500


def _now_ms() -> int:
    return int(time.time() * 1000)


def _asset_dict(asset: SoundAsset) -> dict:
    return {
        "id": asset.id,
        "role": asset.role.value,
        "labels": list(asset.labels),
        "loopable": asset.loopable,
        "duration_ms": asset.duration_ms,
        "sample_rate": asset.sample_rate,
        "channels": asset.channels,
        "payload": asset.payload_ref,
    }


class BoxBody(BaseModel):
    x: int
    y: int
    w: int
    h: int


class ChatBody(BaseModel):
    text: str = ""


class SelectBody(BaseModel):
    option_id: str


class BindingBody(BaseModel):
    object_id: Optional[str] = None
    box: Optional[BoxBody] = None
    label: Optional[str] = None
    asset_id: Optional[str] = None
    gain: float = 1.0


class SessionStartBody(BaseModel):
    wall_ms: int
    discard: bool = False
    music_gain: Optional[float] = None
    ambient_asset_id: Optional[str] = None
    ambient_gain: Optional[float] = None


class EventBody(BaseModel):
    object_id: str
    wall_ms: int


class SessionEventsBody(BaseModel):
    session_id: Optional[str] = None
    events: list[EventBody]


class SessionStopBody(BaseModel):
    wall_ms: int
    session_id: Optional[str] = None


class RenderBody(BaseModel):
    target_rate: int = 48000
    master_gain: float = 1.0
    normalize: bool = False


async def _raw_body(request: Request) -> bytes:
    return await request.body()


class EngineState:
    """Shared service state: store, catalog, ports, per-project locks."""

    def __init__(
        self,
        store: ProjectStore,
        catalog: Catalog,
        detector: SidecarDetector,
        describer,
        generator,
    ):
        self.store = store
        self.catalog = catalog
        self.detector = detector
        self.describer = describer
        self.generator = generator
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self.catalog_lock = threading.Lock()

    def lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())


def create_app(
    store_root: Path | str,
    *,
    backend: str = "mock",
    describe_url: Optional[str] = None,
    generate_url: Optional[str] = None,
    auth_token: Optional[str] = None,
) -> FastAPI:
    store = ProjectStore(store_root)
    catalog = Catalog.load(store.root)
    detector = SidecarDetector(store.annotations_dir())
    if backend == "mock":
        describer, generator = MockDescriber(), MockMusicGen()
    elif backend == "http":
        if not describe_url or not generate_url:
            raise ValueError("http backend requires describe and generate URLs")
        describer = HttpDescriber(describe_url, auth_token)
        generator = HttpMusicGen(generate_url, auth_token)
    else:
        raise ValueError(f"unknown backend mode {backend!r}")

    state = EngineState(store, catalog, detector, describer, generator)
    app = FastAPI(title="soundscene", version="0.1.0")
    app.state.engine = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(errors.SoundsceneError)
    async def engine_error(_request: Request, exc: errors.SoundsceneError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_error(_request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422, content={"error": "ValidationError", "detail": str(exc)}
        )

    # --- health ---------------------------------------------------------

    @app.get("/")
    def health():
        return {"status": "ok", "service": "soundscene"}

    # --- projects -------------------------------------------------------

    @app.post("/projects", status_code=201)
    def create_project():
        project = store.create(_now_ms())
        return {"project_id": project.id}

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return project_to_dict(store.load(project_id))

    @app.post("/projects/{project_id}/image")
    def upload_image(project_id: str, request: Request, body: bytes = Depends(_raw_body)):
        hint = {
            "image/png": ImageFormat.PNG,
            "image/jpeg": ImageFormat.JPEG,
            "image/jpg": ImageFormat.JPEG,
        }.get((request.headers.get("content-type") or "").split(";")[0].strip())
        with state.lock(project_id):
            project = store.load(project_id)
            image = import_image(body, hint)
            payload_ref = store.write_image(project, image, body)
            image = replace(image, payload_ref=payload_ref)
            objects = detect_objects(image, detector)
            project.scene = Scene(image=image, objects=objects)
            project.dialogue_state = DialogueState.AWAIT_IMAGE
            store.save(project)
            return {
                "image": project_to_dict(project)["scene"]["image"],
                "detected_objects": project_to_dict(project)["scene"]["objects"],
            }

    # --- dialogue ---------------------------------------------------------

    @app.post("/projects/{project_id}/chat")
    def chat(project_id: str, body: ChatBody):
        now = _now_ms()
        with state.lock(project_id):
            project = store.load(project_id)
            if project.scene is None:
                raise errors.StateViolation("upload an image before chatting")
            if project.dialogue_state is DialogueState.AWAIT_IMAGE:
                if body.text.strip():
                    project.turns.append(
                        agent.ChatTurn(role="user", text=body.text, timestamp_ms=now)
                    )
                agent.describe_scene(project, state.describer, now_ms=now)
            elif project.dialogue_state is DialogueState.DESCRIBED:
                with state.catalog_lock:
                    agent.request_music(project, body.text, state.generator, catalog, now_ms=now)
                    if catalog.root is not None:
                        catalog.save()
            elif project.dialogue_state is DialogueState.OPTIONS_OFFERED:
                with state.catalog_lock:
                    agent.refine_music(project, body.text, state.generator, catalog, now_ms=now)
                    if catalog.root is not None:
                        catalog.save()
            else:
                raise errors.StateViolation("music already selected")
            store.save(project)
            view = project_to_dict(project)
            response = {"turns": view["dialogue"]["turns"], "state": view["dialogue"]["state"]}
            if project.rounds:
                response["options"] = view["dialogue"]["rounds"][-1]
            return response

    @app.post("/projects/{project_id}/music/select")
    def music_select(project_id: str, body: SelectBody):
        with state.lock(project_id):
            project = store.load(project_id)
            option = agent.select_music(project, body.option_id)
            store.save(project)
            return {
                "option": {"id": option.id, "asset_id": option.asset_id, "caption": option.caption},
                "state": project.dialogue_state.value,
                "timeline": _timeline_to_dict(project.timeline),
            }

    # --- catalog ----------------------------------------------------------

    @app.get("/catalog")
    def catalog_query(
        label: Optional[str] = None,
        role: Optional[str] = None,
        page: int = Query(0, ge=0),
        page_size: int = Query(50, ge=1, le=200),
    ):
        role_filter = Role(role) if role else None
        if label is not None:
            assets = lookup_by_label(catalog, label, role_filter)
            return {"assets": [_asset_dict(a) for a in assets], "total": len(assets)}
        result = browse(catalog, role_filter, page=page, page_size=page_size)
        return {
            "assets": [_asset_dict(a) for a in result.assets],
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
        }

    @app.get("/catalog/assets/{asset_id}")
    def catalog_payload(asset_id: str):
        data = catalog.payload(asset_id)
        return Response(content=data, media_type="audio/wav")

    @app.post("/catalog/assets", status_code=201)
    def catalog_add(
        role: str,
        labels: str = "",
        loopable: bool = False,
        body: bytes = Depends(_raw_body),
    ):
        tokens = [t for t in labels.split(",") if t.strip()]
        with state.catalog_lock:
            asset = catalog.ingest(body, Role(role), labels=tokens, loopable=loopable)
            if catalog.root is not None:
                catalog.save()
        return {"asset": _asset_dict(asset)}

    # --- objects and bindings ----------------------------------------------

    @app.post("/projects/{project_id}/bindings")
    def bindings(project_id: str, body: BindingBody):
        with state.lock(project_id):
            project = store.load(project_id)
            if project.scene is None:
                raise errors.StateViolation("no scene to bind against")
            response: dict = {"object": None, "binding": None}
            object_id = body.object_id
            if body.box is not None:
                box = BoundingBox(body.box.x, body.box.y, body.box.w, body.box.h)
                obj = add_manual_box(project.scene, box, body.label)
                object_id = obj.id
                response["object"] = {
                    "id": obj.id,
                    "box": {"x": box.x, "y": box.y, "w": box.w, "h": box.h},
                    "label": obj.label,
                    "confidence": obj.confidence,
                    "source": obj.source.value,
                }
                if body.asset_id is None:
                    candidates = lookup_by_label(catalog, obj.label, Role.EFFECT)[:5]
                    response["candidates"] = [_asset_dict(a) for a in candidates]
            if body.asset_id is not None:
                if object_id is None:
                    raise ValueError("binding needs an object_id or a box")
                binding = bind_sound(
                    (o.id for o in project.scene.objects),
                    project.bindings,
                    catalog,
                    object_id,
                    body.asset_id,
                    body.gain,
                )
                response["binding"] = {
                    "object_id": binding.object_id,
                    "asset_id": binding.asset_id,
                    "gain": binding.gain,
                }
            elif body.box is None:
                raise ValueError("binding needs an asset_id or a box")
            store.save(project)
            return response

    # --- recording sessions ---------------------------------------------------

    @app.post("/projects/{project_id}/session/start")
    def session_start(project_id: str, body: SessionStartBody):
        with state.lock(project_id):
            project = store.load(project_id)
            if project.timeline is None:
                raise errors.NoMusicSelected("select background music before recording")
            if body.music_gain is not None:
                if not 0.0 <= body.music_gain <= 4.0:
                    raise errors.GainOutOfRange(f"music gain {body.music_gain}")
                project.timeline.music_gain = body.music_gain
            if body.ambient_asset_id is not None:
                asset = catalog.get(body.ambient_asset_id)
                if asset.role is not Role.AMBIENT:
                    raise errors.RoleMismatch(
                        f"{asset.id} has role {asset.role.value}, need ambient"
                    )
                project.timeline.ambient_asset = asset.id
            if body.ambient_gain is not None:
                if not 0.0 <= body.ambient_gain <= 4.0:
                    raise errors.GainOutOfRange(f"ambient gain {body.ambient_gain}")
                project.timeline.ambient_gain = body.ambient_gain
            session = start_recording(
                project.timeline,
                f"ses-{uuid.uuid4().hex[:12]}",
                project.id,
                body.wall_ms,
                project.session,
                discard_events=body.discard,
            )
            project.session = session
            project.transport = TransportState.RECORDING
            store.save(project)
            return {
                "session_id": session.id,
                "state": session.state.value,
                "start_wall_ms": session.start_wall_ms,
            }

    @app.post("/projects/{project_id}/session/events")
    def session_events(project_id: str, body: SessionEventsBody):
        with state.lock(project_id):
            project = store.load(project_id)
            if project.session is None:
                raise errors.NotRecording("no active session")
            if body.session_id is not None and body.session_id != project.session.id:
                raise errors.NotRecording(f"session {body.session_id} is not active")
            walls = [e.wall_ms for e in body.events]
            if any(b < a for a, b in zip(walls, walls[1:])):
                raise ValueError("event batch must be ordered by wall_ms")
            for event in body.events:
                record_trigger(project.session, event.object_id, event.wall_ms, project.binding_for)
            store.save(project)
            return {
                "accepted": len(body.events),
                "events": _timeline_to_dict(project.session.timeline)["events"],
            }

    @app.post("/projects/{project_id}/session/stop")
    def session_stop(project_id: str, body: SessionStopBody):
        with state.lock(project_id):
            project = store.load(project_id)
            if project.session is None:
                raise errors.NotRecording("no active session")
            if body.session_id is not None and body.session_id != project.session.id:
                raise errors.NotRecording(f"session {body.session_id} is not active")
            timeline = stop_recording(project.session, body.wall_ms, catalog.duration_ms)
            project.timeline = timeline
            project.transport = TransportState.STOPPED
            project.session = None
            store.save(project)
            return {"timeline": _timeline_to_dict(timeline), "state": "stopped"}

    # --- rendering ---------------------------------------------------------------

    @app.post("/projects/{project_id}/render", status_code=202)
    def render(project_id: str, body: RenderBody):
        with state.lock(project_id):
            project = store.load(project_id)
            if project.transport is TransportState.RECORDING:
                raise errors.NotStopped("stop the session before rendering")
            if project.timeline is None or project.timeline.duration_ms <= 0:
                raise errors.EmptyTimeline("nothing to render")
            options = RenderOptions(
                target_rate=body.target_rate,
                master_gain=body.master_gain,
                normalize=body.normalize,
            )
            fingerprint = canonical_json(
                {
                    "timeline": _timeline_to_dict(project.timeline),
                    "options": {
                        "target_rate": options.target_rate,
                        "master_gain": options.master_gain,
                        "normalize": options.normalize,
                    },
                }
            )
            render_id = hashlib.sha256(fingerprint).hexdigest()[:16]
            if render_id not in project.renders:
                mixed = mix_timeline(project.timeline, catalog.buffer, options)
                project.renders[render_id] = store.write_render(
                    project, render_id, encode_wav_pcm16(mixed)
                )
                store.save(project)
            return {"render_id": render_id}

    @app.get("/projects/{project_id}/renders/{render_id}")
    def get_render(project_id: str, render_id: str):
        project = store.load(project_id)
        data = store.read_render(project, render_id)
        return Response(content=data, media_type="audio/wav")

    return app
