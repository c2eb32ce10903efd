"""Transport state machine and trigger-event recording.

A recording session plays the selected layers conceptually from t=0 and
stamps each tap with a millisecond offset from the session start. The
clock is always caller-supplied, never read here, so a recorded log
replays to an identical timeline every time.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .errors import (
    AlreadyRecording,
    ClockBeforeStart,
    GainOutOfRange,
    IndexOutOfRange,
    NoMusicSelected,
    NotRecording,
    NotStopped,
    PastCap,
    ReRecordRequiresConfirm,
    UnboundObject,
)

# Sessions and trigger offsets are capped at ten minutes.
SESSION_CAP_MS = 600_000


class TransportState(str, enum.Enum):
    IDLE = "idle"
    RECORDING = "recording"
    STOPPED = "stopped"


@dataclass(frozen=True)
class TriggerEvent:
    """One tap: a one-shot effect placed at an offset from session start."""

    offset_ms: int
    object_id: str
    asset_id: str
    gain: float


@dataclass
class Timeline:
    """The composed piece: music + ambient selections plus trigger events."""

    music_asset: Optional[str] = None
    music_gain: float = 1.0
    ambient_asset: Optional[str] = None
    ambient_gain: float = 1.0
    events: list[TriggerEvent] = field(default_factory=list)
    duration_ms: int = 0


@dataclass
class Session:
    """A single recording pass over a project's timeline."""

    id: str
    project_id: str
    state: TransportState
    start_wall_ms: int
    timeline: Timeline


def compute_duration_ms(timeline: Timeline, duration_for: Callable[[str], int]) -> int:
    """Duration rule: the longer of the music and the latest effect tail.

    The ambient layer loops to fill and never extends the piece. Capped at
    SESSION_CAP_MS.
    """
    total = 0
    if timeline.music_asset is not None:
        total = duration_for(timeline.music_asset)
    for event in timeline.events:
        total = max(total, event.offset_ms + duration_for(event.asset_id))
    return min(total, SESSION_CAP_MS)


def start_recording(
    project_timeline: Timeline,
    session_id: str,
    project_id: str,
    now_wall_ms: int,
    active_session: Optional[Session] = None,
    *,
    discard_events: bool = False,
) -> Session:
    """Begin a recording pass onto a fresh copy of the timeline.

    Any previously recorded events are discarded, which requires the
    explicit ``discard_events`` confirmation when they exist.
    """
    if project_timeline.music_asset is None:
        raise NoMusicSelected("select background music before recording")
    if active_session is not None and active_session.state is TransportState.RECORDING:
        raise AlreadyRecording(active_session.id)
    if project_timeline.events and not discard_events:
        raise ReRecordRequiresConfirm(
            f"{len(project_timeline.events)} recorded event(s) would be discarded"
        )
    working = replace(project_timeline, events=[], duration_ms=0)
    return Session(
        id=session_id,
        project_id=project_id,
        state=TransportState.RECORDING,
        start_wall_ms=now_wall_ms,
        timeline=working,
    )


def record_trigger(
    session: Session,
    object_id: str,
    now_wall_ms: int,
    binding_for: Callable[[str], Optional[tuple[str, float]]],
) -> TriggerEvent:
    """Stamp a tap on ``object_id`` at the current wall clock.

    ``binding_for`` maps an object id to its bound (asset_id, gain) or
    None. Events stay sorted by offset with stable insertion order.
    """
    if session.state is not TransportState.RECORDING:
        raise NotRecording(f"transport is {session.state.value}")
    bound = binding_for(object_id)
    if bound is None:
        raise UnboundObject(object_id)
    if now_wall_ms < session.start_wall_ms:
        raise ClockBeforeStart(f"{now_wall_ms} < {session.start_wall_ms}")
    offset = now_wall_ms - session.start_wall_ms
    if offset > SESSION_CAP_MS:
        raise PastCap(f"offset {offset} ms exceeds {SESSION_CAP_MS} ms")
    asset_id, gain = bound
    event = TriggerEvent(offset_ms=offset, object_id=object_id, asset_id=asset_id, gain=gain)
    events = session.timeline.events
    events.insert(bisect_right([e.offset_ms for e in events], offset), event)
    return event


def stop_recording(
    session: Session,
    now_wall_ms: int,
    duration_for: Callable[[str], int],
) -> Timeline:
    """End the pass and fix the timeline's duration."""
    if session.state is not TransportState.RECORDING:
        raise NotRecording(f"transport is {session.state.value}")
    if now_wall_ms < session.start_wall_ms:
        raise ClockBeforeStart(f"{now_wall_ms} < {session.start_wall_ms}")
    session.state = TransportState.STOPPED
    session.timeline.duration_ms = compute_duration_ms(session.timeline, duration_for)
    return session.timeline


def set_event_gain(
    timeline: Timeline,
    event_index: int,
    gain: float,
    transport: TransportState = TransportState.STOPPED,
) -> Timeline:
    """Replace one event's gain on a stopped timeline.

    Returns a new Timeline; the input is left untouched so stopped
    timelines stay shareable snapshots.
    """
    if transport is not TransportState.STOPPED:
        raise NotStopped(f"transport is {transport.value}")
    if not 0 <= event_index < len(timeline.events):
        raise IndexOutOfRange(f"event index {event_index} of {len(timeline.events)}")
    if not 0.0 <= gain <= 4.0:
        raise GainOutOfRange(f"gain {gain} outside [0, 4]")
    events = list(timeline.events)
    events[event_index] = replace(events[event_index], gain=gain)
    return replace(timeline, events=events)
