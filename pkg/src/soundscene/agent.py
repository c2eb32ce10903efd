"""Conversational flow: scene description, music generation, refinement.

The describer and the music generator are ports. The shipped mocks are
fully deterministic so the whole dialogue, including generated audio
bytes, is reproducible offline; HTTP adapters cover real backends.
"""

from __future__ import annotations

import base64
import enum
import math
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

from .catalog import Catalog, Role
from .errors import BackendFailure, Busy, EmptyBrief, StateViolation, UnknownOption
from .render import PcmBuffer, encode_wav_pcm16

OPENING_QUESTION = "What kind of sound memory do you want to create?"

OPTIONS_PER_ROUND = 3


class DialogueState(str, enum.Enum):
    AWAIT_IMAGE = "await_image"
    DESCRIBED = "described"
    OPTIONS_OFFERED = "options_offered"
    MUSIC_SELECTED = "music_selected"


@dataclass(frozen=True)
class ChatTurn:
    role: str  # "user" | "agent"
    text: str
    timestamp_ms: int = 0


@dataclass(frozen=True)
class MusicOption:
    id: str
    asset_id: str
    caption: str


@dataclass(frozen=True)
class MusicPayload:
    caption: str
    wav_bytes: bytes


class DescriberPort(Protocol):
    def describe(self, labels: Sequence[str], image_bytes: Optional[bytes] = None) -> str: ...


class MusicGenPort(Protocol):
    def generate(self, brief: str, feedback: Sequence[str]) -> list[MusicPayload]: ...


# --- deterministic mocks ------------------------------------------------------


class MockDescriber:
    """Describes a scene as its sorted unique labels."""

    def describe(self, labels: Sequence[str], image_bytes: Optional[bytes] = None) -> str:
        unique = sorted(set(labels))
        if not unique:
            return "A scene."
        return "A scene containing: " + ", ".join(unique) + "."


def _context_string(brief: str, feedback: Sequence[str]) -> str:
    return "\n".join([brief, *feedback])


class MockMusicGen:
    """Three 8-second sine stems derived from the request text.

    The root frequency is 220 + (byte-sum of the context) mod 220 Hz; the
    other two options sit a major third and a fifth above, so the options
    are audibly distinct and any change to the text moves the pitch.
    """

    sample_rate = 48000
    seconds = 8
    amplitude = 0.3
    semitones = (0, 4, 7)

    def generate(self, brief: str, feedback: Sequence[str]) -> list[MusicPayload]:
        context = _context_string(brief, feedback)
        root = 220 + sum(context.encode("utf-8")) % 220
        names = ("root", "third", "fifth")
        payloads = []
        for name, semis in zip(names, self.semitones):
            freq = root * 2.0 ** (semis / 12.0)
            t = np.arange(self.sample_rate * self.seconds) / self.sample_rate
            wave = self.amplitude * np.sin(2.0 * math.pi * freq * t)
            wav = encode_wav_pcm16(PcmBuffer(self.sample_rate, wave[np.newaxis, :]))
            payloads.append(
                MusicPayload(caption=f"{name} voicing at {freq:.2f} Hz", wav_bytes=wav)
            )
        return payloads


# --- HTTP adapters ------------------------------------------------------------


class HttpDescriber:
    """POST {image_b64?, labels, context} -> {text}. One automatic retry."""

    def __init__(self, url: str, auth_token: Optional[str] = None, timeout: float = 30.0):
        self.url = url
        self.auth_token = auth_token
        self.timeout = timeout

    def describe(self, labels: Sequence[str], image_bytes: Optional[bytes] = None) -> str:
        import httpx

        body: dict = {"labels": list(labels), "context": ""}
        if image_bytes is not None:
            body["image_b64"] = base64.b64encode(image_bytes).decode("ascii")
        headers = {}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        last_exc: Exception | None = None
        for _ in range(2):
            try:
                resp = httpx.post(self.url, json=body, headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                return str(resp.json()["text"])
            except Exception as exc:  # retried once, then surfaced
                last_exc = exc
        raise BackendFailure(f"describe backend: {last_exc}") from last_exc


class HttpMusicGen:
    """POST {context, n} -> {options: [{caption, wav_b64}]}. One automatic retry."""

    def __init__(self, url: str, auth_token: Optional[str] = None, timeout: float = 120.0):
        self.url = url
        self.auth_token = auth_token
        self.timeout = timeout

    def generate(self, brief: str, feedback: Sequence[str]) -> list[MusicPayload]:
        import httpx

        body = {"context": _context_string(brief, feedback), "n": OPTIONS_PER_ROUND}
        headers = {}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        last_exc: Exception | None = None
        for _ in range(2):
            try:
                resp = httpx.post(self.url, json=body, headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                options = resp.json()["options"]
                return [
                    MusicPayload(
                        caption=str(o["caption"]),
                        wav_bytes=base64.b64decode(o["wav_b64"]),
                    )
                    for o in options
                ]
            except Exception as exc:
                last_exc = exc
        raise BackendFailure(f"generate backend: {last_exc}") from last_exc


# --- dialogue operations ------------------------------------------------------
#
# These operate on any object carrying the dialogue fields used below
# (in practice soundscene.project.Project): dialogue_state, turns, brief,
# feedback, rounds, scene, timeline, generation_in_flight.


def describe_scene(project, describer: DescriberPort, now_ms: int = 0) -> tuple[ChatTurn, ChatTurn]:
    """Open the dialogue: a scene description followed by the fixed question."""
    if project.scene is None:
        raise StateViolation("no image imported")
    if project.dialogue_state is not DialogueState.AWAIT_IMAGE:
        raise StateViolation(f"describe not legal in {project.dialogue_state.value}")
    labels = [obj.label for obj in project.scene.objects]
    try:
        description = describer.describe(labels)
    except BackendFailure:
        raise
    except Exception as exc:
        raise BackendFailure(f"describer port failed: {exc}") from exc
    first = ChatTurn(role="agent", text=description, timestamp_ms=now_ms)
    second = ChatTurn(role="agent", text=OPENING_QUESTION, timestamp_ms=now_ms)
    project.turns.extend([first, second])
    project.dialogue_state = DialogueState.DESCRIBED
    return first, second


def _run_generation(project, generator: MusicGenPort, catalog: Catalog, now_ms: int) -> list[MusicOption]:
    if project.generation_in_flight:
        raise Busy("a generation round is already in flight")
    project.generation_in_flight = True
    try:
        payloads = generator.generate(project.brief, list(project.feedback))
    except BackendFailure:
        raise
    except Exception as exc:
        raise BackendFailure(f"music backend failed: {exc}") from exc
    finally:
        project.generation_in_flight = False
    if len(payloads) != OPTIONS_PER_ROUND:
        raise BackendFailure(f"backend returned {len(payloads)} options, need {OPTIONS_PER_ROUND}")
    round_no = len(project.rounds) + 1
    options = []
    for i, payload in enumerate(payloads, start=1):
        asset = catalog.ingest(payload.wav_bytes, Role.MUSIC, labels=("generated",))
        options.append(
            MusicOption(id=f"opt-{round_no}-{i}", asset_id=asset.id, caption=payload.caption)
        )
    project.rounds.append(options)
    project.dialogue_state = DialogueState.OPTIONS_OFFERED
    project.turns.append(
        ChatTurn(
            role="agent",
            text="Here are three options: " + "; ".join(o.caption for o in options) + ".",
            timestamp_ms=now_ms,
        )
    )
    return options


def request_music(
    project, brief: str, generator: MusicGenPort, catalog: Catalog, now_ms: int = 0
) -> list[MusicOption]:
    """Generate the first round of three options from the user's brief."""
    if project.dialogue_state not in (DialogueState.DESCRIBED, DialogueState.OPTIONS_OFFERED):
        raise StateViolation(f"request not legal in {project.dialogue_state.value}")
    if not brief.strip():
        raise EmptyBrief("brief is empty")
    project.turns.append(ChatTurn(role="user", text=brief, timestamp_ms=now_ms))
    project.brief = brief
    project.feedback = []
    return _run_generation(project, generator, catalog, now_ms)


def refine_music(
    project, feedback: str, generator: MusicGenPort, catalog: Catalog, now_ms: int = 0
) -> list[MusicOption]:
    """Fold feedback into the context and generate a fresh round.

    Earlier rounds stay in the history and stay selectable.
    """
    if project.dialogue_state is not DialogueState.OPTIONS_OFFERED:
        raise StateViolation(f"refine not legal in {project.dialogue_state.value}")
    if not feedback.strip():
        raise EmptyBrief("feedback is empty")
    project.turns.append(ChatTurn(role="user", text=feedback, timestamp_ms=now_ms))
    project.feedback.append(feedback)
    return _run_generation(project, generator, catalog, now_ms)


def select_music(project, option_id: str) -> MusicOption:
    """Pin one offered option as the piece's background music."""
    if project.dialogue_state is not DialogueState.OPTIONS_OFFERED:
        raise StateViolation(f"select not legal in {project.dialogue_state.value}")
    chosen = None
    for round_options in project.rounds:
        for option in round_options:
            if option.id == option_id:
                chosen = option
    if chosen is None:
        raise UnknownOption(option_id)
    from .timeline import Timeline

    if project.timeline is None:
        project.timeline = Timeline()
    project.timeline.music_asset = chosen.asset_id
    project.dialogue_state = DialogueState.MUSIC_SELECTED
    return chosen
