"""Deterministic fixture store used by the CLI and acceptance suites.

Every asset is synthesized from closed-form signals (no RNG) so the store
is byte-identical on every machine, which is what makes the frozen golden
render meaningful.
"""

from __future__ import annotations

import math
from pathlib import Path

from soundscene.catalog import Catalog, Role
from soundscene.project import Project, ProjectStore
from soundscene.timeline import Timeline, TransportState, TriggerEvent

from conftest import build_wav

FIXTURE_PROJECT_ID = "prj-fixture01"


def _sine_frames(freq: float, seconds: float, rate: int, amp: float, decay: bool = False):
    n = round(seconds * rate)
    frames = []
    for i in range(n):
        envelope = (1.0 - i / n) if decay else 1.0
        value = amp * envelope * math.sin(2 * math.pi * freq * i / rate)
        frames.append((int(round(value * 32767)),))
    return frames


def fixture_assets() -> dict[str, tuple[bytes, Role, tuple[str, ...], bool]]:
    return {
        "ast-music01": (
            build_wav(_sine_frames(220.0, 2.0, 44100, 0.4), rate=44100),
            Role.MUSIC, ("generated",), False,
        ),
        "ast-amb01": (
            build_wav(_sine_frames(80.0, 0.25, 48000, 0.1), rate=48000),
            Role.AMBIENT, ("wind",), True,
        ),
        "ast-fx-bark": (
            build_wav(_sine_frames(880.0, 0.2, 48000, 0.5, decay=True), rate=48000),
            Role.EFFECT, ("dog", "bark"), False,
        ),
        "ast-fx-chirp": (
            build_wav(_sine_frames(1320.0, 0.2, 48000, 0.3, decay=True), rate=48000),
            Role.EFFECT, ("bird", "chirp"), False,
        ),
    }


def fixture_timeline() -> Timeline:
    return Timeline(
        music_asset="ast-music01",
        music_gain=0.9,
        ambient_asset="ast-amb01",
        ambient_gain=0.6,
        events=[
            TriggerEvent(offset_ms=300, object_id="obj-1", asset_id="ast-fx-bark", gain=1.2),
            TriggerEvent(offset_ms=1500, object_id="obj-2", asset_id="ast-fx-chirp", gain=0.8),
        ],
        duration_ms=2000,
    )


def build_fixture_store(root: Path) -> Path:
    """Create a store with the fixture catalog and one stopped project."""
    catalog = Catalog(root)
    for asset_id, (wav, role, labels, loopable) in fixture_assets().items():
        catalog.ingest(wav, role, labels=labels, loopable=loopable, asset_id=asset_id)
    catalog.save()
    store = ProjectStore(root)
    project = Project(
        id=FIXTURE_PROJECT_ID,
        created_at_ms=1_700_000_000_000,
        timeline=fixture_timeline(),
        transport=TransportState.STOPPED,
    )
    store.save(project)
    return store.project_dir(project.id) / "project.json"
