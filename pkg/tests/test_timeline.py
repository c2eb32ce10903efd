import pytest
from hypothesis import given, settings, strategies as st

from soundscene.errors import (
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
from soundscene.timeline import (
    SESSION_CAP_MS,
    Session,
    Timeline,
    TransportState,
    TriggerEvent,
    compute_duration_ms,
    record_trigger,
    set_event_gain,
    start_recording,
    stop_recording,
)

DURATIONS = {"music": 8000, "fx-bark": 2000, "fx-chirp": 500}
BINDINGS = {"obj-dog": ("fx-bark", 1.0), "obj-bird": ("fx-chirp", 0.8)}


def binding_for(object_id):
    return BINDINGS.get(object_id)


def duration_for(asset_id):
    return DURATIONS[asset_id]


def fresh_session(start=1000, music="music", events=()):
    timeline = Timeline(music_asset=music, events=list(events))
    return start_recording(timeline, "ses-1", "prj-1", start)


class TestStartRecording:
    def test_happy_path(self):
        session = fresh_session(start=1000)
        assert session.state is TransportState.RECORDING
        assert session.start_wall_ms == 1000
        assert session.timeline.events == []

    def test_requires_music(self):
        with pytest.raises(NoMusicSelected):
            start_recording(Timeline(), "ses-1", "prj-1", 0)

    def test_second_start_rejected(self):
        session = fresh_session()
        with pytest.raises(AlreadyRecording):
            start_recording(session.timeline, "ses-2", "prj-1", 2000, active_session=session)

    def test_rerecord_needs_confirmation(self):
        prior = Timeline(
            music_asset="music",
            events=[TriggerEvent(10, "obj-dog", "fx-bark", 1.0)],
            duration_ms=8000,
        )
        with pytest.raises(ReRecordRequiresConfirm):
            start_recording(prior, "ses-2", "prj-1", 0)
        session = start_recording(prior, "ses-2", "prj-1", 0, discard_events=True)
        assert session.timeline.events == []
        # the prior stopped timeline snapshot is untouched
        assert len(prior.events) == 1

    def test_start_allowed_after_stop(self):
        session = fresh_session(start=1000)
        stop_recording(session, 2000, duration_for)
        again = start_recording(session.timeline, "ses-2", "prj-1", 5000,
                                active_session=session, discard_events=True)
        assert again.state is TransportState.RECORDING


class TestRecordTrigger:
    def test_offset_zero(self):
        session = fresh_session(start=1000)
        event = record_trigger(session, "obj-dog", 1000, binding_for)
        assert event.offset_ms == 0

    def test_offset_subtraction(self):
        session = fresh_session(start=1000)
        event = record_trigger(session, "obj-dog", 2500, binding_for)
        assert event.offset_ms == 1500

    def test_gain_copied_from_binding(self):
        session = fresh_session()
        event = record_trigger(session, "obj-bird", 1500, binding_for)
        assert (event.asset_id, event.gain) == ("fx-chirp", 0.8)

    def test_not_recording(self):
        session = fresh_session()
        stop_recording(session, 2000, duration_for)
        with pytest.raises(NotRecording):
            record_trigger(session, "obj-dog", 3000, binding_for)

    def test_unbound_object(self):
        with pytest.raises(UnboundObject):
            record_trigger(fresh_session(), "obj-ghost", 1500, binding_for)

    def test_clock_before_start(self):
        with pytest.raises(ClockBeforeStart):
            record_trigger(fresh_session(start=1000), "obj-dog", 999, binding_for)

    def test_past_cap(self):
        session = fresh_session(start=0)
        record_trigger(session, "obj-dog", SESSION_CAP_MS, binding_for)  # boundary ok
        with pytest.raises(PastCap):
            record_trigger(session, "obj-dog", SESSION_CAP_MS + 1, binding_for)

    def test_out_of_order_batch_stays_sorted(self):
        session = fresh_session(start=0)
        record_trigger(session, "obj-dog", 500, binding_for)
        record_trigger(session, "obj-bird", 100, binding_for)
        record_trigger(session, "obj-dog", 500, binding_for)
        offsets = [e.offset_ms for e in session.timeline.events]
        assert offsets == [100, 500, 500]
        # equal offsets keep insertion order
        assert session.timeline.events[1].object_id == "obj-dog"

    @given(st.lists(st.integers(0, 10_000), min_size=1, max_size=30))
    @settings(max_examples=60, deadline=None)
    def test_offsets_equal_wall_deltas(self, deltas):
        start = 1000
        session = fresh_session(start=start)
        clock = start
        for delta in deltas:
            clock += delta
            record_trigger(session, "obj-dog", clock, binding_for)
        offsets = [e.offset_ms for e in session.timeline.events]
        assert offsets == sorted(offsets)
        expected = []
        acc = 0
        for delta in deltas:
            acc += delta
            expected.append(acc)
        assert offsets == expected


class TestStopRecording:
    def test_music_only_duration(self):
        session = fresh_session()
        timeline = stop_recording(session, 2000, duration_for)
        assert timeline.duration_ms == 8000

    def test_late_event_extends(self):
        session = fresh_session(start=0)
        record_trigger(session, "obj-dog", 7500, binding_for)  # 7500 + 2000 > 8000
        assert stop_recording(session, 8000, duration_for).duration_ms == 9500

    def test_early_event_does_not_extend(self):
        session = fresh_session(start=0)
        record_trigger(session, "obj-bird", 1000, binding_for)
        assert stop_recording(session, 8000, duration_for).duration_ms == 8000

    def test_stop_twice_rejected(self):
        session = fresh_session()
        stop_recording(session, 2000, duration_for)
        with pytest.raises(NotRecording):
            stop_recording(session, 3000, duration_for)

    def test_duration_capped(self):
        long_durations = {"music": SESSION_CAP_MS + 50_000}
        session = fresh_session()
        timeline = stop_recording(session, 2000, long_durations.__getitem__)
        assert timeline.duration_ms == SESSION_CAP_MS

    def test_recompute_matches_stored(self):
        session = fresh_session(start=0)
        for wall in (100, 2350, 7999):
            record_trigger(session, "obj-dog", wall, binding_for)
        timeline = stop_recording(session, 9000, duration_for)
        assert compute_duration_ms(timeline, duration_for) == timeline.duration_ms


class TestSetEventGain:
    def stopped_timeline(self):
        session = fresh_session(start=0)
        record_trigger(session, "obj-dog", 100, binding_for)
        record_trigger(session, "obj-bird", 200, binding_for)
        return stop_recording(session, 8000, duration_for)

    def test_only_target_changes(self):
        timeline = self.stopped_timeline()
        updated = set_event_gain(timeline, 0, 0.5)
        assert updated.events[0].gain == 0.5
        assert updated.events[1] == timeline.events[1]
        assert timeline.events[0].gain == 1.0  # original untouched

    def test_index_out_of_range(self):
        timeline = self.stopped_timeline()
        with pytest.raises(IndexOutOfRange):
            set_event_gain(timeline, len(timeline.events), 0.5)

    def test_gain_out_of_range(self):
        with pytest.raises(GainOutOfRange):
            set_event_gain(self.stopped_timeline(), 0, 5.0)

    def test_requires_stopped(self):
        with pytest.raises(NotStopped):
            set_event_gain(self.stopped_timeline(), 0, 0.5, transport=TransportState.RECORDING)


class TestStateMachine:
    """Exhaustive (state, operation) table: anything but the legal
    transitions must raise, and only start_recording yields RECORDING."""

    def in_state(self, state):
        timeline = Timeline(music_asset="music")
        if state is TransportState.IDLE:
            return None, timeline
        session = start_recording(timeline, "ses-1", "prj-1", 0)
        if state is TransportState.RECORDING:
            return session, session.timeline
        stop_recording(session, 1000, duration_for)
        return session, session.timeline

    @pytest.mark.parametrize("state", list(TransportState))
    def test_record_trigger_only_while_recording(self, state):
        session, _ = self.in_state(state)
        if state is TransportState.RECORDING:
            record_trigger(session, "obj-dog", 10, binding_for)
        elif session is not None:
            with pytest.raises(NotRecording):
                record_trigger(session, "obj-dog", 10, binding_for)

    @pytest.mark.parametrize("state", list(TransportState))
    def test_stop_only_while_recording(self, state):
        session, _ = self.in_state(state)
        if state is TransportState.RECORDING:
            assert stop_recording(session, 10, duration_for).duration_ms == 8000
        elif session is not None:
            with pytest.raises(NotRecording):
                stop_recording(session, 10, duration_for)

    @pytest.mark.parametrize("state", list(TransportState))
    def test_start_transitions(self, state):
        session, timeline = self.in_state(state)
        if state is TransportState.RECORDING:
            with pytest.raises(AlreadyRecording):
                start_recording(timeline, "ses-2", "prj-1", 5, active_session=session)
        else:
            new = start_recording(timeline, "ses-2", "prj-1", 5, active_session=session)
            assert new.state is TransportState.RECORDING

    @pytest.mark.parametrize("state", list(TransportState))
    def test_set_event_gain_only_when_stopped(self, state):
        session, _ = self.in_state(TransportState.STOPPED)
        record = session.timeline
        if state is TransportState.STOPPED:
            set_event_gain(record, 0, 1.0, transport=state) if record.events else None
        else:
            with pytest.raises(NotStopped):
                set_event_gain(record, 0, 1.0, transport=state)


def test_replay_determinism():
    log = [("obj-dog", 1040), ("obj-bird", 2333), ("obj-dog", 7999)]

    def run():
        session = fresh_session(start=1000)
        for object_id, wall in log:
            record_trigger(session, object_id, wall, binding_for)
        return stop_recording(session, 9000, duration_for)

    assert run() == run()
