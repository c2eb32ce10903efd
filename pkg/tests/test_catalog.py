import pytest
from hypothesis import given, settings, strategies as st

from soundscene.catalog import (
    Catalog,
    Role,
    SoundBinding,
    bind_sound,
    browse,
    lookup_by_label,
)
from soundscene.errors import (
    GainOutOfRange,
    InvalidWav,
    RoleMismatch,
    UnknownAsset,
    UnknownObject,
)

from conftest import build_wav


def effect_wav(n=480, rate=48000):
    return build_wav([(100,)] * n, rate=rate)


class TestIngest:
    def test_duration_one_second(self):
        catalog = Catalog()
        asset = catalog.ingest(build_wav([(0,)] * 48000, rate=48000), Role.EFFECT, ["dog"])
        assert asset.duration_ms == 1000

    def test_duration_half_second(self):
        catalog = Catalog()
        asset = catalog.ingest(build_wav([(0,)] * 22050, rate=44100), Role.EFFECT, ["dog"])
        assert asset.duration_ms == 500

    def test_truncated_header(self):
        with pytest.raises(InvalidWav):
            Catalog().ingest(effect_wav()[:20], Role.EFFECT, ["dog"])

    def test_ambient_forced_loopable(self):
        asset = Catalog().ingest(effect_wav(), Role.AMBIENT, ["wind"], loopable=False)
        assert asset.loopable is True

    def test_labels_normalized_and_deduped(self):
        asset = Catalog().ingest(effect_wav(), Role.EFFECT, ["Dog", "dog", "BARK"])
        assert asset.labels == ("dog", "bark")
        assert asset.primary_label == "dog"

    def test_payload_round_trips_through_disk(self, tmp_path):
        catalog = Catalog(tmp_path)
        data = effect_wav()
        asset = catalog.ingest(data, Role.EFFECT, ["dog"])
        assert catalog.payload(asset.id) == data
        catalog.save()
        reloaded = Catalog.load(tmp_path)
        assert reloaded.assets[asset.id] == asset
        assert reloaded.payload(asset.id) == data

    @given(st.integers(1, 200_000), st.sampled_from([8000, 22050, 44100, 48000]))
    @settings(max_examples=40, deadline=None)
    def test_duration_rule(self, frames, rate):
        catalog = Catalog()
        asset = catalog.ingest(build_wav([(0,)] * frames, rate=rate), Role.EFFECT, ["x"])
        assert asset.duration_ms == round(1000 * frames / rate + 1e-9)


class TestLookup:
    def test_empty_catalog(self):
        assert lookup_by_label(Catalog(), "dog") == []

    def test_label_containment(self):
        catalog = Catalog()
        a1 = catalog.ingest(effect_wav(), Role.EFFECT, ["dog", "bark"], asset_id="ast-a1")
        catalog.ingest(effect_wav(), Role.EFFECT, ["bird"], asset_id="ast-a2")
        assert [a.id for a in lookup_by_label(catalog, "dog")] == [a1.id]

    def test_primary_label_outranks_containment(self):
        catalog = Catalog()
        catalog.ingest(effect_wav(), Role.EFFECT, ["bark", "dog"], asset_id="ast-a1")
        catalog.ingest(effect_wav(), Role.EFFECT, ["dog", "animal"], asset_id="ast-a2")
        assert [a.id for a in lookup_by_label(catalog, "dog")] == ["ast-a2", "ast-a1"]

    def test_role_filter(self):
        catalog = Catalog()
        catalog.ingest(effect_wav(), Role.MUSIC, ["dog"], asset_id="ast-m")
        catalog.ingest(effect_wav(), Role.EFFECT, ["dog"], asset_id="ast-e")
        assert [a.id for a in lookup_by_label(catalog, "dog", Role.EFFECT)] == ["ast-e"]

    def test_tier_ordering_property(self):
        catalog = Catalog()
        for i in range(6):
            labels = ["dog"] if i % 2 == 0 else ["pet", "dog"]
            catalog.ingest(effect_wav(), Role.EFFECT, labels, asset_id=f"ast-{i}")
        results = lookup_by_label(catalog, "dog")
        tiers = [0 if a.primary_label == "dog" else 1 for a in results]
        assert tiers == sorted(tiers)
        # within a tier: ascending ids
        for tier in (0, 1):
            ids = [a.id for a, t in zip(results, tiers) if t == tier]
            assert ids == sorted(ids)


class TestBrowse:
    def fill(self, n=5):
        catalog = Catalog()
        for i in range(n):
            catalog.ingest(effect_wav(), Role.EFFECT, ["x"], asset_id=f"ast-{i}")
        return catalog

    def test_first_page(self):
        page = browse(self.fill(), page=0, page_size=2)
        assert [a.id for a in page.assets] == ["ast-0", "ast-1"]
        assert page.total == 5

    def test_past_end(self):
        page = browse(self.fill(), page=9, page_size=2)
        assert page.assets == [] and page.total == 5

    def test_last_partial_page(self):
        page = browse(self.fill(), page=2, page_size=2)
        assert [a.id for a in page.assets] == ["ast-4"]

    def test_page_size_bounds(self):
        with pytest.raises(ValueError):
            browse(self.fill(), page_size=0)
        with pytest.raises(ValueError):
            browse(self.fill(), page_size=201)
        with pytest.raises(ValueError):
            browse(self.fill(), page=-1)


class TestBindSound:
    def setup_method(self):
        self.catalog = Catalog()
        self.effect = self.catalog.ingest(effect_wav(), Role.EFFECT, ["dog"], asset_id="ast-e")
        self.music = self.catalog.ingest(effect_wav(), Role.MUSIC, [], asset_id="ast-m")
        self.objects = ["obj-1", "obj-2"]
        self.bindings: dict[str, SoundBinding] = {}

    def bind(self, object_id="obj-1", asset_id="ast-e", gain=1.0):
        return bind_sound(self.objects, self.bindings, self.catalog, object_id, asset_id, gain)

    def test_happy_path(self):
        binding = self.bind()
        assert self.bindings["obj-1"] == binding
        assert binding.gain == 1.0

    def test_role_mismatch(self):
        with pytest.raises(RoleMismatch):
            self.bind(asset_id="ast-m")

    def test_unknown_object(self):
        with pytest.raises(UnknownObject):
            self.bind(object_id="obj-9")

    def test_unknown_asset(self):
        with pytest.raises(UnknownAsset):
            self.bind(asset_id="ast-nope")

    def test_gain_out_of_range(self):
        with pytest.raises(GainOutOfRange):
            self.bind(gain=4.5)
        with pytest.raises(GainOutOfRange):
            self.bind(gain=-0.1)

    def test_rebind_replaces(self):
        other = self.catalog.ingest(effect_wav(), Role.EFFECT, ["dog"], asset_id="ast-e2")
        self.bind()
        self.bind(asset_id=other.id)
        assert len(self.bindings) == 1
        assert self.bindings["obj-1"].asset_id == other.id

    def test_idempotent(self):
        self.bind(gain=2.0)
        snapshot = dict(self.bindings)
        self.bind(gain=2.0)
        assert self.bindings == snapshot


@given(st.lists(st.lists(st.sampled_from(["dog", "cat", "wind", "rain"]), max_size=3), max_size=8))
@settings(max_examples=50, deadline=None)
def test_label_index_matches_rebuild(label_lists):
    catalog = Catalog()
    for i, labels in enumerate(label_lists):
        catalog.ingest(effect_wav(48), Role.EFFECT, labels, asset_id=f"ast-{i}")
    assert catalog.label_index == catalog.rebuild_label_index()
