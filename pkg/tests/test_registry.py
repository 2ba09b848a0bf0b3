"""Item registry: schemas, bindings, history, QR payloads, persistence."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinplat import errors
from twinplat.registry import (CustomAttributeDef, MediaRef, Registry,
                               decode_qr, encode_qr)


def make_item(reg: Registry, **attrs) -> str:
    item_id = reg.create_item("press", category="machine")
    for name, kind in attrs.items():
        reg.define_custom_attribute(item_id, CustomAttributeDef(name=name, kind=kind))
    return item_id


class TestItems:
    def test_auto_ids_are_unique(self):
        reg = Registry()
        ids = [reg.create_item(f"m{i}") for i in range(10)]
        assert len(set(ids)) == 10

    def test_explicit_duplicate_id_rejected(self):
        reg = Registry()
        reg.create_item("a", id="000X")
        with pytest.raises(errors.DuplicateId):
            reg.create_item("b", id="000X")

    def test_unknown_item_lookup(self):
        with pytest.raises(errors.UnknownItem):
            Registry().get("nope")


class TestAttributes:
    def test_all_kinds_accepted(self):
        reg = Registry()
        iid = reg.create_item("m")
        for kind in ("double", "integer", "long", "text", "media", "model3d"):
            reg.define_custom_attribute(iid, CustomAttributeDef(name=f"a_{kind}", kind=kind))
        assert len(reg.get(iid).custom_attrs) == 6

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            CustomAttributeDef(name="x", kind="float")

    def test_duplicate_attribute_rejected(self):
        reg = Registry()
        iid = make_item(reg, temp="double")
        with pytest.raises(errors.DuplicateAttribute):
            reg.define_custom_attribute(iid, CustomAttributeDef(name="temp", kind="text"))

    def test_define_remove_define_cycle(self):
        reg = Registry()
        iid = make_item(reg, temp="double")
        reg.remove_custom_attribute(iid, "temp")
        with pytest.raises(errors.UnknownAttribute):
            reg.remove_custom_attribute(iid, "temp")
        reg.define_custom_attribute(iid, CustomAttributeDef(name="temp", kind="integer"))
        assert reg.get(iid).custom_attrs["temp"].kind == "integer"

    def test_binding_requires_numeric_kind(self):
        with pytest.raises(errors.InvalidBinding):
            CustomAttributeDef(name="manual", kind="text", stream_binding="s1")
        reg = Registry()
        iid = make_item(reg, manual="text")
        with pytest.raises(errors.InvalidBinding):
            reg.bind_stream(iid, "manual", "s1")

    def test_last_binding_wins(self):
        reg = Registry()
        iid = make_item(reg, temp="double", vib="double")
        reg.bind_stream(iid, "temp", "s1")
        reg.bind_stream(iid, "vib", "s1")  # rebinding the same stream
        reg.ingest_sample("s1", 1.0, 7.5)
        values = reg.get(iid).latest_values()
        assert values == {"vib": 7.5}

    def test_unbound_stream_rejected(self):
        with pytest.raises(errors.UnboundStream):
            Registry().ingest_sample("ghost", 1.0, 0.0)


class TestHistory:
    def test_snapshots_merge_values(self):
        reg = Registry()
        iid = make_item(reg, temp="double", speed="double")
        reg.record_values(iid, 1.0, {"temp": 20.0})
        reg.record_values(iid, 2.0, {"speed": 3.0})
        assert reg.get(iid).latest_values() == {"temp": 20.0, "speed": 3.0}

    def test_equal_timestamp_rejected(self):
        reg = Registry()
        iid = make_item(reg, temp="double")
        reg.record_values(iid, 5.0, {"temp": 1.0})
        with pytest.raises(errors.NonMonotonicTimestamp):
            reg.record_values(iid, 5.0, {"temp": 2.0})
        with pytest.raises(errors.NonMonotonicTimestamp):
            reg.record_values(iid, 4.0, {"temp": 2.0})

    def test_unknown_attribute_in_record(self):
        reg = Registry()
        iid = make_item(reg)
        with pytest.raises(errors.UnknownAttribute):
            reg.record_values(iid, 1.0, {"temp": 1.0})

    def test_snapshot_at_floor_semantics(self):
        reg = Registry()
        iid = make_item(reg, temp="double")
        for t, v in [(1.0, 10.0), (2.0, 20.0), (4.0, 40.0)]:
            reg.record_values(iid, t, {"temp": v})
        assert reg.snapshot_at(iid, 3.0).values["temp"] == 20.0
        assert reg.snapshot_at(iid, 4.0).values["temp"] == 40.0
        assert reg.snapshot_at(iid, 0.5).values == {}

    def test_history_range_is_inclusive(self):
        reg = Registry()
        iid = make_item(reg, temp="double")
        for t in (1.0, 2.0, 3.0, 4.0):
            reg.record_values(iid, t, {"temp": t})
        assert [s.timestamp for s in reg.history(iid, 2.0, 3.0)] == [2.0, 3.0]

    @given(st.lists(st.floats(min_value=0.001, max_value=1e6,
                              allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=40))
    def test_history_strictly_increasing(self, deltas):
        reg = Registry()
        iid = make_item(reg, temp="double")
        t = 0.0
        for d in deltas:
            t += d
            reg.record_values(iid, t, {"temp": d})
        stamps = [s.timestamp for s in reg.history(iid)]
        assert all(a < b for a, b in zip(stamps, stamps[1:]))

    @given(st.floats(allow_nan=False, allow_infinity=False),
           st.lists(st.floats(min_value=0, max_value=1e9, allow_nan=False), max_size=20))
    def test_snapshot_at_monotone_in_t(self, probe, ts):
        reg = Registry()
        iid = make_item(reg, temp="double")
        for t in sorted(set(ts)):
            reg.record_values(iid, t, {"temp": t})
        lo = reg.snapshot_at(iid, probe)
        hi = reg.snapshot_at(iid, probe + abs(probe) + 1.0)
        assert lo.timestamp <= hi.timestamp


class TestQr:
    def test_round_trip(self):
        assert decode_qr(encode_qr("000X")) == "000X"

    def test_payload_shape(self):
        assert encode_qr("abc") == "twin://item/abc"

    @pytest.mark.parametrize("payload", ["http://item/1", "twin://item/", "", "twin:item/1", 42])
    def test_malformed_payloads(self, payload):
        with pytest.raises(errors.MalformedPayload):
            decode_qr(payload)

    @settings(max_examples=100)
    @given(st.text(alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd")),
                   min_size=1, max_size=32))
    def test_round_trip_random_ids(self, item_id):
        assert decode_qr(encode_qr(item_id)) == item_id


class TestPersistence:
    def build(self) -> Registry:
        reg = Registry()
        iid = reg.create_item("fin tube machine", "press line", "machine", id="000X",
                              created_at=0.0)
        reg.define_custom_attribute(iid, CustomAttributeDef(
            name="temp", kind="double", unit="degC", stream_binding="T1"))
        reg.define_custom_attribute(iid, CustomAttributeDef(name="note", kind="text"))
        reg.add_media(iid, MediaRef(kind="photo", uri="photos/000X.jpg", caption="front"))
        # values chosen so repr-level float fidelity actually matters
        reg.ingest_sample("T1", 1.0, 0.1 + 0.2)
        reg.record_values(iid, 2.5, {"note": "inspected", "temp": 1 / 3})
        reg.ingest_sample("T1", math.pi, -4.9e-324)
        return reg

    def test_round_trip_bit_equal(self, tmp_path):
        reg = self.build()
        schema, events = tmp_path / "schema.txt", tmp_path / "events.log"
        reg.save(schema, events)
        clone = Registry.load(schema, events)
        assert clone.dump_schema() == reg.dump_schema()
        assert clone.dump_events() == reg.dump_events()
        orig = reg.get("000X").state_history
        back = clone.get("000X").state_history
        assert [s.timestamp for s in back] == [s.timestamp for s in orig]
        for a, b in zip(orig, back):
            assert a.values == b.values  # exact, including float bits

    def test_corrupt_schema_reports_line(self, tmp_path):
        schema = tmp_path / "schema.txt"
        schema.write_text("item 000X|m|d|c|0.0\nbogus directive\n")
        events = tmp_path / "events.log"
        events.write_text("")
        with pytest.raises(errors.ConfigError, match=r"schema\.txt:2"):
            Registry.load(schema, events)
