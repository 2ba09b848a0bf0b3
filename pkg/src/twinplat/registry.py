"""Ontology-backed asset registry.

Each registered item is the digital twin of one manufacturing resource: a set
of static attributes, a variable set of custom attributes (optionally bound to
sensor streams), a strictly time-ordered snapshot history, and media links.
Items are addressable through a QR payload of the form ``twin://item/<id>``.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field, replace

from . import errors

NUMERIC_KINDS = frozenset({"double", "integer", "long"})
ATTRIBUTE_KINDS = NUMERIC_KINDS | {"text", "media", "model3d"}

QR_PREFIX = "twin://item/"


@dataclass(frozen=True)
class CustomAttributeDef:
    name: str
    kind: str
    unit: str = ""
    stream_binding: str | None = None

    def __post_init__(self):
        if self.kind not in ATTRIBUTE_KINDS:
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        if self.stream_binding is not None and self.kind not in NUMERIC_KINDS:
            raise errors.InvalidBinding(
                f"stream binding on non-numeric attribute {self.name!r}"
            )

    @property
    def is_numeric(self) -> bool:
        return self.kind in NUMERIC_KINDS


@dataclass(frozen=True)
class MediaRef:
    kind: str  # photo | video | audio | document | model3d
    uri: str
    caption: str = ""

    def __post_init__(self):
        if not self.uri:
            raise ValueError("media uri must be non-empty")


@dataclass(frozen=True)
class StateSnapshot:
    timestamp: float
    values: dict  # attr name -> value, full current map (copy-on-write)
    origin: str = "sensor-ingest"  # sensor-ingest | administrator-edit | scenario-execution


@dataclass
class ItemRecord:
    id: str
    name: str
    description: str = ""
    category: str = ""
    created_at: float = 0.0
    state_history: list[StateSnapshot] = field(default_factory=list)
    media_refs: list[MediaRef] = field(default_factory=list)
    custom_attrs: dict[str, CustomAttributeDef] = field(default_factory=dict)
    last_update: float = 0.0

    def latest_values(self) -> dict:
        return dict(self.state_history[-1].values) if self.state_history else {}


def encode_qr(item_id: str) -> str:
    return QR_PREFIX + item_id


def decode_qr(payload: str) -> str:
    if not isinstance(payload, str) or not payload.startswith(QR_PREFIX):
        raise errors.MalformedPayload(f"not a twin item payload: {payload!r}")
    item_id = payload[len(QR_PREFIX):]
    if not item_id:
        raise errors.MalformedPayload("empty item id in payload")
    return item_id


class Registry:
    """Thread-safe item store: single writer per item, concurrent readers."""

    def __init__(self):
        self._items: dict[str, ItemRecord] = {}
        self._item_locks: dict[str, threading.RLock] = {}
        self._streams: dict[str, tuple[str, str]] = {}  # stream -> (item, attr)
        self._lock = threading.RLock()
        self._ids = itertools.count(1)
        self._ingest_listeners = []

    # -- administration -------------------------------------------------

    def create_item(self, name: str, description: str = "", category: str = "",
                    id: str | None = None, created_at: float = 0.0) -> str:
        with self._lock:
            if id is None:
                id = f"item-{next(self._ids):04d}"
                while id in self._items:
                    id = f"item-{next(self._ids):04d}"
            if id in self._items:
                raise errors.DuplicateId(id)
            self._items[id] = ItemRecord(
                id=id, name=name, description=description, category=category,
                created_at=created_at, last_update=created_at,
            )
            self._item_locks[id] = threading.RLock()
            return id

    def get(self, item_id: str) -> ItemRecord:
        try:
            return self._items[item_id]
        except KeyError:
            raise errors.UnknownItem(item_id) from None

    def item_ids(self) -> list[str]:
        return sorted(self._items)

    def define_custom_attribute(self, item_id: str, attr: CustomAttributeDef):
        item = self.get(item_id)
        with self._item_locks[item_id]:
            if attr.name in item.custom_attrs:
                raise errors.DuplicateAttribute(attr.name)
            item.custom_attrs[attr.name] = attr
            if attr.stream_binding:
                self._bind(item_id, attr.name, attr.stream_binding)

    def remove_custom_attribute(self, item_id: str, name: str):
        item = self.get(item_id)
        with self._item_locks[item_id]:
            attr = item.custom_attrs.pop(name, None)
            if attr is None:
                raise errors.UnknownAttribute(name)
            if attr.stream_binding and self._streams.get(attr.stream_binding) == (item_id, name):
                del self._streams[attr.stream_binding]

    def bind_stream(self, item_id: str, attr_name: str, stream_id: str):
        item = self.get(item_id)
        with self._item_locks[item_id]:
            attr = item.custom_attrs.get(attr_name)
            if attr is None:
                raise errors.UnknownAttribute(attr_name)
            if not attr.is_numeric:
                raise errors.InvalidBinding(f"{attr_name!r} is not numeric")
            # last binding wins: drop any previous route of this attribute
            old = attr.stream_binding
            if old and self._streams.get(old) == (item_id, attr_name):
                del self._streams[old]
            item.custom_attrs[attr_name] = replace(attr, stream_binding=stream_id)
            self._bind(item_id, attr_name, stream_id)

    def _bind(self, item_id, attr_name, stream_id):
        self._streams[stream_id] = (item_id, attr_name)

    def add_media(self, item_id: str, media: MediaRef):
        item = self.get(item_id)
        with self._item_locks[item_id]:
            item.media_refs.append(media)

    def on_ingest(self, callback):
        """Register callback(item_id, attr_name, timestamp, value) fired after each ingest."""
        self._ingest_listeners.append(callback)

    # -- data plane ------------------------------------------------------

    def ingest_sample(self, stream_id: str, t: float, value):
        binding = self._streams.get(stream_id)
        if binding is None:
            raise errors.UnboundStream(stream_id)
        item_id, attr_name = binding
        self.record_values(item_id, t, {attr_name: value}, origin="sensor-ingest")
        for cb in self._ingest_listeners:
            cb(item_id, attr_name, t, value)

    def record_values(self, item_id: str, t: float, values: dict, origin: str = "administrator-edit"):
        """Append a snapshot carrying the merged current value map."""
        item = self.get(item_id)
        with self._item_locks[item_id]:
            for name in values:
                if name not in item.custom_attrs:
                    raise errors.UnknownAttribute(name)
            if item.state_history and t <= item.state_history[-1].timestamp:
                raise errors.NonMonotonicTimestamp(
                    f"t={t} not after latest snapshot t={item.state_history[-1].timestamp}"
                )
            merged = item.latest_values()
            merged.update(values)
            item.state_history.append(StateSnapshot(timestamp=t, values=merged, origin=origin))
            item.last_update = t

    def snapshot_at(self, item_id: str, t: float) -> StateSnapshot:
        """Newest snapshot with timestamp <= t; creation-state if none."""
        item = self.get(item_id)
        best = None
        for snap in item.state_history:
            if snap.timestamp <= t:
                best = snap
            else:
                break
        if best is None:
            return StateSnapshot(timestamp=item.created_at, values={}, origin="administrator-edit")
        return best

    def history(self, item_id: str, t_from: float = float("-inf"),
                t_to: float = float("inf")) -> list[StateSnapshot]:
        item = self.get(item_id)
        return [s for s in item.state_history if t_from <= s.timestamp <= t_to]

    # -- persistence -----------------------------------------------------
    # Schema file: declarative text, one directive per line.
    # Event log: one record per line, `timestamp,item_id,attr_name,value`.

    def dump_schema(self) -> str:
        lines = []
        for item_id in self.item_ids():
            item = self._items[item_id]
            lines.append(f"item {item.id}|{item.name}|{item.description}|{item.category}|{item.created_at}")
            for attr in item.custom_attrs.values():
                binding = attr.stream_binding or "-"
                lines.append(f"attr {item.id}|{attr.name}|{attr.kind}|{attr.unit}|{binding}")
            for m in item.media_refs:
                lines.append(f"media {item.id}|{m.kind}|{m.uri}|{m.caption}")
        return "\n".join(lines) + "\n"

    def dump_events(self) -> str:
        rows = []
        for item_id in self.item_ids():
            for snap in self._items[item_id].state_history:
                changed = snap.values
                for name in sorted(changed):
                    rows.append((snap.timestamp, item_id, name, changed[name], snap.origin))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))
        return "".join(f"{t!r},{i},{n},{v!r},{o}\n" for t, i, n, v, o in rows)

    def save(self, schema_path, events_path):
        with open(schema_path, "w") as fh:
            fh.write(self.dump_schema())
        with open(events_path, "w") as fh:
            fh.write(self.dump_events())

    @classmethod
    def load(cls, schema_path, events_path) -> "Registry":
        reg = cls()
        with open(schema_path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    kind, rest = line.split(" ", 1)
                    fields = rest.split("|")
                    if kind == "item":
                        iid, name, desc, cat, created = fields
                        reg.create_item(name, desc, cat, id=iid, created_at=float(created))
                    elif kind == "attr":
                        iid, name, akind, unit, binding = fields
                        reg.define_custom_attribute(iid, CustomAttributeDef(
                            name=name, kind=akind, unit=unit,
                            stream_binding=None if binding == "-" else binding))
                    elif kind == "media":
                        iid, mkind, uri, caption = fields
                        reg.add_media(iid, MediaRef(kind=mkind, uri=uri, caption=caption))
                    else:
                        raise ValueError(f"unknown directive {kind!r}")
                except (ValueError, errors.TwinError) as exc:
                    raise errors.ConfigError(f"{schema_path}:{lineno}: {exc}") from exc
        # replay the event log grouped by (timestamp, item) so co-timestamped
        # attribute values land in one snapshot, as written
        pending_key, pending_vals, pending_origin = None, {}, "sensor-ingest"
        with open(events_path) as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                t_s, iid, name, v_s, origin = line.split(",", 4)
                t, v = float(t_s), _parse_value(v_s)
                key = (t, iid)
                if key != pending_key:
                    if pending_key is not None:
                        reg.record_values(pending_key[1], pending_key[0], pending_vals,
                                          origin=pending_origin)
                    pending_key, pending_vals, pending_origin = key, {}, origin
                pending_vals[name] = v
        if pending_key is not None:
            reg.record_values(pending_key[1], pending_key[0], pending_vals, origin=pending_origin)
        return reg


def _parse_value(s: str):
    if s.startswith("'") and s.endswith("'"):
        return s[1:-1]
    try:
        return int(s)
    except ValueError:
        return float(s)
