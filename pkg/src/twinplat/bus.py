"""Enterprise service bus: pattern routing and correlated envelopes.

Producers register path patterns made of literal segments and ``{param}``
placeholders. The bus matches incoming envelopes against the table, invokes
the producer, and returns a response envelope carrying the same correlation
id. Producer failures are wrapped into error envelopes; they never take the
bus down.
"""

from __future__ import annotations

import itertools
import threading
import traceback
from dataclasses import dataclass, field

from . import errors

METHODS = ("GET", "PUT", "POST", "DELETE")


@dataclass
class ServiceEnvelope:
    method: str
    resource_path: str
    body: dict | list | str | None = None
    correlation_id: str = ""
    consumer_id: str = ""
    producer_id: str = ""
    status: str = "ok"            # "ok" | "error"
    error_code: int | None = None
    error_message: str = ""
    query: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise errors.BadRequest(f"unsupported method {self.method!r}")


@dataclass(frozen=True)
class _Route:
    pattern: str
    segments: tuple[str, ...]
    producer_id: str
    handler: object  # callable(env, params) -> body


def _split(path: str) -> tuple[str, ...]:
    return tuple(s for s in path.strip("/").split("/") if s != "")


def _patterns_overlap(a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    if len(a) != len(b):
        return False
    return all(x.startswith("{") or y.startswith("{") or x == y for x, y in zip(a, b))


class ServiceBus:
    def __init__(self):
        self._routes: list[_Route] = []
        self._reg_lock = threading.Lock()
        self._corr = itertools.count(1)

    def register_producer(self, pattern: str, handler, producer_id: str = ""):
        segs = _split(pattern)
        with self._reg_lock:
            for route in self._routes:
                if _patterns_overlap(segs, route.segments):
                    raise errors.OverlappingPattern(f"{pattern!r} overlaps {route.pattern!r}")
            self._routes.append(_Route(pattern, segs, producer_id or pattern, handler))

    def _match(self, path: str):
        segs = _split(path)
        for route in self._routes:
            if len(route.segments) != len(segs):
                continue
            params = {}
            for pat, seg in zip(route.segments, segs):
                if pat.startswith("{") and pat.endswith("}"):
                    params[pat[1:-1]] = seg
                elif pat != seg:
                    break
            else:
                return route, params
        return None, None

    def route(self, env: ServiceEnvelope) -> ServiceEnvelope:
        if not env.correlation_id:
            env.correlation_id = f"c-{next(self._corr)}"
        route, params = self._match(env.resource_path)
        if route is None:
            return self._error(env, 404, f"no route for {env.resource_path}")
        try:
            body = route.handler(env, params)
        except errors.TwinError as exc:
            return self._error(env, 422, f"{type(exc).__name__}: {exc}", route.producer_id)
        except Exception as exc:  # producer bug: isolate, keep serving
            traceback.format_exc()
            return self._error(env, 500, f"ProducerFailure: {type(exc).__name__}: {exc}",
                               route.producer_id)
        return ServiceEnvelope(
            method=env.method, resource_path=env.resource_path, body=body,
            correlation_id=env.correlation_id, consumer_id=env.consumer_id,
            producer_id=route.producer_id, status="ok", query=env.query,
        )

    def _error(self, env, code, message, producer_id=""):
        return ServiceEnvelope(
            method=env.method, resource_path=env.resource_path, body=None,
            correlation_id=env.correlation_id, consumer_id=env.consumer_id,
            producer_id=producer_id, status="error",
            error_code=code, error_message=message, query=env.query,
        )

    def request(self, method: str, path: str, body=None, query: dict | None = None,
                consumer_id: str = "") -> ServiceEnvelope:
        """Convenience wrapper building an envelope and routing it."""
        return self.route(ServiceEnvelope(
            method=method, resource_path=path, body=body,
            query=query or {}, consumer_id=consumer_id,
        ))
