"""HTTP/1.1 surface for the service bus. Bodies are UTF-8 JSON documents."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qsl, urlsplit

from . import errors
from .bus import ServiceBus


class _Handler(BaseHTTPRequestHandler):
    bus: ServiceBus = None
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _dispatch(self, method):
        parts = urlsplit(self.path)
        query = dict(parse_qsl(parts.query))
        body = None
        length = int(self.headers.get("Content-Length") or 0)
        if length:
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw.decode("utf-8"))
            except ValueError:
                self._reply(400, {"status": "error", "error": "invalid JSON body"})
                return
        env = self.bus.request(method, parts.path, body=body, query=query,
                               consumer_id=self.client_address[0])
        if env.status == "ok":
            self._reply(200, {"status": "ok", "correlation_id": env.correlation_id,
                              "body": env.body})
        else:
            self._reply(env.error_code or 500,
                        {"status": "error", "correlation_id": env.correlation_id,
                         "error_code": env.error_code, "error": env.error_message})

    def _reply(self, code, doc):
        payload = json.dumps(doc).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_HEAD(self):
        self._reply(200, {"status": "ok"})


class HttpGateway:
    """Threaded HTTP front for a ServiceBus."""

    def __init__(self, bus: ServiceBus, host: str = "127.0.0.1", port: int = 8099):
        handler = type("BoundHandler", (_Handler,), {"bus": bus})
        try:
            self._server = ThreadingHTTPServer((host, port), handler)
        except OSError as exc:
            if exc.errno in (48, 98):
                raise errors.PortInUse(f"{host}:{port}") from exc
            raise
        self._thread = None
        self.host, self.port = self._server.server_address[:2]

    def start(self):
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
