"""Shared test fixtures: a scriptable HTTP fixture server for backend tests."""
from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class FixtureServer:
    """Tiny scriptable HTTP server.

    The script is a callable (path, payload) -> action tuple:
        ("json", obj)            200 with a JSON body
        ("status", code, text)   arbitrary status with a plain body
        ("raw", text)            200 with a non-JSON body
        ("sleep", seconds, obj)  delay, then 200 JSON
        ("drop",)                close the connection without responding
    Every request is recorded in ``calls``.
    """

    def __init__(self):
        self.calls: list[tuple[str, dict | None]] = []
        self.script = lambda path, payload: ("json", {})
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length) if length else b""
                try:
                    payload = json.loads(raw) if raw else None
                except ValueError:
                    payload = None
                outer.calls.append((self.path, payload))
                action = outer.script(self.path, payload)
                kind = action[0]
                if kind == "drop":
                    self.connection.close()
                    return
                if kind == "sleep":
                    time.sleep(action[1])
                    self._send_json(200, action[2])
                    return
                if kind == "json":
                    self._send_json(200, action[1])
                    return
                if kind == "raw":
                    body = action[1].encode("utf-8")
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                if kind == "status":
                    body = action[2].encode("utf-8")
                    self.send_response(action[1])
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                raise AssertionError(f"unknown fixture action {kind!r}")

            def _send_json(self, code: int, obj) -> None:
                body = json.dumps(obj).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        class QuietServer(ThreadingHTTPServer):
            def handle_error(self, request, client_address):
                pass  # dropped connections are intentional in these tests

        self._httpd = QuietServer(("127.0.0.1", 0), Handler)
        self._httpd.daemon_threads = True
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        self.url = f"http://127.0.0.1:{self._httpd.server_address[1]}"

    def close(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()


@pytest.fixture
def fixture_server():
    server = FixtureServer()
    yield server
    server.close()
