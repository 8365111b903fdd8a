"""Minimal HTTP server speaking the remote classification protocol.

Useful for wiring tests and demos without a real model server:

    python -m emoflow.stub_server --port 8765 --probs '{"joy": 0.9, "sadness": 0.1}'
"""
from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Mapping

Responder = Callable[[str], Mapping[str, float]]


def _handler(responder: Responder, log: list | None):
    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            if self.path.rstrip("/") != "/classify":
                self._send(404, {"error": "not found"})
                return
            try:
                body = json.loads(self.rfile.read(int(self.headers.get("Content-Length", 0))))
                text = body["text"]
            except (ValueError, KeyError, TypeError):
                self._send(400, {"error": "expected {\"text\": ...}"})
                return
            if log is not None:
                log.append(text)
            self._send(200, {"probs": dict(responder(text))})

        def _send(self, status, payload):
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    return Handler


class StubServer:
    """Serve ``responder(text)`` as the probability map on a background thread.

    Pass a mapping instead of a callable to return a fixed distribution.
    """

    def __init__(self, responder: Responder | Mapping[str, float], host: str = "127.0.0.1", port: int = 0):
        if not callable(responder):
            fixed = dict(responder)
            responder = lambda _text: fixed  # noqa: E731
        self.requests: list[str] = []
        self._server = ThreadingHTTPServer((host, port), _handler(responder, self.requests))
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "StubServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "StubServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8765)
    ap.add_argument("--probs", required=True, help="JSON object mapping label to probability")
    args = ap.parse_args(argv)
    server = StubServer(json.loads(args.probs), args.host, args.port)
    print(f"serving on {server.endpoint}/classify", flush=True)
    try:
        server._server.serve_forever()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
