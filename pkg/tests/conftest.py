from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from octoscore.store import ExperimentStore

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def store(tmp_path) -> ExperimentStore:
    return ExperimentStore(tmp_path / "data")


class _FixtureHandler(BaseHTTPRequestHandler):
    page = (FIXTURES / "shop.html").read_bytes()

    def log_message(self, *args) -> None:  # keep pytest output clean
        pass

    def do_GET(self) -> None:
        if self.path == "/":
            self._send(200, self.page)
        elif self.path.startswith("/redirect/"):
            hops = int(self.path.rsplit("/", 1)[1])
            target = "/final" if hops <= 1 else f"/redirect/{hops - 1}"
            self.send_response(302)
            self.send_header("Location", target)
            self.end_headers()
        elif self.path == "/loop":
            self.send_response(302)
            self.send_header("Location", "/loop")
            self.end_headers()
        elif self.path == "/final":
            self._send(200, b"<html><body><p>final stop</p></body></html>")
        elif self.path == "/slow":
            time.sleep(0.8)
            self._send(200, b"<html><body><p>slow page</p></body></html>")
        elif self.path == "/big":
            self._send(200, b"<p>" + b"x" * 4096 + b"</p>")
        else:
            self._send(404, b"<html><body>not here</body></html>")

    def _send(self, status: int, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture(scope="session")
def http_fixture_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _FixtureHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in str(item.fspath):
        verdict = "PASS" if report.passed else "FAIL"
        print(f"[acceptance] {item.name}: {verdict}", flush=True)
