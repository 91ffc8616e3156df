"""Shared test doubles: scripted chat client, local HTTP endpoint, video writer."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import cv2
import numpy as np


class ScriptedChat:
    """Chat double that replays queued responses and records every prompt."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls: list[list] = []

    def generate(self, messages):
        self.calls.append(list(messages))
        if not self.responses:
            raise AssertionError("scripted chat ran out of responses")
        response = self.responses.pop(0)
        if isinstance(response, Exception):
            raise response
        return response


class CountingRenderer:
    """Wraps a renderer, counting render_code invocations."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def render_code(self, code, scene_name=None, use_cache=True):
        self.calls += 1
        return self.inner.render_code(code, scene_name=scene_name, use_cache=use_cache)


class StubEndpoint:
    """Local HTTP server with scripted responses; records request payloads."""

    def __init__(self):
        self.requests: list[dict] = []
        self.responses: list[tuple[int, object]] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                try:
                    payload = json.loads(raw)
                except ValueError:
                    payload = raw.decode(errors="replace")
                stub.requests.append(
                    {
                        "path": self.path,
                        "payload": payload,
                        "authorization": self.headers.get("Authorization"),
                    }
                )
                status, body = (
                    stub.responses.pop(0) if stub.responses else (200, {"ok": True})
                )
                data = (
                    body.encode() if isinstance(body, str) else json.dumps(body).encode()
                )
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, fmt, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.server.server_address[1]}/v1"

    def queue(self, status: int, body) -> None:
        self.responses.append((status, body))

    def close(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)


def solid_frame(bgr, width=64, height=48) -> np.ndarray:
    return np.full((height, width, 3), bgr, dtype=np.uint8)


def moving_dot_frames(n, width=64, height=48, color=(255, 255, 255)) -> list[np.ndarray]:
    frames = []
    for i in range(n):
        frame = np.zeros((height, width, 3), dtype=np.uint8)
        x = int((i + 0.5) / n * (width - 1))
        cv2.circle(frame, (x, height // 2), height // 5, color, thickness=-1)
        frames.append(frame)
    return frames


def write_video(path: Path, frames_bgr: list[np.ndarray], fps: float = 10.0) -> Path:
    """Write BGR frames to an mp4; raises if the writer is unavailable."""
    height, width = frames_bgr[0].shape[:2]
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"mp4v"), fps, (width, height)
    )
    assert writer.isOpened(), f"cannot open video writer for {path}"
    for frame in frames_bgr:
        writer.write(frame)
    writer.release()
    assert path.is_file() and path.stat().st_size > 0
    return path
