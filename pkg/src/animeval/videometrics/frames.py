"""Video decoding and fixed-rate frame sampling.

Two decoder adapters are provided: an in-process OpenCV decoder (default, no
external tools needed) and a pipe decoder that launches an external executable
(e.g. ffmpeg) emitting raw RGB24 frames on stdout at the requested rate.  Both
yield RGB frames already sampled at the target fps; grayscale frames are
derived by standard luma weighting.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import cv2
import numpy as np

from ..defaults import SAMPLE_FPS
from ..errors import ContractViolation, MediaError

# ffmpeg invocation emitting raw sampled frames on stdout.
FFMPEG_PIPE_ARGV = (
    "ffmpeg",
    "-v", "error",
    "-i", "{path}",
    "-vf", "fps={fps},scale={width}:{height}",
    "-f", "rawvideo",
    "-pix_fmt", "rgb24",
    "pipe:1",
)


@dataclass
class FrameSequence:
    """Frames sampled from one video at a fixed rate."""

    rgb: list[np.ndarray]
    gray: list[np.ndarray]
    timestamps: tuple[float, ...]
    sample_fps: float
    source_duration: float

    def __post_init__(self) -> None:
        if not (len(self.rgb) == len(self.gray) == len(self.timestamps) >= 1):
            raise ContractViolation("frame, gray, and timestamp counts must match and be >= 1")
        if self.sample_fps <= 0:
            raise ContractViolation("sample_fps must be positive")
        if any(b <= a for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise ContractViolation("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.rgb)

    @classmethod
    def from_rgb(
        cls, frames: list[np.ndarray], fps: float, duration: float
    ) -> "FrameSequence":
        if fps <= 0:
            raise ContractViolation(f"fps must be positive, got {fps}")
        gray = [cv2.cvtColor(frame, cv2.COLOR_RGB2GRAY) for frame in frames]
        timestamps = tuple(k / fps for k in range(len(frames)))
        return cls(
            rgb=frames,
            gray=gray,
            timestamps=timestamps,
            sample_fps=fps,
            source_duration=duration,
        )


class FrameDecoder(Protocol):
    def decode(self, path: Path, fps: float) -> tuple[list[np.ndarray], float]:
        """Return (RGB frames sampled at ``fps``, source duration in seconds)."""
        ...


class OpenCVDecoder:
    """In-process decoder: reads the source sequentially and picks frames."""

    def decode(self, path: Path, fps: float) -> tuple[list[np.ndarray], float]:
        capture = cv2.VideoCapture(str(path))
        try:
            if not capture.isOpened():
                raise MediaError(f"cannot open video: {path}")
            src_fps = capture.get(cv2.CAP_PROP_FPS)
            if not src_fps or src_fps <= 0:
                src_fps = 30.0
            frames: list[np.ndarray] = []
            while True:
                ok, frame = capture.read()
                if not ok:
                    break
                frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
        finally:
            capture.release()
        if not frames:
            raise MediaError(f"no decodable frames in: {path}")
        duration = len(frames) / src_fps
        count = max(1, int(duration * fps + 1e-9))
        sampled = []
        for k in range(count):
            index = min(int(round(k / fps * src_fps)), len(frames) - 1)
            sampled.append(frames[index])
        return sampled, duration


@dataclass
class PipeDecoder:
    """Decoder launching an external executable that pipes raw RGB24 frames.

    The argv template may use ``{path}``, ``{fps}``, ``{width}``, and
    ``{height}`` placeholders; the executable must emit exactly
    width*height*3 bytes per frame on stdout, sampled at the requested rate.
    """

    argv: tuple[str, ...] = FFMPEG_PIPE_ARGV
    width: int = 480
    height: int = 270
    timeout: float = 120.0

    def decode(self, path: Path, fps: float) -> tuple[list[np.ndarray], float]:
        argv = [
            part.format(path=str(path), fps=fps, width=self.width, height=self.height)
            for part in self.argv
        ]
        try:
            proc = subprocess.run(
                argv,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                timeout=self.timeout,
            )
        except FileNotFoundError as exc:
            raise MediaError(f"decoder executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise MediaError(f"decoder timed out after {self.timeout}s: {path}") from exc
        if proc.returncode != 0:
            detail = proc.stderr.decode(errors="replace").strip()
            raise MediaError(f"decoder failed on {path}: {detail}")
        frame_bytes = self.width * self.height * 3
        payload = proc.stdout
        count = len(payload) // frame_bytes
        if count < 1:
            raise MediaError(f"decoder produced no frames for: {path}")
        frames = [
            np.frombuffer(
                payload[k * frame_bytes : (k + 1) * frame_bytes], dtype=np.uint8
            ).reshape(self.height, self.width, 3)
            for k in range(count)
        ]
        return frames, count / fps


def sample_frames(
    video_path: str | Path,
    fps: float = SAMPLE_FPS,
    decoder: FrameDecoder | None = None,
) -> FrameSequence:
    """Sample ``video_path`` at fixed intervals 1/fps starting from t=0.

    Clips shorter than one interval still yield a single frame.  Undecodable
    input raises :class:`MediaError` with the decoder's diagnostics.
    """
    if fps <= 0:
        raise ContractViolation(f"fps must be positive, got {fps}")
    path = Path(video_path)
    if not path.is_file():
        raise MediaError(f"video file does not exist: {path}")
    if decoder is None:
        decoder = OpenCVDecoder()
    frames, duration = decoder.decode(path, fps)
    return FrameSequence.from_rgb(frames, fps, duration)
