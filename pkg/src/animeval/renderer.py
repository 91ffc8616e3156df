"""Adapter around the Manim CLI (or any compatible renderer executable).

Each render writes the code to an isolated working directory, launches the
renderer as a child process in its own session, enforces a wall-clock timeout
by killing the whole process tree, and reports a compact outcome: status,
truncated error tail, and the produced video.  Bad user code is a ``fail``
outcome, never an exception.  A content-addressed cache keyed by code +
quality avoids re-rendering identical scenes.
"""

from __future__ import annotations

import ast
import hashlib
import os
import re
import shutil
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, replace
from pathlib import Path

from . import defaults
from .errors import ContractViolation, RendererUnavailable

STATUS_SUCCESS = "success"
STATUS_FAIL = "fail"
STATUS_TIMEOUT = "timeout"

_QUALITIES = ("low", "medium", "high")
_CLASS_RE = re.compile(r"^\s*class\s+(\w+)\s*\(([^)]*)\)", re.MULTILINE)


@dataclass(frozen=True)
class RendererConfig:
    """Child-process contract for the renderer executable."""

    executable: tuple[str, ...] = ("manim",)
    subcommand: tuple[str, ...] = ()
    quality_flags: tuple[tuple[str, tuple[str, ...]], ...] = (
        ("low", ("-ql",)),
        ("medium", ("-qm",)),
        ("high", ("-qh",)),
    )
    media_dir_flag: str = "--media_dir"
    extra_args: tuple[str, ...] = ("--disable_caching",)
    media_glob: str = "**/*.mp4"
    scene_file_name: str = "scene.py"

    def flags_for(self, quality: str) -> tuple[str, ...]:
        for name, flags in self.quality_flags:
            if name == quality:
                return flags
        raise ContractViolation(f"no quality flags configured for {quality!r}")


@dataclass(frozen=True)
class RenderRequest:
    """One isolated render job."""

    code: str
    workdir: Path
    scene_name: str | None = None
    quality: str = defaults.RENDER_QUALITY
    timeout: float = defaults.RENDER_TIMEOUT

    def __post_init__(self) -> None:
        if self.quality not in _QUALITIES:
            raise ContractViolation(f"quality must be one of {_QUALITIES}")
        if self.timeout <= 0:
            raise ContractViolation("timeout must be positive")


@dataclass(frozen=True)
class RenderOutcome:
    """Result of one render: status, error tail, video, timing."""

    status: str
    error_tail: str = ""
    video_path: Path | None = None
    wall_time: float = 0.0
    cached: bool = False

    def __post_init__(self) -> None:
        if self.status == STATUS_SUCCESS:
            if self.video_path is None or not Path(self.video_path).is_file():
                raise ContractViolation("success outcome requires an existing video file")
            if Path(self.video_path).stat().st_size == 0:
                raise ContractViolation("success outcome requires a non-empty video file")
            if self.error_tail:
                raise ContractViolation("error_tail must be empty on success")
        elif self.status in (STATUS_FAIL, STATUS_TIMEOUT):
            if self.video_path is not None:
                raise ContractViolation("only success outcomes carry a video path")
        else:
            raise ContractViolation(f"unknown render status: {self.status!r}")


def tail_lines(text: str, n: int = defaults.ERROR_TAIL_LINES) -> str:
    """The final min(n, total) lines of ``text`` in original order."""
    if n < 1:
        raise ContractViolation(f"n must be >= 1, got {n}")
    lines = text.splitlines()
    return "\n".join(lines[-n:])


def detect_scene(code: str) -> str | None:
    """Name of the first class inheriting from a ``*Scene`` base, if any."""
    try:
        tree = ast.parse(code)
    except SyntaxError:
        for match in _CLASS_RE.finditer(code):
            if re.search(r"\w*Scene\b", match.group(2)):
                return match.group(1)
        return None

    def base_name(node: ast.expr) -> str:
        if isinstance(node, ast.Name):
            return node.id
        if isinstance(node, ast.Attribute):
            return node.attr
        return ""

    classes = sorted(
        (node for node in ast.walk(tree) if isinstance(node, ast.ClassDef)),
        key=lambda node: (node.lineno, node.col_offset),
    )
    for node in classes:
        if any(base_name(base).endswith("Scene") for base in node.bases):
            return node.name
    return None


def _newest_video(media_dir: Path, pattern: str) -> Path | None:
    candidates = [
        p for p in media_dir.glob(pattern) if p.is_file() and p.stat().st_size > 0
    ]
    if not candidates:
        return None
    return max(candidates, key=lambda p: p.stat().st_mtime)


def render(request: RenderRequest, config: RendererConfig = RendererConfig()) -> RenderOutcome:
    """Run one render job and capture its outcome.

    The renderer executable missing entirely raises
    :class:`RendererUnavailable`; everything the user code does wrong comes
    back as a ``fail`` or ``timeout`` outcome with a 10-line error tail.
    """
    started = time.monotonic()
    scene = request.scene_name or detect_scene(request.code)
    if not scene:
        return RenderOutcome(
            status=STATUS_FAIL,
            error_tail="no Scene subclass found",
            wall_time=time.monotonic() - started,
        )
    workdir = Path(request.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    script_path = workdir / config.scene_file_name
    script_path.write_text(request.code, encoding="utf-8")
    media_dir = workdir / "media"
    media_dir.mkdir(exist_ok=True)
    argv = [
        *config.executable,
        *config.subcommand,
        *config.flags_for(request.quality),
        config.media_dir_flag,
        str(media_dir),
        *config.extra_args,
        str(script_path),
        scene,
    ]
    try:
        proc = subprocess.Popen(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            cwd=workdir,
            text=True,
            errors="replace",
            start_new_session=True,
        )
    except (FileNotFoundError, PermissionError) as exc:
        raise RendererUnavailable(f"cannot launch renderer {argv[0]!r}: {exc}") from exc
    try:
        output, _ = proc.communicate(timeout=request.timeout)
    except subprocess.TimeoutExpired:
        try:
            os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            proc.kill()
        output, _ = proc.communicate()
        return RenderOutcome(
            status=STATUS_TIMEOUT,
            error_tail=tail_lines(output or "", defaults.ERROR_TAIL_LINES),
            wall_time=time.monotonic() - started,
        )
    wall_time = time.monotonic() - started
    video = _newest_video(media_dir, config.media_glob)
    if proc.returncode == 0 and video is not None:
        return RenderOutcome(
            status=STATUS_SUCCESS, video_path=video, wall_time=wall_time
        )
    if proc.returncode == 0:
        output = (output or "") + "\nrenderer exited 0 but produced no video"
    return RenderOutcome(
        status=STATUS_FAIL,
        error_tail=tail_lines(output or "", defaults.ERROR_TAIL_LINES),
        wall_time=wall_time,
    )


class ManimRenderer:
    """Cached renderer front-end: one call per code string.

    Successful videos are copied into ``cache_dir`` under a hash of
    (quality, code) and reused on repeat renders; failures are not cached.
    Working directories are ephemeral, so no temporary files survive outside
    the cache.
    """

    def __init__(
        self,
        config: RendererConfig = RendererConfig(),
        *,
        cache_dir: str | Path | None = None,
        quality: str = defaults.RENDER_QUALITY,
        timeout: float = defaults.RENDER_TIMEOUT,
    ) -> None:
        self.config = config
        self.quality = quality
        self.timeout = timeout
        if cache_dir is None:
            self._owned_tmp = tempfile.TemporaryDirectory(prefix="animeval-cache-")
            cache_dir = self._owned_tmp.name
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def cache_key(self, code: str) -> str:
        digest = hashlib.sha256(f"{self.quality}\n{code}".encode("utf-8"))
        return digest.hexdigest()

    def render_code(
        self, code: str, scene_name: str | None = None, use_cache: bool = True
    ) -> RenderOutcome:
        target = self.cache_dir / f"{self.cache_key(code)}.mp4"
        if use_cache and target.is_file() and target.stat().st_size > 0:
            return RenderOutcome(
                status=STATUS_SUCCESS, video_path=target, wall_time=0.0, cached=True
            )
        with tempfile.TemporaryDirectory(prefix="animeval-work-") as tmp:
            request = RenderRequest(
                code=code,
                workdir=Path(tmp),
                scene_name=scene_name,
                quality=self.quality,
                timeout=self.timeout,
            )
            outcome = render(request, self.config)
            if outcome.status == STATUS_SUCCESS:
                shutil.copyfile(outcome.video_path, target)
                return replace(outcome, video_path=target)
        return outcome
