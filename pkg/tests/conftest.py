"""Shared fixtures: stub renderer, fixture videos, endpoint server, KB paths."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

from animeval.embeddings import HashedTokenEmbedder, PixelGridEmbedder
from animeval.renderer import ManimRenderer, RendererConfig
from animeval.rewardcore import RewardEngine

from helpers import StubEndpoint, moving_dot_frames, solid_frame, write_video

FIXTURES = Path(__file__).parent / "fixtures"
FAKE_MANIM = FIXTURES / "fake_manim.py"
FAKE_DECODER = FIXTURES / "fake_decoder.py"
KB_SRC = FIXTURES / "kb_src"

VALID_SCENE = """\
from manim import *

class BlueCircle(Scene):
    def construct(self):
        circle = Circle(color=BLUE)
        self.play(Create(circle))
        self.wait(1)
"""

VALID_SCENE_SQUARE = """\
from manim import *

class RedSquare(Scene):
    def construct(self):
        square = Square(color=RED)
        self.play(FadeIn(square))
        self.play(square.animate.shift(RIGHT))
"""

BROKEN_SCENE_NAME_ERROR = """\
from manim import *

class Broken(Scene):
    def construct(self):
        shape = Circl(color=BLUE)
        self.play(Create(shape))
"""

BROKEN_SCENE_RUNTIME = """\
from manim import *

class Crashes(Scene):
    def construct(self):
        self.play(Create(Circle()))
        raise RuntimeError("boom during construct")
"""


def stub_renderer_config() -> RendererConfig:
    return RendererConfig(executable=(sys.executable, str(FAKE_MANIM)))


@pytest.fixture()
def stub_renderer(tmp_path) -> ManimRenderer:
    return ManimRenderer(
        stub_renderer_config(), cache_dir=tmp_path / "render-cache", timeout=60.0
    )


@pytest.fixture(scope="session")
def shared_renderer(tmp_path_factory) -> ManimRenderer:
    """Session-wide stub renderer so repeated fixture renders hit the cache."""
    cache = tmp_path_factory.mktemp("render-cache")
    return ManimRenderer(stub_renderer_config(), cache_dir=cache, timeout=60.0)


@pytest.fixture()
def offline_engine() -> RewardEngine:
    return RewardEngine(HashedTokenEmbedder(), PixelGridEmbedder())


@pytest.fixture(scope="session")
def fixture_videos(tmp_path_factory) -> dict[str, Path]:
    """Deterministic mp4s: two distinct clips plus a same-content re-encode."""
    root = tmp_path_factory.mktemp("videos")
    dots = moving_dot_frames(12)
    blocks = [solid_frame((200, 30, 30))] * 6 + [solid_frame((30, 200, 30))] * 6
    return {
        "dots": write_video(root / "dots.mp4", dots),
        "dots_copy": write_video(root / "dots_copy.mp4", dots),
        "blocks": write_video(root / "blocks.mp4", blocks),
    }


@pytest.fixture()
def endpoint_server():
    server = StubEndpoint()
    yield server
    server.close()
