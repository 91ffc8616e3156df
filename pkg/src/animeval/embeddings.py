"""Embedding providers for code text and video frames.

HTTP providers speak a minimal JSON shape: ``{"input": [...]}`` (plus
``"kind": "image"`` for frames, which travel base64-PNG encoded) answered by
``{"data": [{"embedding": [...]}, ...]}`` in input order.  Offline providers
are fully deterministic and need no network: feature-hashed token counts for
code, hashed downsampled pixels for frames.
"""

from __future__ import annotations

import base64
import hashlib
from dataclasses import dataclass
from functools import lru_cache

import cv2
import numpy as np

from .codemetrics.tokens import tokenize_code
from .endpoint import EndpointConfig, post_json
from .errors import EndpointError


def _stable_bucket(label: str, dim: int) -> int:
    digest = hashlib.md5(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") % dim


@dataclass(frozen=True)
class HashedTokenEmbedder:
    """Offline code embedder: token counts feature-hashed to a fixed dimension.

    The final component is a constant bias so no input maps to the zero
    vector.  Identical sources always embed identically.
    """

    dim: int = 256

    def embed_texts(self, texts: list[str]) -> list[np.ndarray]:
        out = []
        for text in texts:
            vec = np.zeros(self.dim + 1, dtype=np.float64)
            for token in tokenize_code(text):
                vec[_stable_bucket(token.text, self.dim)] += 1.0
            vec[self.dim] = 1.0
            out.append(vec)
        return out


@lru_cache(maxsize=None)
def _pixel_buckets(count: int, dim: int) -> tuple[int, ...]:
    return tuple(_stable_bucket(f"pixel-{i}", dim) for i in range(count))


@dataclass(frozen=True)
class PixelGridEmbedder:
    """Offline frame embedder: downsampled pixels hashed to a fixed dimension.

    Frames are area-resampled to ``grid`` x ``grid`` RGB, and each pixel
    channel accumulates into an md5-chosen bucket.  A constant bias component
    keeps every embedding away from the zero vector.
    """

    grid: int = 8
    dim: int = 64

    def embed_images(self, frames: list[np.ndarray]) -> list[np.ndarray]:
        buckets = _pixel_buckets(self.grid * self.grid * 3, self.dim)
        out = []
        for frame in frames:
            small = cv2.resize(
                frame, (self.grid, self.grid), interpolation=cv2.INTER_AREA
            )
            flat = small.astype(np.float64).reshape(-1) / 255.0
            vec = np.zeros(self.dim + 1, dtype=np.float64)
            for index, value in enumerate(flat):
                vec[buckets[index]] += value
            vec[self.dim] = 1.0
            out.append(vec)
        return out


def _parse_embeddings(body: dict, expected: int, url: str) -> list[np.ndarray]:
    try:
        data = body["data"]
        vectors = [np.asarray(item["embedding"], dtype=np.float64) for item in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise EndpointError(f"malformed embedding response from {url}") from exc
    if len(vectors) != expected:
        raise EndpointError(
            f"embedding endpoint {url} returned {len(vectors)} vectors for {expected} inputs"
        )
    return vectors


@dataclass(frozen=True)
class HttpCodeEmbedder:
    """Code embedder backed by an HTTP endpoint."""

    config: EndpointConfig

    def embed_texts(self, texts: list[str]) -> list[np.ndarray]:
        body = post_json(self.config, {"input": list(texts)})
        return _parse_embeddings(body, len(texts), self.config.url)


@dataclass(frozen=True)
class HttpImageEmbedder:
    """Frame embedder backed by an HTTP endpoint; frames travel as base64 PNG."""

    config: EndpointConfig

    def embed_images(self, frames: list[np.ndarray]) -> list[np.ndarray]:
        encoded = []
        for frame in frames:
            ok, png = cv2.imencode(".png", cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
            if not ok:
                raise EndpointError("failed to PNG-encode a frame for embedding")
            encoded.append(base64.b64encode(png.tobytes()).decode("ascii"))
        body = post_json(self.config, {"input": encoded, "kind": "image"})
        return _parse_embeddings(body, len(frames), self.config.url)
