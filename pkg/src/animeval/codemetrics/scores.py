"""Combined code-similarity scores.

``codebleu`` mixes the n-gram, keyword-weighted n-gram, and syntax-match
components with configurable weights.  ``text_reward`` is the geometric mean
of that mix with an embedding cosine similarity.  ``ast_distance`` is carried
in the breakdown as a diagnostic only and never enters the reward.
"""

from __future__ import annotations

import math
from collections.abc import Sequence, Set
from dataclasses import dataclass

import numpy as np

from ..defaults import BLEU_MAX_N, CODEBLEU_WEIGHTS, KEYWORD_WEIGHT
from ..errors import ConfigurationError, ContractViolation
from .ngrams import ngram_match, weighted_ngram_match
from .tokens import tokenize_code
from .trees import ast_distance, parse_syntax, syntax_match


@dataclass(frozen=True)
class CodeScoreBreakdown:
    """All code-side component scores for one generated/reference pair."""

    ngram: float
    weighted_ngram: float
    syntax_match: float
    codebleu: float
    ast_distance: float
    codebert_sim: float
    text_reward: float


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ContractViolation(f"{name} must lie in [0, 1], got {value}")


def codebleu(
    ngram: float,
    weighted_ngram: float,
    syntax: float,
    weights: Sequence[float] = CODEBLEU_WEIGHTS,
) -> float:
    """Weighted sum of the three code components; weights must sum to 1."""
    if len(weights) != 3:
        raise ConfigurationError(f"codebleu expects 3 weights, got {len(weights)}")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ConfigurationError(f"codebleu weights must sum to 1, got {sum(weights)}")
    for name, value in (("ngram", ngram), ("weighted_ngram", weighted_ngram), ("syntax", syntax)):
        _check_unit(name, value)
    return weights[0] * ngram + weights[1] * weighted_ngram + weights[2] * syntax


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine of two vectors clamped below at 0 (the reward needs non-negativity)."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ContractViolation("cosine_similarity expects two equal-length 1-D vectors")
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        raise ContractViolation("cosine_similarity is undefined for zero vectors")
    if np.array_equal(a, b):
        return 1.0
    value = float(np.dot(a, b)) / norm
    return min(1.0, max(0.0, value))


def codebert_similarity(gen: str, ref: str, embedder) -> float:
    """Clamped cosine similarity of the two code embeddings.

    ``embedder`` is any provider with ``embed_texts(list[str]) -> list[vector]``;
    identical inputs score 1.0 for any deterministic provider.
    """
    vectors = embedder.embed_texts([gen, ref])
    return cosine_similarity(vectors[0], vectors[1])


def text_reward(cbleu: float, cbert: float) -> float:
    """Geometric mean sqrt(cbleu * cbert); monotone in each argument."""
    _check_unit("cbleu", cbleu)
    _check_unit("cbert", cbert)
    return math.sqrt(cbleu * cbert)


def score_code_pair(
    gen_code: str,
    ref_code: str,
    embedder,
    *,
    max_n: int = BLEU_MAX_N,
    keyword_weight: float = KEYWORD_WEIGHT,
    weights: Sequence[float] = CODEBLEU_WEIGHTS,
    extra_keywords: Set[str] = frozenset(),
) -> CodeScoreBreakdown:
    """Compute the full code-side breakdown for one pair of sources."""
    gen_tokens = tokenize_code(gen_code)
    ref_tokens = tokenize_code(ref_code)
    gen_tree = parse_syntax(gen_code)
    ref_tree = parse_syntax(ref_code)

    ngram = ngram_match(gen_tokens, ref_tokens, max_n)
    weighted = weighted_ngram_match(
        gen_tokens, ref_tokens, max_n, keyword_weight, extra_keywords
    )
    syntax = syntax_match(gen_tree, ref_tree)
    cbleu = codebleu(ngram, weighted, syntax, weights)
    cbert = codebert_similarity(gen_code, ref_code, embedder)
    return CodeScoreBreakdown(
        ngram=ngram,
        weighted_ngram=weighted,
        syntax_match=syntax,
        codebleu=cbleu,
        ast_distance=ast_distance(gen_tree, ref_tree),
        codebert_sim=cbert,
        text_reward=text_reward(cbleu, cbert),
    )
