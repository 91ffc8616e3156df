"""BLEU-style n-gram precision matching over token sequences.

``ngram_match`` is the geometric mean of modified (clipped) n-gram precisions
with additive smoothing and a brevity penalty.  ``weighted_ngram_match`` is the
same computation with every n-gram containing at least one keyword token
counted at ``keyword_weight`` instead of 1.

Token sequences may contain :class:`~animeval.codemetrics.tokens.Token` objects
or plain strings; matching always compares surface text.
"""

from __future__ import annotations

import keyword as _keyword
import math
from collections import Counter
from collections.abc import Sequence, Set

from ..defaults import BLEU_MAX_N, KEYWORD_WEIGHT, NGRAM_FLOOR
from ..errors import ContractViolation
from .tokens import KIND_KEYWORD, Token


def _text(tok) -> str:
    return tok.text if isinstance(tok, Token) else str(tok)


def _is_keyword(tok, extra: Set[str]) -> bool:
    if isinstance(tok, Token):
        return tok.kind == KIND_KEYWORD or tok.text in extra
    text = str(tok)
    return _keyword.iskeyword(text) or text in extra


def _ngram_counts(texts: list[str], n: int) -> Counter:
    return Counter(tuple(texts[i : i + n]) for i in range(len(texts) - n + 1))


def _brevity_penalty(gen_len: int, ref_len: int) -> float:
    if gen_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / gen_len)


def _score(
    gen: Sequence,
    ref: Sequence,
    max_n: int,
    weight_of,
) -> float:
    """Shared core: ``weight_of`` maps an n-gram (tuple of texts) to its weight."""
    if max_n < 1:
        raise ContractViolation(f"max_n must be >= 1, got {max_n}")
    if not gen and not ref:
        return 1.0
    if not gen or not ref:
        return 0.0

    gen_texts = [_text(t) for t in gen]
    ref_texts = [_text(t) for t in ref]
    # Orders with no candidate n-grams on either side carry no signal; the
    # geometric mean runs over orders both sequences can populate, so identical
    # sequences score exactly 1 at any length.
    top = min(max_n, len(gen_texts), len(ref_texts))

    log_sum = 0.0
    for n in range(1, top + 1):
        gen_counts = _ngram_counts(gen_texts, n)
        ref_counts = _ngram_counts(ref_texts, n)
        numer = 0.0
        denom = 0.0
        for gram, count in gen_counts.items():
            w = weight_of(gram)
            denom += count * w
            matched = min(count, ref_counts.get(gram, 0))
            numer += matched * w
        precision = numer / denom if denom > 0 else 0.0
        if precision <= 0.0:
            precision = NGRAM_FLOOR
        log_sum += math.log(precision)

    score = math.exp(log_sum / top) * _brevity_penalty(len(gen_texts), len(ref_texts))
    return min(score, 1.0)


def ngram_match(gen: Sequence, ref: Sequence, max_n: int = BLEU_MAX_N) -> float:
    """Geometric mean of modified n-gram precisions of ``gen`` against ``ref``.

    Zero precisions are floored at a small epsilon and a brevity penalty
    ``exp(1 - |ref|/|gen|)`` applies when the generated sequence is shorter.
    Two empty sequences score 1.0; exactly one empty scores 0.0.
    """
    return _score(gen, ref, max_n, lambda gram: 1.0)


def weighted_ngram_match(
    gen: Sequence,
    ref: Sequence,
    max_n: int = BLEU_MAX_N,
    keyword_weight: float = KEYWORD_WEIGHT,
    extra_keywords: Set[str] = frozenset(),
) -> float:
    """Keyword-weighted variant of :func:`ngram_match`.

    An n-gram weighs ``keyword_weight`` when it contains at least one keyword
    token and 1 otherwise.  Keywords are the language's reserved words (or
    tokens lexed with the keyword class) plus any names in ``extra_keywords``.
    """
    if keyword_weight < 1.0:
        raise ContractViolation(f"keyword_weight must be >= 1, got {keyword_weight}")
    keyword_texts = {
        _text(t) for seq in (gen, ref) for t in seq if _is_keyword(t, extra_keywords)
    }
    weight_of = lambda gram: (
        keyword_weight if any(text in keyword_texts for text in gram) else 1.0
    )
    return _score(gen, ref, max_n, weight_of)
