"""Code-side comparison metrics: token n-grams, syntax trees, combined scores."""

from .tokens import Token, tokenize_code
from .ngrams import ngram_match, weighted_ngram_match
from .trees import (
    SyntaxNode,
    ast_distance,
    node_count,
    parse_syntax,
    syntax_match,
    tree_edit_distance,
)
from .scores import (
    CodeScoreBreakdown,
    codebleu,
    cosine_similarity,
    text_reward,
)

__all__ = [
    "Token",
    "tokenize_code",
    "ngram_match",
    "weighted_ngram_match",
    "SyntaxNode",
    "parse_syntax",
    "node_count",
    "syntax_match",
    "tree_edit_distance",
    "ast_distance",
    "CodeScoreBreakdown",
    "codebleu",
    "cosine_similarity",
    "text_reward",
]
