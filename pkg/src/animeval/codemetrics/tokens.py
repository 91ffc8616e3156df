"""Lexing of Python source into classified tokens.

Tokens carry a surface text and a coarse class; n-gram matching compares the
text and keyword weighting inspects the class.  Lexing is deterministic and
never raises on malformed input: when the stdlib tokenizer fails, the code is
split on whitespace/punctuation and every piece is classed ``other``.
"""

from __future__ import annotations

import io
import keyword
import re
import tokenize as _std_tokenize
from dataclasses import dataclass

KIND_KEYWORD = "keyword"
KIND_IDENTIFIER = "identifier"
KIND_NUMBER = "number"
KIND_STRING = "string"
KIND_OPERATOR = "operator"
KIND_PUNCTUATION = "punctuation"
KIND_OTHER = "other"

_PUNCTUATION = set("()[]{},:;.")
_FALLBACK_RE = re.compile(r"\w+|[^\w\s]")

# Token types that carry no surface content useful for n-gram comparison.
_SKIP_TYPES = {
    _std_tokenize.NEWLINE,
    _std_tokenize.NL,
    _std_tokenize.INDENT,
    _std_tokenize.DEDENT,
    _std_tokenize.ENDMARKER,
    _std_tokenize.ENCODING,
    _std_tokenize.COMMENT,
}


@dataclass(frozen=True)
class Token:
    text: str
    kind: str


def _classify(tok_type: int, text: str) -> str:
    if tok_type == _std_tokenize.NAME:
        return KIND_KEYWORD if keyword.iskeyword(text) else KIND_IDENTIFIER
    if tok_type == _std_tokenize.NUMBER:
        return KIND_NUMBER
    if tok_type == _std_tokenize.STRING:
        return KIND_STRING
    if tok_type == _std_tokenize.OP:
        return KIND_PUNCTUATION if text in _PUNCTUATION else KIND_OPERATOR
    # FSTRING_* types (3.12+), ERRORTOKEN, and anything else.
    fstring_start = getattr(_std_tokenize, "FSTRING_START", None)
    fstring_middle = getattr(_std_tokenize, "FSTRING_MIDDLE", None)
    fstring_end = getattr(_std_tokenize, "FSTRING_END", None)
    if tok_type in (fstring_start, fstring_middle, fstring_end):
        return KIND_STRING
    return KIND_OTHER


def _fallback_tokens(code: str) -> tuple[Token, ...]:
    return tuple(Token(m.group(0), KIND_OTHER) for m in _FALLBACK_RE.finditer(code))


def tokenize_code(code: str) -> tuple[Token, ...]:
    """Lex ``code`` into an ordered tuple of classified tokens.

    Comments, encoding markers, and pure layout tokens (newline/indent/dedent)
    are dropped.  On any lexing failure the whitespace/punctuation fallback is
    used instead, so the result is always defined.
    """
    try:
        raw = list(_std_tokenize.generate_tokens(io.StringIO(code).readline))
    except (_std_tokenize.TokenError, IndentationError, SyntaxError, ValueError):
        return _fallback_tokens(code)
    out: list[Token] = []
    for tok in raw:
        if tok.type in _SKIP_TYPES or not tok.string.strip():
            continue
        out.append(Token(tok.string, _classify(tok.type, tok.string)))
    return tuple(out)
