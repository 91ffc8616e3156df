"""Manim API knowledge base: signatures and parameter docs from source files.

``build_kb`` walks a library source tree, keeps every public class, function,
and method that carries a documentation comment, and stores the signature plus
the parameter-description section (numpydoc heading convention).  Example
sections are stripped entirely — retrieval feeds prompts, and examples blow up
the context without adding parameter facts.  ``extract_api_calls`` +
``retrieve_docs`` turn a failing script into a budgeted documentation bundle.
"""

from __future__ import annotations

import ast
import hashlib
import json
import logging
import re
from dataclasses import asdict, dataclass
from pathlib import Path

from .defaults import DOC_BUDGET
from .errors import ConfigurationError, ContractViolation, EnvironmentFailure

logger = logging.getLogger(__name__)

KB_FORMAT_VERSION = 1
_ENTRY_SEPARATOR = "\n---\n"
_IDENT_RE = re.compile(r"[A-Za-z_]\w*")

KIND_CLASS = "class"
KIND_FUNCTION = "function"
KIND_METHOD = "method"

# numpydoc-style section headings; everything except Parameters is dropped.
_KEPT_SECTIONS = {"parameters", "other parameters"}


@dataclass(frozen=True)
class ApiEntry:
    """One documented API symbol."""

    name: str
    qualified_name: str
    kind: str
    signature: str
    param_docs: str
    source_path: str


@dataclass(frozen=True)
class DocBundle:
    """Budgeted retrieval result: whole entries only, in request order."""

    entries: tuple[ApiEntry, ...]
    rendered: str
    budget: int
    truncated: bool


class KnowledgeBase:
    """Immutable index of API entries, iterable in qualified-name order."""

    def __init__(self, entries: list[ApiEntry], source_hash: str = "") -> None:
        self.entries: tuple[ApiEntry, ...] = tuple(
            sorted(entries, key=lambda e: e.qualified_name)
        )
        self.source_hash = source_hash
        index: dict[str, list[ApiEntry]] = {}
        for entry in self.entries:
            index.setdefault(entry.name, []).append(entry)
        self.name_index: dict[str, tuple[ApiEntry, ...]] = {
            name: tuple(group) for name, group in index.items()
        }

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, name: str) -> tuple[ApiEntry, ...]:
        return self.name_index.get(name, ())

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": KB_FORMAT_VERSION,
                "source_hash": self.source_hash,
                "entries": [asdict(entry) for entry in self.entries],
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "KnowledgeBase":
        try:
            doc = json.loads(text)
        except ValueError as exc:
            raise ConfigurationError(f"knowledge base file is not valid JSON: {exc}") from exc
        if doc.get("version") != KB_FORMAT_VERSION:
            raise ConfigurationError(
                f"unsupported knowledge base format version: {doc.get('version')!r}"
            )
        entries = [ApiEntry(**item) for item in doc.get("entries", [])]
        return cls(entries, source_hash=doc.get("source_hash", ""))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeBase":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _is_heading_underline(line: str) -> bool:
    stripped = line.strip()
    return bool(stripped) and set(stripped) == {"-"}


def extract_param_docs(docstring: str) -> str:
    """Keep only the parameter sections of a numpydoc-style docstring.

    A section starts at a heading line underlined with dashes and runs until
    the next heading.  Sections other than Parameters / Other Parameters —
    including Examples — are dropped, headings included.
    """
    lines = docstring.splitlines()
    kept: list[str] = []
    keeping = False
    i = 0
    while i < len(lines):
        line = lines[i]
        is_heading = i + 1 < len(lines) and _is_heading_underline(lines[i + 1])
        if is_heading:
            keeping = line.strip().lower() in _KEPT_SECTIONS
            if keeping:
                kept.append(line)
                kept.append(lines[i + 1])
            i += 2
            continue
        if keeping:
            kept.append(line)
        i += 1
    while kept and not kept[-1].strip():
        kept.pop()
    return "\n".join(kept)


def _signature_of(node: ast.AST, name: str) -> str:
    if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
        args = ast.unparse(node.args)
        returns = f" -> {ast.unparse(node.returns)}" if node.returns else ""
        return f"def {name}({args}){returns}"
    if isinstance(node, ast.ClassDef):
        bases = ", ".join(ast.unparse(base) for base in node.bases)
        return f"class {name}({bases})" if bases else f"class {name}"
    return name


def _entries_from_file(path: Path, module_name: str, rel_path: str) -> list[ApiEntry]:
    try:
        tree = ast.parse(path.read_text(encoding="utf-8", errors="replace"))
    except SyntaxError as exc:
        logger.warning("skipping unparsable source file %s: %s", path, exc)
        return []
    entries: list[ApiEntry] = []

    def consider(node: ast.AST, name: str, kind: str, qualified: str) -> None:
        if name.startswith("_"):
            return
        docstring = ast.get_docstring(node)
        if not docstring:
            return
        entries.append(
            ApiEntry(
                name=name,
                qualified_name=qualified,
                kind=kind,
                signature=_signature_of(node, name),
                param_docs=extract_param_docs(docstring),
                source_path=rel_path,
            )
        )

    for node in tree.body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            consider(node, node.name, KIND_FUNCTION, f"{module_name}.{node.name}")
        elif isinstance(node, ast.ClassDef):
            consider(node, node.name, KIND_CLASS, f"{module_name}.{node.name}")
            for child in node.body:
                if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                    consider(
                        child,
                        child.name,
                        KIND_METHOD,
                        f"{module_name}.{node.name}.{child.name}",
                    )
    return entries


def _hash_tree(files: list[tuple[str, Path]]) -> str:
    digest = hashlib.sha256()
    for rel, path in files:
        digest.update(rel.encode("utf-8"))
        digest.update(b"\0")
        digest.update(hashlib.sha256(path.read_bytes()).digest())
    return digest.hexdigest()


def _source_files(source_root: Path) -> list[tuple[str, Path]]:
    return sorted(
        (str(path.relative_to(source_root)), path)
        for path in source_root.rglob("*.py")
        if path.is_file()
    )


def hash_source_tree(source_root: str | Path) -> str:
    """Stable content hash of every .py file under ``source_root``."""
    return _hash_tree(_source_files(Path(source_root)))


def build_kb(source_root: str | Path) -> KnowledgeBase:
    """Ingest every parseable source file under ``source_root``.

    Unparsable files are skipped with a logged warning; an unreadable root is
    an environment error.
    """
    root = Path(source_root)
    if not root.is_dir():
        raise EnvironmentFailure(f"knowledge base source root is not a directory: {root}")
    files = _source_files(root)
    entries: list[ApiEntry] = []
    for rel, path in files:
        module_name = rel[: -len(".py")].replace("/", ".").replace("\\", ".")
        entries.extend(_entries_from_file(path, module_name, rel))
    return KnowledgeBase(entries, source_hash=_hash_tree(files))


def load_or_build_kb(source_root: str | Path, kb_path: str | Path) -> KnowledgeBase:
    """Load a serialized KB when its source hash still matches, else rebuild."""
    kb_file = Path(kb_path)
    if kb_file.is_file():
        try:
            kb = KnowledgeBase.load(kb_file)
        except ConfigurationError:
            kb = None
        if kb is not None and kb.source_hash == hash_source_tree(source_root):
            return kb
    kb = build_kb(source_root)
    kb_file.parent.mkdir(parents=True, exist_ok=True)
    kb.save(kb_file)
    return kb


class _CallVisitor(ast.NodeVisitor):
    def __init__(self) -> None:
        self.found: list[tuple[int, int, str]] = []

    def visit_Call(self, node: ast.Call) -> None:
        func = node.func
        if isinstance(func, ast.Name):
            self.found.append((func.lineno, func.col_offset, func.id))
        elif isinstance(func, ast.Attribute):
            self.found.append((func.lineno, func.col_offset, func.attr))
        self.generic_visit(node)

    def visit_Attribute(self, node: ast.Attribute) -> None:
        self.found.append((node.lineno, node.col_offset, node.attr))
        self.generic_visit(node)


def extract_api_calls(code: str, kb: KnowledgeBase) -> list[str]:
    """KB names used by ``code`` in call, constructor, or attribute position.

    First-appearance order, deduplicated.  Unparsable code falls back to a
    plain identifier scan intersected with KB names.
    """
    try:
        tree = ast.parse(code)
    except SyntaxError:
        names = [m.group(0) for m in _IDENT_RE.finditer(code)]
    else:
        visitor = _CallVisitor()
        visitor.visit(tree)
        names = [name for _, _, name in sorted(visitor.found)]
    seen: set[str] = set()
    ordered: list[str] = []
    for name in names:
        if name in kb.name_index and name not in seen:
            seen.add(name)
            ordered.append(name)
    return ordered


def render_entry(entry: ApiEntry) -> str:
    if entry.param_docs:
        return f"{entry.signature}\n{entry.param_docs}"
    return entry.signature


def retrieve_docs(
    names: list[str], kb: KnowledgeBase, budget: int = DOC_BUDGET
) -> DocBundle:
    """Pack whole doc entries for ``names`` in order until the budget is hit.

    Ambiguous short names contribute all their entries (qualified-name order).
    Packing stops at the first entry that would overflow the budget; nothing
    is ever split.
    """
    if budget <= 0:
        raise ContractViolation(f"budget must be positive, got {budget}")
    candidates = [entry for name in names for entry in kb.lookup(name)]
    packed: list[ApiEntry] = []
    rendered = ""
    truncated = False
    for entry in candidates:
        block = render_entry(entry)
        candidate = rendered + _ENTRY_SEPARATOR + block if rendered else block
        if len(candidate) > budget:
            truncated = True
            break
        rendered = candidate
        packed.append(entry)
    return DocBundle(
        entries=tuple(packed), rendered=rendered, budget=budget, truncated=truncated
    )
