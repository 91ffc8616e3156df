"""Syntax trees and tree-based comparison metrics.

``parse_syntax`` parses Python source into a light-weight kind-labelled tree.
Parsing is error-tolerant: statements that fail to parse become ``error`` nodes
and a catastrophic failure yields a single-root ``error`` tree, so downstream
scores degrade instead of aborting.

``syntax_match`` is the fraction of reference subtrees that occur in the
generated tree; ``ast_distance`` is the ordered tree edit distance
(Zhang–Shasha, unit costs) normalized by the node-count sum.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from typing import Iterator

ERROR_KIND = "error"
ROOT_KIND = "Module"


@dataclass(frozen=True)
class SyntaxNode:
    """A node in a kind-labelled ordered tree.

    ``text`` carries the surface content of leaf-like nodes (names, constants)
    and is ignored by every comparison metric, which look at kinds only.
    """

    kind: str
    children: tuple["SyntaxNode", ...] = ()
    text: str | None = None


def iter_nodes(tree: SyntaxNode) -> Iterator[SyntaxNode]:
    """Yield every node of ``tree`` in preorder."""
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def node_count(tree: SyntaxNode) -> int:
    return sum(1 for _ in iter_nodes(tree))


def _from_ast(node: ast.AST) -> SyntaxNode:
    text = None
    if isinstance(node, ast.Name):
        text = node.id
    elif isinstance(node, ast.Constant):
        text = repr(node.value)
    elif isinstance(node, ast.arg):
        text = node.arg
    elif isinstance(node, (ast.Attribute, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        text = getattr(node, "attr", None) or getattr(node, "name", None)
    children = tuple(_from_ast(child) for child in ast.iter_child_nodes(node))
    return SyntaxNode(kind=type(node).__name__, children=children, text=text)


def _recover(code: str) -> SyntaxNode:
    """Line-based salvage parse: greedily parse maximal chunks, wrap the rest."""
    lines = code.splitlines()
    statements: list[SyntaxNode] = []
    i = 0
    while i < len(lines):
        parsed_until = None
        for j in range(len(lines), i, -1):
            chunk = "\n".join(lines[i:j])
            try:
                module = ast.parse(chunk)
            except SyntaxError:
                continue
            except (RecursionError, MemoryError, ValueError):
                break
            parsed_until = j
            statements.extend(_from_ast(module).children)
            break
        if parsed_until is None:
            if lines[i].strip():
                statements.append(SyntaxNode(ERROR_KIND, text=lines[i]))
            i += 1
        else:
            i = parsed_until
    return SyntaxNode(ROOT_KIND, children=tuple(statements))


def parse_syntax(code: str) -> SyntaxNode:
    """Parse Python source into a :class:`SyntaxNode` tree, never raising."""
    try:
        return _from_ast(ast.parse(code))
    except SyntaxError:
        pass
    except Exception:
        return SyntaxNode(ERROR_KIND)
    try:
        return _recover(code)
    except Exception:
        return SyntaxNode(ERROR_KIND)


def _shape_keys(tree: SyntaxNode) -> list[tuple]:
    """Structural key (kind labels, full descendant shape) of every subtree."""
    keys: list[tuple] = []

    def visit(node: SyntaxNode) -> tuple:
        key = (node.kind, tuple(visit(child) for child in node.children))
        keys.append(key)
        return key

    visit(tree)
    return keys


def syntax_match(gen: SyntaxNode, ref: SyntaxNode) -> float:
    """Fraction of reference subtrees that occur somewhere in the generated tree.

    Every reference node contributes one subtree (the node with its full
    descendant structure); occurrence means exact shape equality on kind
    labels.  A single-node reference tree degenerates to a kind-presence test.
    """
    if not ref.children:
        present = any(node.kind == ref.kind for node in iter_nodes(gen))
        return 1.0 if present else 0.0
    gen_shapes = set(_shape_keys(gen))
    ref_keys = _shape_keys(ref)
    matched = sum(1 for key in ref_keys if key in gen_shapes)
    return matched / len(ref_keys)


def _postorder(tree: SyntaxNode) -> list[SyntaxNode]:
    out: list[SyntaxNode] = []

    def visit(node: SyntaxNode) -> None:
        for child in node.children:
            visit(child)
        out.append(node)

    visit(tree)
    return out


def _leftmost_leaves(nodes: list[SyntaxNode]) -> list[int]:
    """For each postorder index, the postorder index of its leftmost leaf."""
    index_of = {id(node): i for i, node in enumerate(nodes)}
    lml = [0] * len(nodes)
    for i, node in enumerate(nodes):
        current = node
        while current.children:
            current = current.children[0]
        lml[i] = index_of[id(current)]
    return lml


def _keyroots(lml: list[int]) -> list[int]:
    """Highest postorder index per distinct leftmost-leaf value, ascending."""
    seen: dict[int, int] = {}
    for i, leaf in enumerate(lml):
        seen[leaf] = i
    return sorted(seen.values())


def tree_edit_distance(a: SyntaxNode, b: SyntaxNode) -> int:
    """Ordered tree edit distance with unit insert/delete/relabel costs.

    Classic Zhang–Shasha dynamic program over keyroot pairs; relabel costs 1
    when node kinds differ and 0 otherwise.
    """
    nodes_a = _postorder(a)
    nodes_b = _postorder(b)
    la, lb = _leftmost_leaves(nodes_a), _leftmost_leaves(nodes_b)
    kinds_a = [node.kind for node in nodes_a]
    kinds_b = [node.kind for node in nodes_b]
    na, nb = len(nodes_a), len(nodes_b)
    treedist = [[0] * nb for _ in range(na)]

    for i in _keyroots(la):
        for j in _keyroots(lb):
            ioff = la[i] - 1
            joff = lb[j] - 1
            m = i - la[i] + 2
            n = j - lb[j] + 2
            fd = [[0] * n for _ in range(m)]
            for x in range(1, m):
                fd[x][0] = fd[x - 1][0] + 1
            for y in range(1, n):
                fd[0][y] = fd[0][y - 1] + 1
            for x in range(1, m):
                for y in range(1, n):
                    if la[x + ioff] == la[i] and lb[y + joff] == lb[j]:
                        relabel = 0 if kinds_a[x + ioff] == kinds_b[y + joff] else 1
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[x - 1][y - 1] + relabel,
                        )
                        treedist[x + ioff][y + joff] = fd[x][y]
                    else:
                        p = la[x + ioff] - 1 - ioff
                        q = lb[y + joff] - 1 - joff
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[p][q] + treedist[x + ioff][y + joff],
                        )
    return treedist[na - 1][nb - 1]


def ast_distance(gen: SyntaxNode, ref: SyntaxNode) -> float:
    """Tree edit distance normalized by the node-count sum; 0.0 iff identical shapes."""
    distance = tree_edit_distance(gen, ref)
    return distance / (node_count(gen) + node_count(ref))
