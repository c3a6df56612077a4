"""Bracketed constituency trees: parsing, canonical serialization, span queries.

Trees are immutable after construction. Leaves are the preterminal nodes;
the surface tokens live in a parallel ``tokens`` list, one per leaf, in
left-to-right order.
"""

from __future__ import annotations

import re

__all__ = ["ConstTree", "TreeParseError", "parse_bracketed"]

_ATOM = re.compile(r"[^\s()]+")
_WS = re.compile(r"\s*")


class TreeParseError(ValueError):
    """Malformed bracketed-tree input. Carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ConstTree:
    """Rooted ordered labeled constituency tree over a token sequence.

    Node ids are dense integers. ``children[v]`` is the ordered tuple of
    child ids, empty for leaves. ``leaves[i]`` is the node id of the
    preterminal covering token ``i``; ``tokens[i]`` is the token itself.
    """

    __slots__ = ("labels", "parents", "children", "tokens", "leaves", "root",
                 "spans", "_leaf_index")

    def __init__(self, labels, parents, children, tokens, leaves, root):
        self.labels: tuple[str, ...] = tuple(labels)
        self.parents: tuple = tuple(parents)
        self.children: tuple[tuple[int, ...], ...] = tuple(tuple(c) for c in children)
        self.tokens: tuple[str, ...] = tuple(tokens)
        self.leaves: tuple[int, ...] = tuple(leaves)
        self.root: int = root
        self._leaf_index = {v: i for i, v in enumerate(self.leaves)}
        self.spans: tuple[tuple[int, int], ...] = self._compute_spans()

    def _compute_spans(self):
        spans: list = [None] * len(self.labels)
        for v in self.postorder():
            if not self.children[v]:
                i = self._leaf_index[v]
                spans[v] = (i, i)
            else:
                spans[v] = (spans[self.children[v][0]][0],
                            spans[self.children[v][-1]][1])
        return tuple(spans)

    def __len__(self):
        return len(self.labels)

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    def is_leaf(self, node: int) -> bool:
        return not self.children[node]

    def leaf_index(self, node: int) -> int:
        return self._leaf_index[node]

    def check_node(self, node: int) -> None:
        if not isinstance(node, int) or not 0 <= node < len(self.labels):
            raise ValueError(f"unknown node id {node!r}")

    def span(self, node: int) -> tuple[int, int]:
        """Inclusive [first, last] token-index range covered by ``node``."""
        self.check_node(node)
        return self.spans[node]

    def token_range(self, node: int) -> range:
        b, e = self.span(node)
        return range(b, e + 1)

    def postorder(self, node: int | None = None):
        """Yield node ids bottom-up, children strictly before parents."""
        stack = [(self.root if node is None else node, False)]
        while stack:
            v, done = stack.pop()
            if done:
                yield v
            else:
                stack.append((v, True))
                for c in reversed(self.children[v]):
                    stack.append((c, False))

    def ancestors(self, node: int):
        """Yield proper ancestors of ``node`` from parent to root."""
        v = self.parents[node]
        while v is not None:
            yield v
            v = self.parents[v]

    def minimal_covering_subtree(self, token_indices) -> int:
        """Deepest node whose span contains every given token index (leaf LCA)."""
        idx = sorted(set(token_indices))
        if not idx:
            raise ValueError("token index set is empty")
        if idx[0] < 0 or idx[-1] >= len(self.tokens):
            raise ValueError(
                f"token index out of range: {idx[0] if idx[0] < 0 else idx[-1]} "
                f"(sentence has {len(self.tokens)} tokens)")
        lo, hi = idx[0], idx[-1]
        v = self.leaves[lo]
        while not (self.spans[v][0] <= lo and hi <= self.spans[v][1]):
            v = self.parents[v]
        return v

    def serialize(self) -> str:
        """Canonical bracketed form: single spaces, no newlines."""
        out: list[str] = []
        self._write(self.root, out)
        return "".join(out)

    def _write(self, v: int, out: list[str]) -> None:
        out.append("(")
        out.append(self.labels[v])
        out.append(" ")
        if self.children[v]:
            for i, c in enumerate(self.children[v]):
                if i:
                    out.append(" ")
                self._write(c, out)
        else:
            out.append(self.tokens[self._leaf_index[v]])
        out.append(")")

    def __str__(self):
        return self.serialize()

    def __repr__(self):
        return f"ConstTree({self.serialize()!r})"

    def __eq__(self, other):
        if not isinstance(other, ConstTree):
            return NotImplemented
        return self.serialize() == other.serialize()

    def __hash__(self):
        return hash(self.serialize())


def _strip_label(label: str, strip_after: str | None) -> str:
    if not strip_after:
        return label
    # never strip the leading character so labels like -NONE- survive
    cut = len(label)
    for ch in strip_after:
        p = label.find(ch, 1)
        if p != -1 and p < cut:
            cut = p
    return label[:cut]


def parse_bracketed(text: str, strip_after: str | None = None) -> ConstTree:
    """Parse one PTB-style bracketed tree; leaves must be ``(POS token)``.

    Raises :class:`TreeParseError` with a byte offset on unbalanced
    parentheses, empty labels, nodes without children or token, or
    trailing content.
    """
    nodes: list[tuple[str, tuple[int, ...], str | None]] = []
    pos = _WS.match(text).end()
    if pos >= len(text) or text[pos] != "(":
        raise TreeParseError("expected '('", pos)
    root, pos = _parse_node(text, pos, nodes, strip_after)
    pos = _WS.match(text, pos).end()
    if pos != len(text):
        raise TreeParseError("trailing content after tree", pos)

    labels = [n[0] for n in nodes]
    children = [n[1] for n in nodes]
    parents: list = [None] * len(nodes)
    for v, kids in enumerate(children):
        for c in kids:
            parents[c] = v
    # collect leaves left to right
    leaves: list[int] = []
    toks: list[str] = []
    stack = [root]
    while stack:
        v = stack.pop()
        if children[v]:
            stack.extend(reversed(children[v]))
        else:
            leaves.append(v)
            toks.append(nodes[v][2])
    return ConstTree(labels, parents, children, toks, leaves, root)


def _parse_node(text, pos, nodes, strip_after):
    pos += 1  # consume '('
    label: str | None = None
    token: str | None = None
    kids: list[int] = []
    while True:
        pos = _WS.match(text, pos).end()
        if pos >= len(text):
            raise TreeParseError("unbalanced parentheses: unexpected end of input",
                                 len(text))
        ch = text[pos]
        if ch == ")":
            if label is None:
                raise TreeParseError("empty node label", pos)
            if token is None and not kids:
                raise TreeParseError(f"node {label!r} has neither children nor a token",
                                     pos)
            nodes.append((label, tuple(kids), token))
            return len(nodes) - 1, pos + 1
        if ch == "(":
            if token is not None:
                raise TreeParseError("token and subtree mixed under one node", pos)
            child, pos = _parse_node(text, pos, nodes, strip_after)
            kids.append(child)
        else:
            m = _ATOM.match(text, pos)
            word = m.group()
            if label is None:
                label = _strip_label(word, strip_after)
            elif token is None and not kids:
                token = word
            else:
                raise TreeParseError(f"unexpected token {word!r}", pos)
            pos = m.end()
