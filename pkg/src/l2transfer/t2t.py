"""Tree-to-tree transfer patterns via anchor-based alignment of parse trees.

An anchor is an L2 subtree whose projected L1 index sequence contains an
inversion. For each anchor we pair its fragment with the minimal L1
subtree covering the anchor's aligned tokens, collapsing both sides down
to shared variables and discarding anything that would keep lexical
material.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aligner import Alignment
from .corpus import SentencePair
from .fragments import Frag, parse_fragment
from .t2s import SEPARATOR, target_index_sets
from .treebank import ConstTree

__all__ = ["T2TPattern", "find_anchors", "extract_pattern", "extract_all",
           "parse_pattern"]


@dataclass(frozen=True)
class T2TPattern:
    """Paired delexicalized fragments sharing one variable set."""

    l2_fragment: Frag
    l1_fragment: Frag

    def __post_init__(self):
        v2 = self.l2_fragment.variables()
        v1 = self.l1_fragment.variables()
        if sorted(v1) != v2 or v2 != list(range(len(v2))):
            raise ValueError("fragments must share variables x0..xk, once each")
        if v1 == v2:
            raise ValueError("pattern carries no reordering")

    @property
    def canonical(self) -> str:
        return f"{self.l2_fragment.serialize()}{SEPARATOR}{self.l1_fragment.serialize()}"

    def __str__(self):
        return self.canonical


def parse_pattern(text: str) -> T2TPattern:
    l2_text, sep, l1_text = text.partition(SEPARATOR)
    if not sep:
        raise ValueError(f"pattern {text!r} lacks the separator")
    return T2TPattern(parse_fragment(l2_text), parse_fragment(l1_text))


class _PairContext:
    """Shared per-sentence caches for anchor search and collapse."""

    def __init__(self, l2_tree: ConstTree, alignment: Alignment):
        self.tree = l2_tree
        self.alignment = alignment
        self.tsets = target_index_sets(l2_tree, alignment)
        self.reps = [min(s) if (s := alignment.targets(i)) else None
                     for i in range(l2_tree.n_tokens)]
        self.l2_of_l1: dict[int, list[int]] = {}
        for i, j in alignment.links:
            self.l2_of_l1.setdefault(j, []).append(i)

    def inversion_pairs(self, node: int):
        """Token index pairs (i, j), i < j, whose representatives invert."""
        b, e = self.tree.spans[node]
        aligned = [i for i in range(b, e + 1) if self.reps[i] is not None]
        return [(i, j)
                for a, i in enumerate(aligned)
                for j in aligned[a + 1:]
                if self.reps[i] > self.reps[j]]

    def qualifies(self, node: int) -> bool:
        """May ``node`` collapse to a variable? Its aligned block must be
        non-empty, isolable from material outside the node, and internally
        monotone."""
        s = self.tsets[node]
        if not s:
            return False
        b, e = self.tree.spans[node]
        for q in range(min(s), max(s) + 1):
            for i in self.l2_of_l1.get(q, ()):
                if not b <= i <= e:
                    return False
        prev = -1
        for i in range(b, e + 1):
            r = self.reps[i]
            if r is not None:
                if r < prev:
                    return False
                prev = r
        return True


def find_anchors(l2_tree: ConstTree, alignment: Alignment) -> list[int]:
    """Anchor nodes in post-order, keeping only minimal ones.

    A node is kept iff some inversion pair of its span is not already
    contained in a kept descendant's span.
    """
    ctx = _PairContext(l2_tree, alignment)
    return _find_anchors(ctx)


def _find_anchors(ctx: _PairContext) -> list[int]:
    kept: list[int] = []
    spans = ctx.tree.spans
    for v in ctx.tree.postorder():
        pairs = ctx.inversion_pairs(v)
        if not pairs:
            continue
        for i, j in pairs:
            if not any(spans[a][0] <= i and j <= spans[a][1] for a in kept):
                kept.append(v)
                break
    return kept


def extract_pattern(anchor: int, l2_tree: ConstTree, l1_tree: ConstTree,
                    alignment: Alignment) -> T2TPattern | None:
    """Collapse one anchor into a pattern; None when no clean delexicalized
    pattern exists (shared blocks, leftover lexical material, and so on)."""
    ctx = _PairContext(l2_tree, alignment)
    return _extract_pattern(ctx, anchor, l1_tree)


def _extract_pattern(ctx: _PairContext, anchor: int,
                     l1_tree: ConstTree) -> T2TPattern | None:
    tree = ctx.tree
    tree.check_node(anchor)
    covered = ctx.tsets[anchor]
    if not covered:
        return None
    l1_root = l1_tree.minimal_covering_subtree(covered)

    var_nodes: list[int] = []
    if not _collect_variables(ctx, anchor, var_nodes):
        return None
    if len(var_nodes) < 2:
        return None

    blocks = [(min(ctx.tsets[v]), max(ctx.tsets[v])) for v in var_nodes]
    matched: list[int] = []
    for lo, hi in blocks:
        node = _match_block(l1_tree, l1_root, lo, hi)
        if node is None:
            return None
        matched.append(node)

    # every L1 token under the root must collapse into some variable
    covered_l1: set[int] = set()
    for node in matched:
        b, e = l1_tree.spans[node]
        covered_l1.update(range(b, e + 1))
    rb, re_ = l1_tree.spans[l1_root]
    if covered_l1 != set(range(rb, re_ + 1)):
        return None

    l2_frag = _collapse(tree, anchor, {v: m for m, v in enumerate(var_nodes)})
    l1_frag = _collapse(l1_tree, l1_root, {n: m for m, n in enumerate(matched)})
    if l1_frag.variables() == l2_frag.variables():
        return None
    return T2TPattern(l2_frag, l1_frag)


def _collect_variables(ctx: _PairContext, node: int, acc: list[int]) -> bool:
    """Gather maximal qualifying descendants left to right; False when a
    branch ends in a leaf that cannot become a variable."""
    for c in ctx.tree.children[node]:
        if ctx.qualifies(c):
            acc.append(c)
        elif ctx.tree.is_leaf(c):
            return False
        elif not _collect_variables(ctx, c, acc):
            return False
    return True


def _match_block(l1_tree: ConstTree, root: int, lo: int, hi: int) -> int | None:
    """Highest proper descendant of ``root`` whose span is exactly [lo, hi]."""
    v = root
    while True:
        if v != root and l1_tree.spans[v] == (lo, hi):
            return v
        nxt = None
        for c in l1_tree.children[v]:
            cb, ce = l1_tree.spans[c]
            if cb <= lo and hi <= ce:
                nxt = c
                break
        if nxt is None:
            return None
        v = nxt


def _collapse(tree: ConstTree, node: int, variable_of: dict[int, int]) -> Frag:
    if node in variable_of:
        return Frag(tree.labels[node], (variable_of[node],))
    kids = tuple(_collapse(tree, c, variable_of) for c in tree.children[node])
    return Frag(tree.labels[node], kids)


def extract_all(pair: SentencePair) -> list[T2TPattern]:
    """All patterns of one sentence pair, in anchor post-order."""
    if pair.l1_tree is None:
        raise ValueError(
            "tree-to-tree extraction needs an L1 tree; this record has none "
            "(use tree-to-string extraction instead)")
    ctx = _PairContext(pair.l2_tree, pair.alignment)
    out = []
    for anchor in _find_anchors(ctx):
        pattern = _extract_pattern(ctx, anchor, pair.l1_tree)
        if pattern is not None:
            out.append(pattern)
    return out
