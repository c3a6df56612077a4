"""Tree-to-string reordering rules from (L2 tree, L1 string, alignment) triples.

Rules pair a delexicalized L2 tree fragment with a permutation of its
variables giving the L1-side order. Only reordering rules survive: the
permutation must not be the identity and no lexical material may remain
in the fragment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aligner import Alignment
from .fragments import Frag, parse_fragment
from .treebank import ConstTree

__all__ = ["T2SRule", "frontier_set", "target_index_sets",
           "extract_minimal_rules", "extract_rule_instances",
           "canonicalize_rule", "parse_rule"]

SEPARATOR = " ||| "


@dataclass(frozen=True)
class T2SRule:
    """Delexicalized reordering rule: fragment lhs, variable permutation rhs.

    ``order`` lists variable indices in their L1 surface order, so
    ``order == (1, 0, 2)`` renders as ``x1 x0 x2``.
    """

    lhs: Frag
    order: tuple[int, ...]

    def __post_init__(self):
        k1 = len(self.order)
        if k1 < 2:
            raise ValueError("reordering rule needs at least two variables")
        if sorted(self.order) != list(range(k1)):
            raise ValueError(f"rhs {self.order} is not a permutation")
        if self.order == tuple(range(k1)):
            raise ValueError("identity permutation is not a reordering")
        if self.lhs.variables() != list(range(k1)):
            raise ValueError("lhs variables must be x0..xk left to right")

    @property
    def canonical(self) -> str:
        rhs = " ".join(f"x{i}" for i in self.order)
        return f"{self.lhs.serialize()}{SEPARATOR}{rhs}"

    def __str__(self):
        return self.canonical


def target_index_sets(tree: ConstTree, alignment: Alignment) -> list[frozenset[int]]:
    """Per-node set of L1 indices aligned to any L2 token under the node."""
    tsets: list = [None] * len(tree)
    for v in tree.postorder():
        if tree.is_leaf(v):
            tsets[v] = alignment.targets(tree.leaf_index(v))
        else:
            acc: set[int] = set()
            for c in tree.children[v]:
                acc |= tsets[c]
            tsets[v] = frozenset(acc)
    return tsets


def frontier_set(tree: ConstTree, alignment: Alignment) -> set[int]:
    """Nodes whose aligned L1 interval is isolable from the rest of the tree.

    A node qualifies when its target set is non-empty and the closed
    interval spanned by it contains no L1 index aligned under a node that
    is neither an ancestor nor a descendant.
    """
    tsets = target_index_sets(tree, alignment)
    comp: list = [None] * len(tree)
    comp[tree.root] = frozenset()
    for v in reversed(list(tree.postorder())):  # parents before children
        kids = tree.children[v]
        for c in kids:
            acc = set(comp[v])
            for other in kids:
                if other != c:
                    acc |= tsets[other]
            comp[c] = frozenset(acc)
    frontier: set[int] = set()
    for v in range(len(tree)):
        if not tsets[v]:
            continue
        lo, hi = min(tsets[v]), max(tsets[v])
        if not any(lo <= q <= hi for q in comp[v]):
            frontier.add(v)
    return frontier


def _build_fragment(tree, node, frontier, var_nodes):
    """Expand ``node`` down to maximal frontier descendants; None if any
    branch bottoms out in lexical material instead of a variable."""
    kids = []
    for c in tree.children[node]:
        if c in frontier:
            kids.append(Frag(tree.labels[c], (len(var_nodes),)))
            var_nodes.append(c)
        elif tree.is_leaf(c):
            return None
        else:
            sub = _build_fragment(tree, c, frontier, var_nodes)
            if sub is None:
                return None
            kids.append(sub)
    return Frag(tree.labels[node], tuple(kids))


def extract_rule_instances(tree: ConstTree, alignment: Alignment):
    """All minimal reordering rules with their root and variable nodes.

    Returns (root_node, rule, variable_nodes) triples in tree post-order.
    """
    tsets = target_index_sets(tree, alignment)
    frontier = frontier_set(tree, alignment)
    out = []
    for r in tree.postorder():
        if r not in frontier or tree.is_leaf(r):
            continue
        var_nodes: list[int] = []
        lhs = _build_fragment(tree, r, frontier, var_nodes)
        if lhs is None or len(var_nodes) < 2:
            continue
        spans = [(min(tsets[v]), max(tsets[v])) for v in var_nodes]
        order = tuple(sorted(range(len(var_nodes)), key=lambda m: spans[m][0]))
        if _overlapping(spans, order):
            continue
        if order == tuple(range(len(var_nodes))):
            continue
        out.append((r, T2SRule(lhs, order), tuple(var_nodes)))
    return out


def _overlapping(spans, order) -> bool:
    for a, b in zip(order, order[1:]):
        if spans[b][0] <= spans[a][1]:
            return True
    return False


def extract_minimal_rules(tree: ConstTree, l1_len: int,
                          alignment: Alignment) -> list[T2SRule]:
    """Minimal delexicalized reordering rules for one aligned triple."""
    alignment.check_bounds(tree.n_tokens, l1_len)
    return [rule for _, rule, _ in extract_rule_instances(tree, alignment)]


def canonicalize_rule(rule: T2SRule) -> str:
    return rule.canonical


def parse_rule(text: str) -> T2SRule:
    """Inverse of :func:`canonicalize_rule`."""
    lhs_text, sep, rhs_text = text.partition(SEPARATOR)
    if not sep:
        raise ValueError(f"rule {text!r} lacks the {SEPARATOR.strip()!r} separator")
    lhs = parse_fragment(lhs_text)
    order = []
    for field in rhs_text.split():
        if not field.startswith("x") or not field[1:].isdigit():
            raise ValueError(f"bad rhs variable {field!r}")
        order.append(int(field[1:]))
    return T2SRule(lhs, tuple(order))
