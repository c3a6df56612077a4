"""Comparison feature families: aligned word pairs and CFG productions.

Every feature is a namespaced string key; identical bodies under
different namespaces stay distinct features.
"""

from __future__ import annotations

from collections import Counter

from .corpus import SentencePair

__all__ = ["NAMESPACES", "word_pair_features", "cfg_features"]

NAMESPACES = ("wp", "cfg", "t2s", "t2t")


def word_pair_features(pair: SentencePair) -> Counter:
    """One ``wp:l2|||l1`` feature per alignment link, lowercased."""
    feats: Counter = Counter()
    for i, j in pair.alignment.links:
        feats[f"wp:{pair.l2_tokens[i].lower()}|||{pair.l1_tokens[j].lower()}"] += 1
    return feats


def cfg_features(pair: SentencePair) -> Counter:
    """Delexicalized productions of the L2 tree, one per internal node;
    preterminals appear as child symbols, never as rule heads."""
    tree = pair.l2_tree
    feats: Counter = Counter()
    for v in tree.postorder():
        kids = tree.children[v]
        if kids:
            rhs = " ".join(tree.labels[c] for c in kids)
            feats[f"cfg:{tree.labels[v]} -> {rhs}"] += 1
    return feats
