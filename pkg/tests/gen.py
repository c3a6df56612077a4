"""Seeded random generators shared across the test suite."""

from __future__ import annotations

import random

from l2transfer.aligner import Alignment
from l2transfer.corpus import SentencePair
from l2transfer.treebank import parse_bracketed

PHRASE_LABELS = ["S", "NP", "VP", "PP", "ADVP", "ADJP", "SBAR", "X"]
POS_LABELS = ["NN", "NNS", "VB", "VBD", "JJ", "RB", "IN", "DT", "PRP", "MD"]
WORDS = ["alpha", "bravo", "cat", "dog", "eats", "fast", "green", "house",
         "ink", "jumps", "kite", "lemon", "moon", "nap", "old", "pear"]


def random_tree_text(rng: random.Random, n_tokens: int) -> str:
    """Bracketed text of a random tree over ``n_tokens`` leaves; includes
    occasional unary chains."""

    def build(lo: int, hi: int) -> str:
        if hi - lo == 1:
            return f"({rng.choice(POS_LABELS)} {rng.choice(WORDS)})"
        n_parts = rng.randint(2, min(4, hi - lo))
        cuts = sorted(rng.sample(range(lo + 1, hi), n_parts - 1))
        bounds = [lo] + cuts + [hi]
        kids = " ".join(build(bounds[i], bounds[i + 1])
                        for i in range(len(bounds) - 1))
        label = rng.choice(PHRASE_LABELS)
        body = f"({label} {kids})"
        if rng.random() < 0.15:
            body = f"({rng.choice(PHRASE_LABELS)} {body})"
        return body

    if n_tokens == 1:
        return f"({rng.choice(PHRASE_LABELS)} {build(0, 1)})"
    return build(0, n_tokens)


def random_tree(rng: random.Random, n_tokens: int):
    return parse_bracketed(random_tree_text(rng, n_tokens))


def random_one_to_one(rng: random.Random, n_l2: int, n_l1: int) -> Alignment:
    """Random injective partial alignment."""
    k = rng.randint(1, min(n_l2, n_l1))
    srcs = rng.sample(range(n_l2), k)
    tgts = rng.sample(range(n_l1), k)
    return Alignment(zip(srcs, tgts))


def random_many_to_many(rng: random.Random, n_l2: int, n_l1: int) -> Alignment:
    links = set()
    for i in range(n_l2):
        for j in range(n_l1):
            if rng.random() < 1.5 / max(n_l2, n_l1):
                links.add((i, j))
    if not links:
        links.add((rng.randrange(n_l2), rng.randrange(n_l1)))
    return Alignment(links)


def random_pair(rng: random.Random, max_tokens: int = 8,
                one_to_one: bool = True) -> SentencePair:
    n_l2 = rng.randint(2, max_tokens)
    n_l1 = rng.randint(2, max_tokens)
    l2_tree = random_tree(rng, n_l2)
    l1_tree = random_tree(rng, n_l1)
    make = random_one_to_one if one_to_one else random_many_to_many
    alignment = make(rng, n_l2, n_l1)
    return SentencePair("test", l2_tree.tokens, l1_tree.tokens,
                        l2_tree, l1_tree, alignment)


def correlated_pair(rng: random.Random, max_tokens: int = 8) -> SentencePair:
    """A pair whose L1 tree is the L2 tree with child blocks shuffled at
    random nodes, token-aligned one to one. This mirrors corrected
    sentences and exercises the pattern extractors densely."""
    l2_tree = random_tree(rng, rng.randint(2, max_tokens))
    order: list[int] = []

    def rebuild(v) -> str:
        if l2_tree.is_leaf(v):
            i = l2_tree.leaf_index(v)
            order.append(i)
            return f"({l2_tree.labels[v]} {l2_tree.tokens[i]})"
        kids = list(l2_tree.children[v])
        if len(kids) > 1 and rng.random() < 0.5:
            rng.shuffle(kids)
        inner = " ".join(rebuild(c) for c in kids)
        return f"({l2_tree.labels[v]} {inner})"

    l1_tree = parse_bracketed(rebuild(l2_tree.root))
    position = {tok_i: pos for pos, tok_i in enumerate(order)}
    links = []
    for i in range(l2_tree.n_tokens):
        if rng.random() < 0.9:  # leave some tokens unaligned
            links.append((i, position[i]))
    if not links:
        links.append((0, position[0]))
    return SentencePair("test", l2_tree.tokens, l1_tree.tokens,
                        l2_tree, l1_tree, Alignment(links))
