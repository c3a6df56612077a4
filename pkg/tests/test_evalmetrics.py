import itertools
import random

import pytest

from l2transfer.evalmetrics import (dendrogram_purity, leaf_pair_distance,
                                    read_genus_labels)
from l2transfer.phylo import Dendrogram, Merge

from oracles import bfs_path_edges, dendrogram_adjacency, mc_purity


def dendro_from_nested(nested):
    """Build a dendrogram from nested tuples of leaf names, for example
    (("A1", "A2"), ("B1", "B2")). Heights are synthetic."""
    labels: list[str] = []
    merges: list[Merge] = []

    def count_leaves(node):
        if isinstance(node, str):
            return 1
        return sum(count_leaves(c) for c in node)

    n_total = count_leaves(nested)

    def build(node):
        if isinstance(node, str):
            labels.append(node)
            return len(labels) - 1, 0.0, 1
        assert len(node) == 2, "binary trees only"
        a, ha, sa = build(node[0])
        b, hb, sb = build(node[1])
        h = max(ha, hb) + 1.0
        merges.append(Merge(min(a, b), max(a, b), h, sa + sb))
        return n_total + len(merges) - 1, h, sa + sb

    build(nested)
    return Dendrogram(tuple(labels), tuple(merges))


FOUR_GOOD = dendro_from_nested((("A1", "A2"), ("B1", "B2")))
FOUR_BAD = dendro_from_nested((("A1", "B1"), ("A2", "B2")))
LABELS4 = {"A1": "A", "A2": "A", "B1": "B", "B2": "B"}


def test_purity_hand_cases():
    assert dendrogram_purity(FOUR_GOOD, LABELS4) == 1.0
    assert dendrogram_purity(FOUR_BAD, LABELS4) == 0.5


def test_leaf_pair_distance_hand_cases():
    assert leaf_pair_distance(FOUR_GOOD, LABELS4) == 2.0
    assert leaf_pair_distance(FOUR_BAD, LABELS4) == 4.0


def test_cherry_distance_is_two():
    dg = dendro_from_nested(("A1", "A2"))
    assert leaf_pair_distance(dg, {"A1": "A", "A2": "A"}) == 2.0
    assert dendrogram_purity(dg, {"A1": "A", "A2": "A"}) == 1.0


def test_singleton_class_contributes_nothing():
    dg = dendro_from_nested((("A1", "A2"), "C1"))
    labels = {"A1": "A", "A2": "A", "C1": "C"}
    assert dendrogram_purity(dg, labels) == 1.0


def test_errors():
    dg = dendro_from_nested(("A1", "B1"))
    with pytest.raises(ValueError):  # no class with two leaves
        dendrogram_purity(dg, {"A1": "A", "B1": "B"})
    with pytest.raises(ValueError):
        leaf_pair_distance(dg, {"A1": "A", "B1": "B"})
    with pytest.raises(ValueError):  # missing label
        dendrogram_purity(FOUR_GOOD, {"A1": "A", "A2": "A", "B1": "B"})


def all_binary_topologies(leaves):
    if len(leaves) == 1:
        yield leaves[0]
        return
    first, rest = leaves[0], leaves[1:]
    for k in range(len(rest) + 1):
        for left_rest in itertools.combinations(rest, k):
            left = (first,) + left_rest
            right = tuple(x for x in rest if x not in left_rest)
            if not right:
                continue
            for lt in all_binary_topologies(left):
                for rt in all_binary_topologies(right):
                    yield (lt, rt)


def pure_subtree_exists(dg, labels, cls):
    want = frozenset(l for l in dg.labels if labels[l] == cls)
    n = dg.n_leaves
    sets = {i: frozenset([dg.labels[i]]) for i in range(n)}
    if want in sets.values():
        return True
    for i, m in enumerate(dg.merges):
        sets[n + i] = sets[m.a] | sets[m.b]
        if sets[n + i] == want:
            return True
    return False


def test_purity_one_iff_pure_subtrees_exhaustive_five_leaves():
    leaves = ("a", "b", "c", "d", "e")
    topologies = list(all_binary_topologies(leaves))
    assert len(topologies) == 105  # (2n-3)!! full binary shapes
    labelings = [dict(zip(leaves, bits))
                 for bits in itertools.product("AB", repeat=5)
                 if len(set(bits)) == 2]
    for nested in topologies:
        dg = dendro_from_nested(nested)
        for labels in labelings:
            purity = dendrogram_purity(dg, labels)
            pure = all(pure_subtree_exists(dg, labels, c)
                       for c in set(labels.values()))
            assert (purity == 1.0) == pure, (nested, labels)


def random_labeled_tree(rng, n_leaves, n_classes=3):
    names = [f"L{i}" for i in range(n_leaves)]
    items = [(name,) for name in names]
    while len(items) > 1:
        i, j = sorted(rng.sample(range(len(items)), 2))
        b = items.pop(j)
        a = items.pop(i)
        items.append((a[0] if len(a) == 1 else a,
                      b[0] if len(b) == 1 else b))
    nested = items[0]
    labels = {}
    while True:
        labels = {n: f"C{rng.randrange(n_classes)}" for n in names}
        counts = {}
        for c in labels.values():
            counts[c] = counts.get(c, 0) + 1
        if any(v >= 2 for v in counts.values()):
            return dendro_from_nested(nested), labels


def test_exact_purity_matches_monte_carlo():
    rng = random.Random(33)
    for _ in range(10):
        dg, labels = random_labeled_tree(rng, 10)
        exact = dendrogram_purity(dg, labels)
        estimate = mc_purity(dg, labels, 100_000, rng)
        assert abs(exact - estimate) < 0.01


def test_leaf_pair_distance_matches_bfs_oracle():
    rng = random.Random(34)
    for _ in range(25):
        dg, labels = random_labeled_tree(rng, rng.randint(4, 12))
        adj = dendrogram_adjacency(dg)
        cls = [labels[name] for name in dg.labels]
        pairs = [(i, j) for i in range(dg.n_leaves)
                 for j in range(i + 1, dg.n_leaves) if cls[i] == cls[j]]
        expected = sum(bfs_path_edges(adj, i, j) for i, j in pairs) / len(pairs)
        got = leaf_pair_distance(dg, labels)
        assert got == pytest.approx(expected)
        assert got >= 2.0


def test_read_genus_labels(tmp_path):
    path = tmp_path / "genus.tsv"
    path.write_text("# comment\nfr\tromance\nru\tslavic\n", encoding="utf-8")
    assert read_genus_labels(path) == {"fr": "romance", "ru": "slavic"}
    bad = tmp_path / "bad.tsv"
    bad.write_text("fr romance\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_genus_labels(bad)
