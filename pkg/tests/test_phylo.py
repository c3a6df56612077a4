import math
import random
from collections import Counter

import numpy as np
import pytest

from l2transfer.phylo import (Dendrogram, Merge, build_matrix, cluster,
                              distance_matrix, parse_newick, pca_reduce,
                              read_matrix_tsv, to_newick, write_matrix_tsv,
                              LINKAGES)

from oracles import (dendrogram_to_nested, naive_linkage, nested_equal,
                     newick_read)


def test_build_matrix_golden():
    m = build_matrix({"A": Counter({"f1": 2, "f2": 1}),
                      "B": Counter({"f1": 1})}, min_count=1)
    assert m.languages == ("A", "B")
    assert m.features == ("f1", "f2")
    assert m.counts.tolist() == [[2, 1], [1, 0]]
    assert m.normalized[:, 0].tolist() == pytest.approx([2 / 3, 1 / 3])
    assert m.normalized[:, 1].tolist() == pytest.approx([1.0, 0.0])


def test_build_matrix_prunes_rare_features():
    m = build_matrix({"A": Counter({"f1": 2, "rare": 1}),
                      "B": Counter({"f1": 1})}, min_count=2)
    assert m.features == ("f1",)


def test_build_matrix_errors():
    with pytest.raises(ValueError):
        build_matrix({"A": Counter({"f1": 1})})
    with pytest.raises(ValueError):
        build_matrix({"A": Counter({"f1": 5}), "B": Counter()}, min_count=1)
    with pytest.raises(ValueError):  # pruning empties a column
        build_matrix({"A": Counter({"f1": 9, "only_b": 0}),
                      "B": Counter({"only_b": 1})}, min_count=2)
    with pytest.raises(ValueError):  # nothing survives pruning
        build_matrix({"A": Counter({"f1": 1}), "B": Counter({"f2": 1})},
                     min_count=5)


def test_identical_languages_have_zero_distance():
    feats = Counter({"f1": 4, "f2": 2})
    m = build_matrix({"A": feats, "B": Counter(feats), "C": Counter({"f1": 9})},
                     min_count=1)
    coords = pca_reduce(m, k=2)
    d = distance_matrix(coords)
    assert d[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert d[0, 2] > 0.1


def random_matrix(rng, n_langs=6, n_feats=12):
    lang_features = {}
    for i in range(n_langs):
        feats = Counter()
        for j in range(n_feats):
            feats[f"f{j}"] = rng.randint(0, 8)
        feats[f"f{rng.randrange(n_feats)}"] += 1  # never all-zero
        lang_features[f"L{i}"] = feats
    return build_matrix(lang_features, min_count=1)


def test_full_rank_pca_preserves_distances():
    rng = random.Random(101)
    for _ in range(20):
        m = random_matrix(rng)
        n = len(m.languages)
        coords = pca_reduce(m, k=n - 1)
        raw = m.normalized.T
        centered = raw - raw.mean(axis=0)
        d_proj = distance_matrix(coords)
        d_raw = distance_matrix(centered)
        assert np.abs(d_proj - d_raw).max() < 1e-9


def test_two_languages_single_component():
    m = build_matrix({"A": Counter({"f1": 3, "f2": 1}),
                      "B": Counter({"f1": 1, "f2": 3})}, min_count=1)
    coords = pca_reduce(m, k=1)
    assert coords.shape == (2, 1)
    raw = m.normalized.T
    expected = float(np.sqrt(((raw[0] - raw[1]) ** 2).sum()))
    assert abs(coords[0, 0] - coords[1, 0]) == pytest.approx(expected)


def test_variance_threshold_recovers_planted_dimensionality():
    # three language groups with disjoint feature support: centered rank 2
    lang_features = {}
    groups = [("f1", "f2"), ("f3", "f4"), ("f5", "f6")]
    for g, feats in enumerate(groups):
        for i in range(3):
            lang_features[f"g{g}l{i}"] = Counter({feats[0]: 50, feats[1]: 50})
    m = build_matrix(lang_features, min_count=1)
    coords = pca_reduce(m, variance=0.95)
    assert coords.shape[1] == 2


def test_pca_errors():
    m = build_matrix({"A": Counter({"f1": 1, "f2": 3}),
                      "B": Counter({"f1": 2, "f2": 1}),
                      "C": Counter({"f1": 3, "f2": 2})}, min_count=1)
    with pytest.raises(ValueError):
        pca_reduce(m, k=0)
    with pytest.raises(ValueError):
        pca_reduce(m, k=3)
    same = Counter({"f1": 2, "f2": 2})
    degenerate = build_matrix({"A": same, "B": Counter(same),
                               "C": Counter(same)}, min_count=1)
    with pytest.raises(ValueError):
        pca_reduce(degenerate, k=1)


def test_distance_matrix_golden():
    d = distance_matrix(np.array([[0.0], [3.0], [4.0]]))
    assert d.tolist() == [[0, 3, 4], [3, 0, 1], [4, 1, 0]]


def test_distance_matrix_properties():
    rng = np.random.RandomState(7)
    pts = rng.rand(10, 4)
    d = distance_matrix(pts)
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    n = len(d)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                assert d[i, j] <= d[i, k] + d[k, j] + 1e-12


def test_cluster_hand_case_average():
    d = distance_matrix(np.array([[0.0], [1.0], [10.0]]))
    dg = cluster(d, "average", labels=("a", "b", "c"))
    assert dg.merges[0] == Merge(0, 1, 1.0, 2)
    assert dg.merges[1].height == pytest.approx(9.5)
    assert dg.merges[1].a == 2 and dg.merges[1].b == 3


def test_cluster_two_points():
    dg = cluster(np.array([[0.0, 2.5], [2.5, 0.0]]), "single", ("x", "y"))
    assert len(dg.merges) == 1
    assert dg.merges[0].height == pytest.approx(2.5)


def test_cluster_errors():
    with pytest.raises(ValueError):
        cluster(np.zeros((1, 1)), "average")
    with pytest.raises(ValueError):
        cluster(np.array([[0.0, 1.0], [2.0, 0.0]]), "average")
    with pytest.raises(ValueError):
        cluster(np.zeros((2, 2)), "banana")


def merge_leafsets(dg):
    n = dg.n_leaves
    sets = {i: frozenset([i]) for i in range(n)}
    out = []
    for i, m in enumerate(dg.merges):
        sets[n + i] = sets[m.a] | sets[m.b]
        out.append((sets[m.a], sets[m.b], m.height))
    return out


def assert_matches_naive(d, linkage):
    labels = tuple(f"p{i}" for i in range(len(d)))
    dg = cluster(d, linkage, labels)
    got = merge_leafsets(dg)
    expected = naive_linkage(d.tolist(), linkage)
    assert len(got) == len(expected)
    for (ga, gb, gh), (ea, eb, eh) in zip(got, expected):
        assert {ga, gb} == {ea, eb}
        assert gh == pytest.approx(eh, rel=1e-9, abs=1e-9)


def test_cluster_matches_naive_reference():
    rng = np.random.RandomState(17)
    for _ in range(30):
        pts = rng.rand(8, 3)
        d = distance_matrix(pts)
        for linkage in LINKAGES:
            assert_matches_naive(d, linkage)


def test_cluster_monotone_heights():
    rng = np.random.RandomState(18)
    for _ in range(20):
        pts = rng.rand(9, 2)
        d = distance_matrix(pts)
        for linkage in LINKAGES:
            dg = cluster(d, linkage)
            heights = [m.height for m in dg.merges]
            assert heights == sorted(heights)


def test_cluster_tie_break_by_cluster_id():
    d = np.ones((4, 4)) - np.eye(4)
    dg = cluster(d, "average", ("a", "b", "c", "d"))
    assert (dg.merges[0].a, dg.merges[0].b) == (0, 1)
    assert (dg.merges[1].a, dg.merges[1].b) == (2, 3)


def test_scaling_invariance_of_topology():
    rng = np.random.RandomState(19)
    pts = rng.rand(7, 2)
    d = distance_matrix(pts)
    for linkage in LINKAGES:
        dg1 = cluster(d, linkage)
        dg2 = cluster(3.5 * d, linkage)
        assert [(m.a, m.b) for m in dg1.merges] == \
            [(m.a, m.b) for m in dg2.merges]
        for m1, m2 in zip(dg1.merges, dg2.merges):
            assert m2.height == pytest.approx(3.5 * m1.height, rel=1e-9)


def test_newick_two_leaves_golden():
    dg = Dendrogram(("A", "B"), (Merge(0, 1, 2.0, 2),))
    assert to_newick(dg) == "(A:2,B:2);"


def test_newick_branch_lengths_nonnegative():
    rng = np.random.RandomState(23)
    d = distance_matrix(rng.rand(6, 2))
    dg = cluster(d, "average")
    nested = newick_read(to_newick(dg))

    def walk(node):
        if isinstance(node, str):
            return
        for child, length in node:
            assert length is not None and length >= 0
            walk(child)

    walk(nested)


def ten_language_dendrogram():
    # the tree-to-tree topology over ten Indo-European languages
    labels = ("Pol", "Ukr", "Rus", "Ger", "Spa", "Por", "Ita", "Fre",
              "Hin", "Per")
    merges = (
        Merge(0, 1, 1.0, 2),    # 10: (Pol,Ukr)
        Merge(2, 10, 2.0, 3),   # 11: +Rus
        Merge(3, 11, 3.0, 4),   # 12: +Ger
        Merge(4, 5, 1.0, 2),    # 13: (Spa,Por)
        Merge(6, 7, 1.5, 2),    # 14: (Ita,Fre)
        Merge(13, 14, 2.5, 4),  # 15: romance
        Merge(8, 9, 2.0, 2),    # 16: (Hin,Per)
        Merge(15, 16, 4.0, 6),  # 17
        Merge(12, 17, 5.0, 10),
    )
    return Dendrogram(labels, merges)


def test_newick_roundtrip_ten_languages():
    dg = ten_language_dendrogram()
    text = to_newick(dg)
    # independent grammar-based reader agrees with the merge structure
    assert nested_equal(newick_read(text), dendrogram_to_nested(dg))
    # package parser reproduces the same tree (leaf ids follow text order)
    back = parse_newick(text)
    assert sorted(back.labels) == sorted(dg.labels)
    assert len(back.merges) == len(dg.merges)
    assert merge_leafsets_by_name(back) == merge_leafsets_by_name(dg)
    assert to_newick(back) == text


def merge_leafsets_by_name(dg):
    out = set()
    for a, b, h in merge_leafsets(dg):
        out.add((frozenset(dg.labels[i] for i in a),
                 frozenset(dg.labels[i] for i in b),
                 round(h, 9)))
    return out


def test_parse_newick_rejects_malformed():
    for text in ["(A:1,B:1)", "(A:1);", "(A:1,B:2);", "((A:1,B:1):1,C:2",
                 "(A:1,B:1,C:1);"]:
        with pytest.raises(ValueError):
            parse_newick(text)


def test_newick_quoted_labels():
    dg = Dendrogram(("lang one", "B"), (Merge(0, 1, 1.0, 2),))
    text = to_newick(dg)
    assert text == "('lang one':1,B:1);"
    assert parse_newick(text).labels == ("lang one", "B")


def test_matrix_tsv_roundtrip(tmp_path):
    m = build_matrix({"A": Counter({"f1": 2, "f2": 1}),
                      "B": Counter({"f1": 1})}, min_count=1)
    path = tmp_path / "m.tsv"
    write_matrix_tsv(path, m)
    back = read_matrix_tsv(path)
    assert back.languages == m.languages
    assert back.features == m.features
    assert np.array_equal(back.counts, m.counts)
