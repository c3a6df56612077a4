"""Dendrogram quality against gold genus labels: exact dendrogram purity
and average same-class leaf-pair path length."""

from __future__ import annotations

from collections import Counter

from .phylo import Dendrogram

__all__ = ["dendrogram_purity", "leaf_pair_distance", "read_genus_labels"]


def read_genus_labels(path) -> dict[str, str]:
    """``language<TAB>genus`` rows; later rows win on duplicates."""
    labels: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'language<TAB>genus'")
            labels[parts[0]] = parts[1]
    return labels


def _leaf_classes(dg: Dendrogram, labels) -> list[str]:
    missing = [l for l in dg.labels if l not in labels]
    if missing:
        raise ValueError(f"labels missing for leaves: {missing}")
    return [labels[l] for l in dg.labels]


def _class_counts(dg: Dendrogram, classes) -> dict[int, Counter]:
    """Per cluster node: leaf count per class."""
    n = dg.n_leaves
    counts = {i: Counter({classes[i]: 1}) for i in range(n)}
    for i, m in enumerate(dg.merges):
        counts[n + i] = counts[m.a] + counts[m.b]
    return counts


def dendrogram_purity(dg: Dendrogram, labels) -> float:
    """Exact all-pairs dendrogram purity in [0, 1].

    For every unordered same-class leaf pair, take the fraction of
    same-class leaves under the pair's lowest common ancestor; average
    over all such pairs. 1.0 iff each class forms a pure subtree.
    """
    classes = _leaf_classes(dg, labels)
    counts = _class_counts(dg, classes)
    n = dg.n_leaves
    total_pairs = 0
    accum = 0.0
    for i, m in enumerate(dg.merges):
        v = n + i
        size_v = sum(counts[v].values())
        for cls, cnt in counts[v].items():
            pairs_here = (cnt * (cnt - 1)
                          - counts[m.a][cls] * (counts[m.a][cls] - 1)
                          - counts[m.b][cls] * (counts[m.b][cls] - 1)) // 2
            if pairs_here:
                total_pairs += pairs_here
                accum += pairs_here * (cnt / size_v)
    if total_pairs == 0:
        raise ValueError("no class has two or more leaves; purity is undefined")
    return accum / total_pairs


def leaf_pair_distance(dg: Dendrogram, labels) -> float:
    """Average number of tree edges between same-class leaves (heights are
    ignored; the minimum possible value is 2.0, a cherry)."""
    classes = _leaf_classes(dg, labels)
    counts = _class_counts(dg, classes)
    n = dg.n_leaves
    children = dg.children()
    depth = {dg.root: 0}
    for v in range(dg.root, n - 1, -1):
        a, b = children[v]
        depth[a] = depth[v] + 1
        depth[b] = depth[v] + 1
    # per node and class: sum of leaf depths, for O(n * classes) pair sums
    depth_sums: dict[int, Counter] = {
        i: Counter({classes[i]: depth[i]}) for i in range(n)}
    for i, m in enumerate(dg.merges):
        depth_sums[n + i] = depth_sums[m.a] + depth_sums[m.b]

    total_pairs = 0
    accum = 0.0
    for i, m in enumerate(dg.merges):
        v = n + i
        for cls in counts[v]:
            ca, cb = counts[m.a][cls], counts[m.b][cls]
            cross = ca * cb
            if cross:
                pair_depth_sum = (cb * depth_sums[m.a][cls]
                                  + ca * depth_sums[m.b][cls])
                accum += pair_depth_sum - 2 * depth[v] * cross
                total_pairs += cross
    if total_pairs == 0:
        raise ValueError("no class has two or more leaves; distance is undefined")
    return accum / total_pairs
