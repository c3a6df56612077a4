"""Language-pattern matrix, PCA reduction, Euclidean distances, and
agglomerative clustering into a dendrogram."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = ["LangPatternMatrix", "Dendrogram", "Merge", "build_matrix",
           "pca_reduce", "distance_matrix", "cluster", "to_newick",
           "parse_newick", "write_matrix_tsv", "read_matrix_tsv", "LINKAGES"]

LINKAGES = ("single", "complete", "average", "ward")


class LangPatternMatrix:
    """Feature-by-language count matrix plus per-language relative
    frequencies (columns of ``normalized`` sum to one)."""

    def __init__(self, languages, features, counts: np.ndarray):
        self.languages: tuple[str, ...] = tuple(languages)
        self.features: tuple[str, ...] = tuple(features)
        self.counts = np.asarray(counts, dtype=np.int64)
        if self.counts.shape != (len(self.features), len(self.languages)):
            raise ValueError("counts shape does not match feature/language lists")
        if (self.counts < 0).any():
            raise ValueError("negative count")
        totals = self.counts.sum(axis=0)
        zero = [self.languages[j] for j in np.nonzero(totals == 0)[0]]
        if zero:
            raise ValueError(f"languages with zero feature occurrences: {zero}")
        self.normalized = self.counts.astype(np.float64) / totals.astype(np.float64)

    @property
    def shape(self):
        return self.counts.shape


def build_matrix(lang_features, min_count: int = 2) -> LangPatternMatrix:
    """Assemble the matrix from per-language feature multisets.

    Features whose total count across languages is below ``min_count`` are
    pruned before normalization. Feature order is first occurrence,
    scanning languages alphabetically.
    """
    languages = sorted(lang_features)
    if len(languages) < 2:
        raise ValueError("need at least two languages")
    features: list[str] = []
    seen: set[str] = set()
    for lang in languages:
        for feat in lang_features[lang]:
            if feat not in seen:
                seen.add(feat)
                features.append(feat)
    counts = np.zeros((len(features), len(languages)), dtype=np.int64)
    index = {f: i for i, f in enumerate(features)}
    for j, lang in enumerate(languages):
        for feat, n in lang_features[lang].items():
            counts[index[feat], j] = n
    keep = counts.sum(axis=1) >= min_count
    features = [f for f, k in zip(features, keep) if k]
    counts = counts[keep]
    if not features:
        raise ValueError(f"no feature reaches min_count={min_count}")
    return LangPatternMatrix(languages, features, counts)


def write_matrix_tsv(path, matrix: LangPatternMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature\t" + "\t".join(matrix.languages) + "\n")
        for i, feat in enumerate(matrix.features):
            row = "\t".join(str(int(n)) for n in matrix.counts[i])
            fh.write(f"{feat}\t{row}\n")


def read_matrix_tsv(path) -> LangPatternMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if len(header) < 3 or header[0] != "feature":
            raise ValueError(f"{path}: not a matrix TSV (bad header)")
        languages = header[1:]
        features: list[str] = []
        rows: list[list[int]] = []
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(languages) + 1:
                raise ValueError(f"{path}: row width mismatch")
            features.append(parts[0])
            rows.append([int(x) for x in parts[1:]])
    return LangPatternMatrix(languages, features,
                             np.array(rows, dtype=np.int64))


def pca_reduce(matrix: LangPatternMatrix, k: int | None = None,
               variance: float | None = None,
               use_counts: bool = False) -> np.ndarray:
    """Project languages onto principal axes of the (normalized) matrix.

    Give either a component count ``k`` (1 <= k <= n_languages - 1) or an
    explained-variance threshold; the default keeps 0.95 of the variance.
    Axis signs follow the convention that the largest-magnitude feature
    loading of each axis is positive.
    """
    if k is not None and variance is not None:
        raise ValueError("give either k or variance, not both")
    data = matrix.counts.astype(np.float64) if use_counts else matrix.normalized
    x = data.T  # one row per language
    n = x.shape[0]
    max_k = n - 1
    if k is not None:
        if k <= 0:
            raise ValueError(f"component count must be positive, got {k}")
        if k > max_k:
            raise ValueError(f"component count {k} exceeds n_languages-1={max_k}")
    centered = x - x.mean(axis=0)
    if not centered.any():
        raise ValueError("degenerate input: all languages identical (zero variance)")
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    for m in range(len(s)):
        i = int(np.argmax(np.abs(vt[m])))
        if vt[m, i] < 0:
            vt[m] = -vt[m]
            u[:, m] = -u[:, m]
    if k is None:
        threshold = 0.95 if variance is None else variance
        if not 0 < threshold <= 1:
            raise ValueError(f"variance threshold must be in (0, 1], got {threshold}")
        ratios = (s ** 2) / (s ** 2).sum()
        cum = np.cumsum(ratios)
        k = int(np.searchsorted(cum, threshold - 1e-12) + 1)
        k = min(k, max_k)
    coords = u[:, :k] * s[:k]
    if coords.shape[1] < k:  # rank below the requested dimensionality
        pad = np.zeros((n, k - coords.shape[1]))
        coords = np.hstack([coords, pad])
    return coords


def distance_matrix(coords: np.ndarray) -> np.ndarray:
    """Symmetric Euclidean distance matrix with an exactly zero diagonal."""
    coords = np.asarray(coords, dtype=np.float64)
    n = coords.shape[0]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist = float(np.sqrt(((coords[i] - coords[j]) ** 2).sum()))
            d[i, j] = d[j, i] = dist
    return d


@dataclass(frozen=True)
class Merge:
    a: int
    b: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree. Leaves are cluster ids 0..n-1 in ``labels``
    order; merge i creates cluster id n+i."""

    labels: tuple[str, ...]
    merges: tuple[Merge, ...]

    @property
    def n_leaves(self) -> int:
        return len(self.labels)

    def children(self) -> dict[int, tuple[int, int]]:
        n = self.n_leaves
        return {n + i: (m.a, m.b) for i, m in enumerate(self.merges)}

    def heights(self) -> dict[int, float]:
        n = self.n_leaves
        h = {i: 0.0 for i in range(n)}
        for i, m in enumerate(self.merges):
            h[n + i] = m.height
        return h

    @property
    def root(self) -> int:
        return self.n_leaves + len(self.merges) - 1


def _lw_update(linkage, d_ak, d_bk, d_ab, na, nb, nk):
    if linkage == "single":
        return min(d_ak, d_bk)
    if linkage == "complete":
        return max(d_ak, d_bk)
    if linkage == "average":
        return (na * d_ak + nb * d_bk) / (na + nb)
    if linkage == "ward":
        t = na + nb + nk
        sq = ((na + nk) * d_ak ** 2 + (nb + nk) * d_bk ** 2 - nk * d_ab ** 2) / t
        return float(np.sqrt(max(sq, 0.0)))
    raise ValueError(f"unknown linkage {linkage!r}")


def cluster(d: np.ndarray, linkage: str = "average",
            labels=None) -> Dendrogram:
    """Agglomerative clustering with Lance-Williams updates.

    Ties on the minimum inter-cluster distance break toward the
    lexicographically smallest (min id, max id) pair, so the output is
    deterministic.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; pick one of {LINKAGES}")
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise ValueError("distance matrix must be square")
    if n < 2:
        raise ValueError("need at least two points to cluster")
    if not np.allclose(d, d.T, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if labels is None:
        labels = tuple(f"item{i}" for i in range(n))
    labels = tuple(labels)
    if len(labels) != n:
        raise ValueError("label count does not match matrix size")

    dist: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(d[i, j])
    sizes = {i: 1 for i in range(n)}
    active = list(range(n))
    merges: list[Merge] = []
    next_id = n
    while len(active) > 1:
        best = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        (a, b), height = best
        na, nb = sizes[a], sizes[b]
        new = next_id
        next_id += 1
        for k in active:
            if k in (a, b):
                continue
            d_ak = dist[(min(a, k), max(a, k))]
            d_bk = dist[(min(b, k), max(b, k))]
            dist[(k, new)] = _lw_update(linkage, d_ak, d_bk, height,
                                        na, nb, sizes[k])
        for k in active:
            if k != a:
                dist.pop((min(a, k), max(a, k)), None)
            if k != b:
                dist.pop((min(b, k), max(b, k)), None)
        dist.pop((a, b), None)
        active = [k for k in active if k not in (a, b)] + [new]
        sizes[new] = na + nb
        merges.append(Merge(a, b, height, na + nb))
    return Dendrogram(labels, tuple(merges))


_SAFE_LABEL = re.compile(r"^[A-Za-z0-9_.|-]+$")


def _newick_label(label: str) -> str:
    if _SAFE_LABEL.match(label):
        return label
    return "'" + label.replace("'", "''") + "'"


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def to_newick(dg: Dendrogram) -> str:
    """Newick text with branch lengths (leaves sit at height zero);
    children are ordered by cluster id."""
    n = dg.n_leaves
    heights = dg.heights()
    text = {i: _newick_label(dg.labels[i]) for i in range(n)}
    for i, m in enumerate(dg.merges):
        parent = n + i
        parts = []
        for c in (m.a, m.b):
            parts.append(f"{text[c]}:{_fmt(heights[parent] - heights[c])}")
        text[parent] = "(" + ",".join(parts) + ")"
    return text[dg.root] + ";"


def parse_newick(text: str) -> Dendrogram:
    """Parse a binary Newick tree back into a dendrogram.

    Heights are rebuilt from branch lengths with leaves pinned at zero;
    inconsistent child heights (beyond 1e-6) are an error.
    """
    text = text.strip()
    if not text.endswith(";"):
        raise ValueError("Newick text must end with ';'")
    s = text[:-1]
    pos = 0
    labels: list[str] = []
    entries: list = []  # ("leaf", label) | ("merge", left, right)

    def parse_node():
        nonlocal pos
        if pos < len(s) and s[pos] == "(":
            pos += 1
            left = parse_node()
            left_len = parse_branch_length()
            if pos >= len(s) or s[pos] != ",":
                raise ValueError(f"expected ',' at offset {pos}")
            pos += 1
            right = parse_node()
            right_len = parse_branch_length()
            if pos >= len(s) or s[pos] != ")":
                raise ValueError(f"expected ')' at offset {pos} (binary trees only)")
            pos += 1
            entries.append(("merge", left, left_len, right, right_len))
            return len(entries) - 1
        label, _ = parse_label()
        labels.append(label)
        entries.append(("leaf", label))
        return len(entries) - 1

    def parse_label():
        nonlocal pos
        if pos < len(s) and s[pos] == "'":
            pos += 1
            out = []
            while pos < len(s):
                if s[pos] == "'" and pos + 1 < len(s) and s[pos + 1] == "'":
                    out.append("'")
                    pos += 2
                elif s[pos] == "'":
                    pos += 1
                    return "".join(out), True
                else:
                    out.append(s[pos])
                    pos += 1
            raise ValueError("unterminated quoted label")
        start = pos
        while pos < len(s) and s[pos] not in "():,;":
            pos += 1
        if pos == start:
            raise ValueError(f"empty label at offset {pos}")
        return s[start:pos], False

    def parse_branch_length():
        nonlocal pos
        if pos < len(s) and s[pos] == ":":
            pos += 1
            start = pos
            while pos < len(s) and s[pos] not in "(),;":
                pos += 1
            return float(s[start:pos])
        return 0.0

    root_entry = parse_node()
    if pos != len(s):
        raise ValueError(f"trailing content at offset {pos}")
    if not any(e[0] == "merge" for e in entries):
        raise ValueError("dendrogram needs at least two leaves")

    leaf_ids: dict[int, int] = {}
    next_leaf = 0
    for i, e in enumerate(entries):
        if e[0] == "leaf":
            leaf_ids[i] = next_leaf
            next_leaf += 1

    merges: list[Merge] = []
    info: dict[int, tuple[int, float, int]] = {}  # entry -> (cluster id, height, size)

    def build(entry: int):
        e = entries[entry]
        if e[0] == "leaf":
            info[entry] = (leaf_ids[entry], 0.0, 1)
            return
        _, left, left_len, right, right_len = e
        build(left)
        build(right)
        la, lh, ls = info[left]
        ra, rh, rs = info[right]
        h_left = lh + left_len
        h_right = rh + right_len
        if abs(h_left - h_right) > 1e-6:
            raise ValueError(
                f"inconsistent heights under one node: {h_left} vs {h_right}")
        cid = next_leaf + len(merges)
        merges.append(Merge(min(la, ra), max(la, ra), h_left, ls + rs))
        info[entry] = (cid, h_left, ls + rs)

    build(root_entry)
    return Dendrogram(tuple(labels), tuple(merges))
