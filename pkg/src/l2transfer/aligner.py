"""Word alignments: Pharaoh parsing, span projection, and a lexical-translation
EM aligner used as a fallback when the corpus ships without alignments."""

from __future__ import annotations

import math
from collections import defaultdict

__all__ = [
    "Alignment", "parse_pharaoh", "projected_targets",
    "train_model1", "align_model1", "Model1Table", "NULL_TOKEN",
]

NULL_TOKEN = "<NULL>"


class Alignment:
    """Immutable set of (l2_index, l1_index) links."""

    __slots__ = ("links", "_by_l2")

    def __init__(self, links):
        self.links: frozenset[tuple[int, int]] = frozenset(links)
        for i, j in self.links:
            if i < 0 or j < 0:
                raise ValueError(f"negative alignment index in link {i}-{j}")
        by_l2: dict[int, set[int]] = defaultdict(set)
        for i, j in self.links:
            by_l2[i].add(j)
        self._by_l2 = {i: frozenset(js) for i, js in by_l2.items()}

    def targets(self, l2_index: int) -> frozenset[int]:
        """L1 indices aligned to one L2 token (empty if unaligned)."""
        return self._by_l2.get(l2_index, frozenset())

    def check_bounds(self, n_l2: int, n_l1: int) -> None:
        for i, j in self.links:
            if i >= n_l2 or j >= n_l1:
                raise ValueError(
                    f"alignment link {i}-{j} out of range for sentence "
                    f"lengths {n_l2}/{n_l1}")

    def intersect(self, other: "Alignment") -> "Alignment":
        return Alignment(self.links & other.links)

    def serialize(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in sorted(self.links))

    def __len__(self):
        return len(self.links)

    def __eq__(self, other):
        if not isinstance(other, Alignment):
            return NotImplemented
        return self.links == other.links

    def __hash__(self):
        return hash(self.links)

    def __repr__(self):
        return f"Alignment({self.serialize()!r})"


def parse_pharaoh(text: str) -> Alignment:
    """Parse whitespace-separated ``i-j`` link pairs (L2 index - L1 index)."""
    links = []
    for field in text.split():
        i, sep, j = field.partition("-")
        if not sep:
            raise ValueError(f"malformed alignment link {field!r}: missing '-'")
        try:
            links.append((int(i), int(j)))
        except ValueError:
            raise ValueError(f"malformed alignment link {field!r}: "
                             "indices must be integers") from None
    return Alignment(links)


def projected_targets(alignment: Alignment, l2_range: tuple[int, int]):
    """Project an L2 token range onto the L1 side.

    Returns ``(sets, p)`` where ``sets[k]`` is the full L1 index set of L2
    token ``b + k`` and ``p`` is the representative sequence: the minimum
    aligned index per token, skipping unaligned tokens.
    """
    b, e = l2_range
    if b < 0 or e < b:
        raise ValueError(f"invalid L2 range [{b}, {e}]")
    sets = [alignment.targets(i) for i in range(b, e + 1)]
    p = [min(s) for s in sets if s]
    return sets, p


# --- fallback lexical-translation aligner -------------------------------

class Model1Table:
    """Translation probabilities t(l1_word | l2_word) with per-iteration
    corpus log-likelihoods recorded during training."""

    def __init__(self, probs, log_likelihoods):
        self.probs: dict[str, dict[str, float]] = probs
        self.log_likelihoods: list[float] = list(log_likelihoods)

    def prob(self, l2_word: str, l1_word: str) -> float:
        return self.probs.get(l2_word, {}).get(l1_word, 0.0)

    def dump_tsv(self, fh) -> None:
        for e in sorted(self.probs):
            row = self.probs[e]
            for f in sorted(row):
                fh.write(f"{e}\t{f}\t{row[f]!r}\n")


def _collect_corpus(pairs):
    corpus = []
    for l2, l1 in pairs:
        l2, l1 = list(l2), list(l1)
        if l2 and l1:
            corpus.append((l2, l1))
    if not corpus:
        raise ValueError("empty corpus")
    return corpus


def initial_table(pairs) -> Model1Table:
    """Pre-EM table: uniform over the L1 words co-occurring with each L2
    word (the null token co-occurs with everything)."""
    corpus = _collect_corpus(pairs)
    cooc: dict[str, set[str]] = defaultdict(set)
    for l2, l1 in corpus:
        for f in l1:
            for e in [NULL_TOKEN] + l2:
                cooc[e].add(f)
    probs = {e: {f: 1.0 / len(fs) for f in fs} for e, fs in cooc.items()}
    return Model1Table(probs, [])


def train_model1(pairs, iterations: int) -> Model1Table:
    """EM for the classic lexical-translation model with a null source token.

    ``pairs`` is an iterable of (l2_tokens, l1_tokens); empty sentences are
    skipped. Rows of the returned table sum to one over the L1 words seen
    with each L2 word.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    corpus = _collect_corpus(pairs)
    probs = initial_table(corpus).probs

    lls: list[float] = []
    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        totals: dict[str, float] = defaultdict(float)
        ll = 0.0
        for l2, l1 in corpus:
            src = [NULL_TOKEN] + l2
            for f in l1:
                denom = sum(probs[e][f] for e in src)
                ll += math.log(denom / len(src))
                for e in src:
                    frac = probs[e][f] / denom
                    counts[e][f] += frac
                    totals[e] += frac
        lls.append(ll)
        probs = {e: {f: c / totals[e] for f, c in row.items()}
                 for e, row in counts.items()}
    return Model1Table(probs, lls)


def align_model1(table: Model1Table, l2_tokens, l1_tokens) -> Alignment:
    """Link each L1 token to its most probable L2 token; ties go to the
    lowest L2 index. A link is dropped when the null token is strictly
    more probable than every real token (or nothing has support)."""
    links = []
    for j, f in enumerate(l1_tokens):
        best_i, best_p = None, 0.0
        for i, e in enumerate(l2_tokens):
            p = table.prob(e, f)
            if p > best_p:
                best_i, best_p = i, p
        if best_i is not None and table.prob(NULL_TOKEN, f) <= best_p:
            links.append((best_i, j))
    return Alignment(links)
