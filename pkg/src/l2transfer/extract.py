"""Corpus-wide feature extraction: fan records out to the selected feature
families and aggregate namespaced counts per language."""

from __future__ import annotations

import itertools
from collections import Counter
from multiprocessing import Pool

from . import baselines, t2s, t2t
from .corpus import CorpusStats, RecordError, SentencePair, parse_record

__all__ = ["FAMILIES", "pair_features", "extract_corpus",
           "write_feature_tsv", "read_feature_tsv"]

_CHUNK_LINES = 512


def _t2s_features(pair: SentencePair) -> Counter:
    rules = t2s.extract_minimal_rules(pair.l2_tree, len(pair.l1_tokens),
                                      pair.alignment)
    return Counter(f"t2s:{r.canonical}" for r in rules)


def _t2t_features(pair: SentencePair) -> Counter:
    return Counter(f"t2t:{p.canonical}" for p in t2t.extract_all(pair))


FAMILIES = {
    "wp": baselines.word_pair_features,
    "cfg": baselines.cfg_features,
    "t2s": _t2s_features,
    "t2t": _t2t_features,
}


def pair_features(pair: SentencePair, families) -> Counter:
    """Union of the selected families' feature multisets for one record."""
    feats: Counter = Counter()
    for fam in families:
        feats.update(FAMILIES[fam](pair))
    return feats


def _process_chunk(args):
    lines, families, strict, strip_after = args
    counts: dict[str, Counter] = {}
    pair_counts: Counter = Counter()
    invalid = 0
    for line_no, line in lines:
        if not line.strip():
            continue
        try:
            pair = parse_record(line, line_no, strip_after)
        except RecordError:
            if strict:
                raise
            invalid += 1
            continue
        pair_counts[pair.lang] += 1
        try:
            feats = pair_features(pair, families)
        except ValueError as exc:
            raise RecordError(str(exc), line_no) from None
        counts.setdefault(pair.lang, Counter()).update(feats)
    return counts, pair_counts, invalid


def _chunks(path):
    with open(path, encoding="utf-8") as fh:
        numbered = enumerate(fh, 1)
        while True:
            block = list(itertools.islice(numbered, _CHUNK_LINES))
            if not block:
                return
            yield block


def extract_corpus(path, families, min_pairs: int = 10000, strict: bool = False,
                   workers: int = 1, strip_after: str | None = None):
    """Stream a corpus file and count features per language.

    Returns ``(lang_features, stats)``. Languages under ``min_pairs`` are
    dropped from ``lang_features`` but stay visible in ``stats``. Feature
    counts are independent of ``workers`` because chunk merges commute.
    """
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown feature family {fam!r}")
    counts: dict[str, Counter] = {}
    stats = CorpusStats(min_pairs=min_pairs)
    tasks = ((block, tuple(families), strict, strip_after)
             for block in _chunks(path))
    if workers > 1:
        with Pool(workers) as pool:
            results = pool.imap(_process_chunk, tasks)
            _merge_results(results, counts, stats)
    else:
        _merge_results(map(_process_chunk, tasks), counts, stats)
    retained = set(stats.retained_languages)
    lang_features = {lang: c for lang, c in counts.items() if lang in retained}
    return lang_features, stats


def _merge_results(results, counts, stats):
    for chunk_counts, pair_counts, invalid in results:
        for lang, c in chunk_counts.items():
            counts.setdefault(lang, Counter()).update(c)
        stats.pair_counts.update(pair_counts)
        stats.invalid += invalid
        stats.total += sum(pair_counts.values())


def write_feature_tsv(path, lang_features) -> None:
    """``lang<TAB>feature<TAB>count`` rows: languages alphabetical, features
    by descending count then name."""
    with open(path, "w", encoding="utf-8") as fh:
        for lang in sorted(lang_features):
            feats = lang_features[lang]
            for feat, n in sorted(feats.items(), key=lambda kv: (-kv[1], kv[0])):
                fh.write(f"{lang}\t{feat}\t{n}\n")


def read_feature_tsv(path) -> dict[str, Counter]:
    lang_features: dict[str, Counter] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected 3 tab-separated "
                                 f"fields, got {len(parts)}")
            lang, feat, n = parts
            lang_features.setdefault(lang, Counter())[feat] += int(n)
    return lang_features
