"""Parallel learner/correction corpus: one JSON record per line.

Record schema::

    {"lang": str, "l2": [tok], "l1": [tok],
     "l2_tree": str, "l1_tree": str|null, "align": "i-j i-j ..."}

``l2`` is the learner sentence, ``l1`` its corrected counterpart;
``align`` uses Pharaoh notation with L2 indices first.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .aligner import Alignment, parse_pharaoh
from .treebank import ConstTree, parse_bracketed

__all__ = ["SentencePair", "CorpusStats", "CorpusReader", "RecordError",
           "parse_record", "format_record"]


class RecordError(ValueError):
    """A corpus line failed validation."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class SentencePair:
    lang: str
    l2_tokens: tuple[str, ...]
    l1_tokens: tuple[str, ...]
    l2_tree: ConstTree
    l1_tree: ConstTree | None
    alignment: Alignment
    line_no: int = 0


@dataclass
class CorpusStats:
    min_pairs: int
    pair_counts: Counter = field(default_factory=Counter)
    invalid: int = 0
    total: int = 0

    @property
    def retained_languages(self) -> list[str]:
        return sorted(l for l, c in self.pair_counts.items() if c >= self.min_pairs)

    def to_dict(self) -> dict:
        return {
            "total_pairs": self.total,
            "invalid_records": self.invalid,
            "min_pairs": self.min_pairs,
            "pair_counts": dict(sorted(self.pair_counts.items())),
            "retained_languages": self.retained_languages,
        }


def parse_record(line: str, line_no: int = 0,
                 strip_after: str | None = None) -> SentencePair:
    """Validate one corpus line and build the record, or raise RecordError.

    ``strip_after`` truncates tree labels at the first of the given
    characters (functional-tag stripping), off by default.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc}", line_no) from None
    if not isinstance(obj, dict):
        raise RecordError("record is not a JSON object", line_no)
    try:
        lang = obj["lang"]
        l2 = obj["l2"]
        l1 = obj["l1"]
        l2_tree_text = obj["l2_tree"]
        align_text = obj["align"]
    except KeyError as exc:
        raise RecordError(f"missing field {exc.args[0]!r}", line_no) from None
    l1_tree_text = obj.get("l1_tree")

    if not isinstance(lang, str) or not lang:
        raise RecordError("'lang' must be a non-empty string", line_no)
    for name, toks in (("l2", l2), ("l1", l1)):
        if (not isinstance(toks, list) or not toks
                or not all(isinstance(t, str) and t for t in toks)):
            raise RecordError(f"'{name}' must be a non-empty list of tokens",
                              line_no)
    try:
        l2_tree = parse_bracketed(l2_tree_text, strip_after)
        l1_tree = (parse_bracketed(l1_tree_text, strip_after)
                   if l1_tree_text is not None else None)
        alignment = parse_pharaoh(align_text) if align_text else Alignment(())
    except ValueError as exc:
        raise RecordError(str(exc), line_no) from None

    if l2_tree.n_tokens != len(l2):
        raise RecordError(
            f"l2_tree has {l2_tree.n_tokens} leaves for {len(l2)} tokens", line_no)
    if l1_tree is not None and l1_tree.n_tokens != len(l1):
        raise RecordError(
            f"l1_tree has {l1_tree.n_tokens} leaves for {len(l1)} tokens", line_no)
    try:
        alignment.check_bounds(len(l2), len(l1))
    except ValueError as exc:
        raise RecordError(str(exc), line_no) from None

    return SentencePair(lang, tuple(l2), tuple(l1), l2_tree, l1_tree,
                        alignment, line_no)


def format_record(lang: str, l2_tokens, l1_tokens, l2_tree: str,
                  l1_tree: str | None, align: str) -> str:
    """Serialize one record to its canonical JSON line (no trailing newline)."""
    return json.dumps({
        "lang": lang,
        "l2": list(l2_tokens),
        "l1": list(l1_tokens),
        "l2_tree": l2_tree,
        "l1_tree": l1_tree,
        "align": align,
    }, ensure_ascii=False, separators=(", ", ": "))


class CorpusReader:
    """Streaming reader; ``stats`` is usable once iteration finishes.

    Records that fail validation are skipped and counted, or raised in
    strict mode. Languages under ``min_pairs`` still yield records (the
    extraction stage drops them) but are absent from
    ``stats.retained_languages``.
    """

    def __init__(self, path, min_pairs: int = 10000, strict: bool = False,
                 strip_after: str | None = None):
        self.path = path
        self.strict = strict
        self.strip_after = strip_after
        self.stats = CorpusStats(min_pairs=min_pairs)

    def __iter__(self):
        with open(self.path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    pair = parse_record(line, line_no, self.strip_after)
                except RecordError:
                    if self.strict:
                        raise
                    self.stats.invalid += 1
                    continue
                self.stats.total += 1
                self.stats.pair_counts[pair.lang] += 1
                yield pair
