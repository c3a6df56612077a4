"""Synthetic planted-genus corpus generator.

Each genus owns a disjoint set of reordering templates; languages inside a
genus share those templates with slightly perturbed mixing rates. Word
choice is drawn from one shared vocabulary for every language, and every
language also emits monotone filler sentences (including monotone twins
of all template shapes) at language-specific, genus-independent rates. As
a result only the reordering extractors see the genus signal: word-pair
features see identical noise everywhere and CFG productions are dominated
by the filler mix.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .corpus import format_record
from .treebank import parse_bracketed

__all__ = ["Template", "REORDERING_TEMPLATES", "FILLER_TEMPLATES",
           "SynthCorpus", "generate_corpus"]


@dataclass(frozen=True)
class Template:
    name: str
    l2_shape: str
    l1_shape: str
    align: str
    slots: int
    t2s_rule: str | None = None
    t2t_pattern: str | None = None


REORDERING_TEMPLATES = (
    Template(
        "adverb_verb",
        "(VP (VB {0}) (ADVP (RB {1})) (NP (NNS {2})))",
        "(VP (ADVP (RB {1})) (VP (VB {0}) (NP (NNS {2}))))",
        "0-1 1-0 2-2", 3,
        "(VP (VB x0) (ADVP x1) (NP x2)) ||| x1 x0 x2",
        "(VP (VB x0) (ADVP x1) (NP x2)) ||| (VP (ADVP x1) (VP (VB x0) (NP x2)))"),
    Template(
        "noun_compound",
        "(NP (NN {0}) (NN {1}))",
        "(NP (NN {1}) (NN {0}))",
        "0-1 1-0", 2,
        "(NP (NN x0) (NN x1)) ||| x1 x0",
        "(NP (NN x0) (NN x1)) ||| (NP (NN x1) (NN x0))"),
    Template(
        "modal_fronting",
        "(S (NP (PRP {0})) (VP (MD {1}) (VP (VB {2}))))",
        "(SQ (MD {1}) (NP (PRP {0})) (VP (VB {2})))",
        "0-1 1-0 2-2", 3,
        "(S (NP x0) (VP (MD x1) (VP x2))) ||| x1 x0 x2",
        "(S (NP x0) (VP (MD x1) (VP x2))) ||| (SQ (MD x1) (NP x0) (VP x2))"),
    Template(
        "np_pp_flip",
        "(NP (NP (NN {0})) (PP (IN {1})))",
        "(NP (NP (IN {1})) (NN {0}))",
        "0-1 1-0", 2,
        "(NP (NP x0) (PP x1)) ||| x1 x0",
        "(NP (NP x0) (PP x1)) ||| (NP (NP x1) (NN x0))"),
    Template(
        "adjective_postposition",
        "(NP (JJ {0}) (NN {1}))",
        "(NP (NN {1}) (JJ {0}))",
        "0-1 1-0", 2,
        "(NP (JJ x0) (NN x1)) ||| x1 x0",
        "(NP (JJ x0) (NN x1)) ||| (NP (NN x1) (JJ x0))"),
    Template(
        "verb_final",
        "(S (NP (PRP {0})) (VP (VB {1}) (NP (NN {2}))))",
        "(S (NP (PRP {0})) (VP (NP (NN {2})) (VB {1})))",
        "0-0 1-2 2-1", 3,
        "(VP (VB x0) (NP x1)) ||| x1 x0",
        "(VP (VB x0) (NP x1)) ||| (VP (NP x1) (VB x0))"),
    Template(
        "pp_fronting",
        "(VP (VB {0}) (PP (IN {1}) (NP (NN {2}))))",
        "(VP (PP (IN {1}) (NP (NN {2}))) (VB {0}))",
        "0-2 1-0 2-1", 3,
        "(VP (VB x0) (PP x1)) ||| x1 x0",
        "(VP (VB x0) (PP x1)) ||| (VP (PP x1) (VB x0))"),
    Template(
        "determiner_swap",
        "(NP (DT {0}) (NN {1}))",
        "(NP (NN {1}) (DT {0}))",
        "0-1 1-0", 2,
        "(NP (DT x0) (NN x1)) ||| x1 x0",
        "(NP (DT x0) (NN x1)) ||| (NP (NN x1) (DT x0))"),
)

_GENERIC_FILLERS = (
    Template("f_intransitive",
             "(S (NP (PRP {0})) (VP (VBP {1})))", None, "0-0 1-1", 2),
    Template("f_transitive",
             "(S (NP (PRP {0})) (VP (VBP {1}) (NP (NN {2}))))", None,
             "0-0 1-1 2-2", 3),
    Template("f_det_noun_verb",
             "(S (NP (DT {0}) (NN {1})) (VP (VBD {2})))", None,
             "0-0 1-1 2-2", 3),
    Template("f_copula_adj",
             "(S (NP (NN {0})) (VP (VBZ {1}) (ADJP (JJ {2}))))", None,
             "0-0 1-1 2-2", 3),
    Template("f_verb_object",
             "(VP (VB {0}) (NP (DT {1}) (NN {2})))", None, "0-0 1-1 2-2", 3),
    Template("f_pp_sentence",
             "(S (PP (IN {0}) (NP (NN {1}))) (NP (PRP {2})) (VP (VBP {3})))",
             None, "0-0 1-1 2-2 3-3", 4),
)

# monotone twins of every reordering shape: their CFG productions occur in
# every language, so tree shape alone cannot give the genus away
FILLER_TEMPLATES = _GENERIC_FILLERS + tuple(
    Template(f"f_{t.name}", t.l2_shape, None,
             " ".join(f"{i}-{i}" for i in range(t.slots)), t.slots)
    for t in REORDERING_TEMPLATES)

_SYLLABLES = tuple(c + v for c in "bdgklmnprst" for v in "aeo")
VOCABULARY = tuple(a + b for a, b in itertools.islice(
    itertools.product(_SYLLABLES, repeat=2), 0, 40 * 27, 27))


@dataclass
class SynthCorpus:
    lines: list[str]
    genus_labels: dict[str, str]
    manifest: dict


def _make_record(lang: str, template: Template, words) -> str:
    l2_text = template.l2_shape.format(*words)
    l1_shape = template.l1_shape or template.l2_shape
    l1_text = l1_shape.format(*words)
    l2_tokens = parse_bracketed(l2_text).tokens
    l1_tokens = parse_bracketed(l1_text).tokens
    return format_record(lang, l2_tokens, l1_tokens, l2_text, l1_text,
                         template.align)


def generate_corpus(n_genera: int, langs_per_genus, pairs_per_lang: int,
                    seed: int) -> SynthCorpus:
    """Build a reproducible corpus whose only genus signal is the mix of
    reordering templates.

    ``langs_per_genus`` is an int or one int per genus. Raises when more
    genera are requested than there are disjoint template sets.
    """
    if isinstance(langs_per_genus, int):
        langs_per_genus = [langs_per_genus] * n_genera
    langs_per_genus = list(langs_per_genus)
    if len(langs_per_genus) != n_genera:
        raise ValueError("langs_per_genus must give one count per genus")
    if n_genera < 1 or pairs_per_lang < 1 or min(langs_per_genus) < 1:
        raise ValueError("all counts must be >= 1")
    if n_genera > len(REORDERING_TEMPLATES):
        raise ValueError(
            f"at most {len(REORDERING_TEMPLATES)} genera are supported")

    rng = random.Random(seed)
    # deal templates round-robin so every genus owns a disjoint set
    owned: list[list[Template]] = [[] for _ in range(n_genera)]
    for i, t in enumerate(REORDERING_TEMPLATES):
        owned[i % n_genera].append(t)

    lines: list[str] = []
    genus_labels: dict[str, str] = {}
    genus_info: dict[str, dict] = {}
    for g in range(n_genera):
        genus = f"genus{g + 1}"
        langs = [f"g{g + 1}l{k + 1}" for k in range(langs_per_genus[g])]
        genus_info[genus] = {"languages": langs,
                             "templates": [t.name for t in owned[g]]}
        for lang in langs:
            genus_labels[lang] = genus
            reorder_rate = 0.35 + 0.1 * rng.random()
            base = 1.0 / len(owned[g])
            tmpl_weights = [base * (1.0 + 0.5 * (rng.random() - 0.5))
                            for _ in owned[g]]
            filler_weights = [rng.random() + 0.05 for _ in FILLER_TEMPLATES]
            for _ in range(pairs_per_lang):
                if rng.random() < reorder_rate:
                    tmpl = rng.choices(owned[g], weights=tmpl_weights)[0]
                else:
                    tmpl = rng.choices(FILLER_TEMPLATES,
                                       weights=filler_weights)[0]
                words = [rng.choice(VOCABULARY) for _ in range(tmpl.slots)]
                lines.append(_make_record(lang, tmpl, words))

    manifest = {
        "seed": seed,
        "pairs_per_lang": pairs_per_lang,
        "genera": genus_info,
        "template_rules": {
            t.name: {"t2s": t.t2s_rule, "t2t": t.t2t_pattern}
            for t in REORDERING_TEMPLATES},
    }
    return SynthCorpus(lines, genus_labels, manifest)
