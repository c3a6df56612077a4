"""Command-line pipeline driver.

Subcommands: extract, matrix, cluster, eval, pipeline, synth, align, plot.
Stages communicate only through the documented file formats, so each
subcommand can be rerun on the outputs of an earlier one.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, fields

from . import aligner, evalmetrics, extract, phylo, svg, synth
from .corpus import CorpusReader

DEFAULT_FAMILIES = ("wp", "cfg", "t2s", "t2t")


@dataclass
class RunConfig:
    corpus: str | None = None
    labels: str | None = None
    families: tuple[str, ...] = ("t2s", "t2t")
    min_pairs: int = 10000
    min_count: int = 2
    pca_components: int | None = None
    pca_variance: float = 0.95
    pca_input: str = "freq"
    linkage: str = "average"
    out_dir: str = "out"
    strict: bool = False
    workers: int = 1
    strip_after: str | None = None

    def validate(self):
        if not self.families:
            raise SystemExit("error: at least one feature family must be selected")
        for fam in self.families:
            if fam not in DEFAULT_FAMILIES:
                raise SystemExit(f"error: unknown feature family {fam!r}")
        if self.linkage not in phylo.LINKAGES:
            raise SystemExit(f"error: unknown linkage {self.linkage!r}")
        if self.pca_input not in ("freq", "counts"):
            raise SystemExit("error: pca_input must be 'freq' or 'counts'")

    def require_files(self, *names):
        for name in names:
            path = getattr(self, name)
            if not path:
                raise SystemExit(f"error: --{name} is required")
            if not os.path.exists(path):
                raise SystemExit(f"error: {name} file not found: {path}")


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        for key, value in data.items():
            if key not in known:
                raise SystemExit(f"error: unknown config key {key!r}")
            if key == "families":
                value = tuple(value)
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            if f.name == "families":
                value = tuple(x for x in value.split(",") if x)
            setattr(cfg, f.name, value)
    cfg.validate()
    return cfg


def write_sidecar(out_dir: str, command: str, cfg: RunConfig) -> None:
    payload = {"command": command, "config": asdict(cfg)}
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    payload["config_sha256"] = hashlib.sha256(canon.encode()).hexdigest()
    path = os.path.join(out_dir, "run_config.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _split_by_family(lang_features):
    split: dict[str, dict] = {}
    for lang, feats in lang_features.items():
        for feat, n in feats.items():
            fam = feat.split(":", 1)[0]
            split.setdefault(fam, {}).setdefault(lang, {})[feat] = n
    return split


# --- subcommands ---------------------------------------------------------

def cmd_extract(args) -> int:
    cfg = load_config(args)
    cfg.require_files("corpus")
    os.makedirs(cfg.out_dir, exist_ok=True)
    lang_features, stats = extract.extract_corpus(
        cfg.corpus, cfg.families, min_pairs=cfg.min_pairs,
        strict=cfg.strict, workers=cfg.workers, strip_after=cfg.strip_after)
    if stats.total == 0:
        raise SystemExit("error: no records in corpus")
    by_family = _split_by_family(lang_features)
    for fam in cfg.families:
        path = os.path.join(cfg.out_dir, f"features.{fam}.tsv")
        extract.write_feature_tsv(path, by_family.get(fam, {}))
    _write_json(os.path.join(cfg.out_dir, "corpus_stats.json"), stats.to_dict())
    write_sidecar(cfg.out_dir, "extract", cfg)
    print(json.dumps(stats.to_dict(), sort_keys=True))
    return 0


def cmd_matrix(args) -> int:
    lang_features = extract.read_feature_tsv(args.features)
    matrix = phylo.build_matrix(lang_features, min_count=args.min_count)
    phylo.write_matrix_tsv(args.out, matrix)
    return 0


def _cluster_matrix(matrix, cfg: RunConfig) -> phylo.Dendrogram:
    coords = phylo.pca_reduce(
        matrix, k=cfg.pca_components,
        variance=None if cfg.pca_components is not None else cfg.pca_variance,
        use_counts=cfg.pca_input == "counts")
    dist = phylo.distance_matrix(coords)
    return phylo.cluster(dist, linkage=cfg.linkage, labels=matrix.languages)


def cmd_cluster(args) -> int:
    cfg = load_config(args)
    matrix = phylo.read_matrix_tsv(args.matrix)
    dendro = _cluster_matrix(matrix, cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(phylo.to_newick(dendro) + "\n")
    return 0


def _metrics(dendro, labels, name) -> dict:
    return {
        "feature_set": name,
        "purity": evalmetrics.dendrogram_purity(dendro, labels),
        "leaf_pair_distance": evalmetrics.leaf_pair_distance(dendro, labels),
    }


def cmd_eval(args) -> int:
    with open(args.newick, encoding="utf-8") as fh:
        dendro = phylo.parse_newick(fh.read())
    labels = evalmetrics.read_genus_labels(args.labels)
    name = args.name or os.path.splitext(os.path.basename(args.newick))[0]
    metrics = _metrics(dendro, labels, name)
    if args.out:
        _write_json(args.out, metrics)
    print(json.dumps(metrics, sort_keys=True))
    return 0


def cmd_plot(args) -> int:
    with open(args.newick, encoding="utf-8") as fh:
        dendro = phylo.parse_newick(fh.read())
    labels = evalmetrics.read_genus_labels(args.labels) if args.labels else {}
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg.render_svg(dendro, labels))
    return 0


def cmd_pipeline(args) -> int:
    cfg = load_config(args)
    cfg.require_files("corpus", "labels")
    os.makedirs(cfg.out_dir, exist_ok=True)
    genus_labels = evalmetrics.read_genus_labels(cfg.labels)

    lang_features, stats = extract.extract_corpus(
        cfg.corpus, cfg.families, min_pairs=cfg.min_pairs,
        strict=cfg.strict, workers=cfg.workers, strip_after=cfg.strip_after)
    if stats.total == 0:
        raise SystemExit("error: no records in corpus")
    by_family = _split_by_family(lang_features)
    _write_json(os.path.join(cfg.out_dir, "corpus_stats.json"), stats.to_dict())

    all_metrics = []
    failures = []
    for fam in cfg.families:
        try:
            feat_path = os.path.join(cfg.out_dir, f"features.{fam}.tsv")
            extract.write_feature_tsv(feat_path, by_family.get(fam, {}))
            lf = extract.read_feature_tsv(feat_path)
            matrix = phylo.build_matrix(lf, min_count=cfg.min_count)
            matrix_path = os.path.join(cfg.out_dir, f"{fam}.matrix.tsv")
            phylo.write_matrix_tsv(matrix_path, matrix)
            matrix = phylo.read_matrix_tsv(matrix_path)
            dendro = _cluster_matrix(matrix, cfg)
            newick_text = phylo.to_newick(dendro)
            with open(os.path.join(cfg.out_dir, f"{fam}.nwk"), "w",
                      encoding="utf-8") as fh:
                fh.write(newick_text + "\n")
            dendro = phylo.parse_newick(newick_text)
            with open(os.path.join(cfg.out_dir, f"{fam}.svg"), "w",
                      encoding="utf-8") as fh:
                fh.write(svg.render_svg(dendro, genus_labels))
            metrics = _metrics(dendro, genus_labels, fam)
            _write_json(os.path.join(cfg.out_dir, f"{fam}.metrics.json"), metrics)
            all_metrics.append(metrics)
        except (ValueError, OSError) as exc:
            failures.append(fam)
            print(f"pipeline: family {fam} failed: {exc}", file=sys.stderr)
    _write_json(os.path.join(cfg.out_dir, "metrics.json"), all_metrics)
    write_sidecar(cfg.out_dir, "pipeline", cfg)
    print(json.dumps(all_metrics, sort_keys=True))
    return 1 if failures and not all_metrics else 0


def cmd_synth(args) -> int:
    if "," in args.langs_per_genus:
        langs = [int(x) for x in args.langs_per_genus.split(",")]
    else:
        langs = int(args.langs_per_genus)
    corpus = synth.generate_corpus(args.genera, langs, args.pairs_per_lang,
                                   args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in corpus.lines:
            fh.write(line + "\n")
    if args.labels_out:
        with open(args.labels_out, "w", encoding="utf-8") as fh:
            for lang in sorted(corpus.genus_labels):
                fh.write(f"{lang}\t{corpus.genus_labels[lang]}\n")
    if args.manifest_out:
        _write_json(args.manifest_out, corpus.manifest)
    return 0


def cmd_align(args) -> int:
    pairs = []
    records = []
    with open(args.corpus, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            records.append(obj)
            pairs.append((obj["l2"], obj["l1"]))
    table = aligner.train_model1(pairs, args.iterations)
    reverse = None
    if args.symmetrize == "intersect":
        reverse = aligner.train_model1([(l1, l2) for l2, l1 in pairs],
                                       args.iterations)
    out_fh = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for obj, (l2, l1) in zip(records, pairs):
            alignment = aligner.align_model1(table, l2, l1)
            if reverse is not None:
                rev = aligner.align_model1(reverse, l1, l2)
                alignment = alignment.intersect(
                    aligner.Alignment({(i, j) for j, i in rev.links}))
            obj["align"] = alignment.serialize()
            out_fh.write(json.dumps(obj, ensure_ascii=False,
                                    separators=(", ", ": ")) + "\n")
    finally:
        if args.out:
            out_fh.close()
    if args.table_out:
        with open(args.table_out, "w", encoding="utf-8") as fh:
            table.dump_tsv(fh)
    return 0


# --- argument wiring -----------------------------------------------------

def _add_config_flags(p, with_pipeline_flags=True):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--corpus", help="corpus JSONL path")
    p.add_argument("--families",
                   help="comma list from wp,cfg,t2s,t2t (default t2s,t2t)")
    p.add_argument("--min-pairs", dest="min_pairs", type=int,
                   help="drop languages with fewer pairs (default 10000)")
    p.add_argument("--strict", action="store_const", const=True, default=None,
                   help="fail on invalid records instead of skipping")
    p.add_argument("--strip-after", dest="strip_after",
                   help="truncate tree labels at the first of these "
                        "characters, e.g. '-=|'")
    p.add_argument("--workers", type=int, help="extraction processes")
    p.add_argument("--out-dir", dest="out_dir", help="output directory")
    if with_pipeline_flags:
        p.add_argument("--labels", help="genus labels TSV")
        p.add_argument("--min-count", dest="min_count", type=int,
                       help="prune features below this total count (default 2)")
        _add_cluster_flags(p)


def _add_cluster_flags(p):
    p.add_argument("--pca-components", dest="pca_components", type=int)
    p.add_argument("--pca-variance", dest="pca_variance", type=float,
                   help="explained-variance threshold (default 0.95)")
    p.add_argument("--pca-input", dest="pca_input", choices=("freq", "counts"))
    p.add_argument("--linkage", choices=phylo.LINKAGES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l2transfer",
        description="Induce cross-linguistic transfer patterns and "
                    "reconstruct language phylogenies")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="count features per language")
    _add_config_flags(p, with_pipeline_flags=False)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("matrix", help="build the language-pattern matrix")
    p.add_argument("--features", required=True, help="feature TSV")
    p.add_argument("--min-count", dest="min_count", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("cluster", help="PCA + distances + clustering")
    p.add_argument("--config")
    p.add_argument("--matrix", required=True, help="matrix TSV")
    p.add_argument("--out", required=True, help="Newick output path")
    _add_cluster_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a dendrogram against genus labels")
    p.add_argument("--newick", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--name", help="feature_set name in the report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="corpus to dendrograms and metrics")
    _add_config_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="generate a planted-genus corpus")
    p.add_argument("--genera", type=int, required=True)
    p.add_argument("--langs-per-genus", dest="langs_per_genus", required=True,
                   help="int, or comma list with one count per genus")
    p.add_argument("--pairs-per-lang", dest="pairs_per_lang", type=int,
                   required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="corpus JSONL output")
    p.add_argument("--labels-out", dest="labels_out")
    p.add_argument("--manifest-out", dest="manifest_out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("align", help="fill alignments with the EM aligner")
    p.add_argument("--corpus", required=True)
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--symmetrize", choices=("none", "intersect"),
                   default="none")
    p.add_argument("--out", help="JSONL output (default stdout)")
    p.add_argument("--table-out", dest="table_out",
                   help="translation table TSV")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("plot", help="render a Newick dendrogram as SVG")
    p.add_argument("--newick", required=True)
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
