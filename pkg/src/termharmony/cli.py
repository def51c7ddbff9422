"""Command-line entry point for the toolkit.

Subcommands cover the batch pipeline (embed, rank, evaluate, sweep,
agreement, assess-raters, thresholds, candidates) and the rating service
(serve, export). Batch commands are deterministic: identical invocations
on identical inputs produce byte-identical outputs.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import evalharness, harmonizer, ratestats, sifcore, termbase, vecstore
from .ratesvc import RatingService, ServiceConfig
from .ratesvc.app import create_app

EXIT_DATA_ERROR = 1


class CliError(Exception):
    pass


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _corpus_token_stream(corpus: termbase.EntryCorpus) -> list[str]:
    stream: list[str] = []
    for entry in corpus:
        stream.extend(sifcore.entry_token_bag(entry, "entries"))
    return stream


def _sniff_precounted(path: Path) -> bool:
    """A frequency file has two whitespace fields per line, count second."""
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            parts = line.split()
            return len(parts) == 2 and parts[1].isdigit()
    return False


def resolve_probability_source(
    spec: str, corpus: termbase.EntryCorpus | None
) -> tuple[str, vecstore.WordProbabilityTable | None]:
    """Resolve --probs: "uniform", "entries", or a file path.

    File paths are sniffed: pre-counted "token count" lines load directly,
    anything else is tokenized as raw text. Returns (name, table).
    """
    if spec == evalharness.UNIFORM_SOURCE:
        return spec, None
    if spec == "entries":
        if corpus is None:
            raise CliError("--probs entries requires --corpus")
        return spec, vecstore.build_probability_table(_corpus_token_stream(corpus))
    path = Path(spec)
    if not path.exists():
        raise CliError(f"probability source {spec!r} not found")
    if _sniff_precounted(path):
        return path.stem, vecstore.load_probability_table(path)
    tokens = sifcore.tokenize(path.read_text(encoding="utf-8"))
    return path.stem, vecstore.build_probability_table(tokens)


def _config_from_args(args, table) -> sifcore.EmbeddingConfig:
    return sifcore.EmbeddingConfig(
        a=args.a,
        probability_source=table,
        d_pcr=args.pcr,
        token_input=args.input,
        drop_stopwords=getattr(args, "drop_stopwords", False),
    )


def _int_medians(dataset: termbase.RatingDataset) -> dict[frozenset, int]:
    """Pair-keyed medians rounded half-up to integer categories."""
    medians = {}
    by_id = {p.pair_id: p for p in dataset.pairs}
    for pair_id, median in dataset.medians().items():
        pair = by_id[pair_id]
        medians[frozenset((pair.left_id, pair.right_id))] = termbase.round_half_up(median)
    return medians


# -- commands ----------------------------------------------------------------


def cmd_embed(args) -> None:
    corpus = termbase.load_entry_corpus(args.corpus)
    store = vecstore.load_vectors(args.vectors)
    _, table = resolve_probability_source(args.probs, corpus)
    matrix = sifcore.embed_corpus(corpus, store, _config_from_args(args, table))
    text = sifcore.export_embedding_matrix(matrix)
    if matrix.degenerate_ids:
        sys.stderr.write(
            f"warning: degenerate embeddings for {len(matrix.degenerate_ids)} "
            f"entries: {', '.join(matrix.degenerate_ids[:5])}\n")
    _write_output(text, args.out)


def cmd_rank(args) -> None:
    corpus = termbase.load_entry_corpus(args.corpus)
    store = vecstore.load_vectors(args.vectors)
    _, table = resolve_probability_source(args.probs, corpus)
    matrix = sifcore.embed_corpus(corpus, store, _config_from_args(args, table))
    reduced, dropped = harmonizer.filter_degenerate(matrix)
    if args.entry_id in dropped:
        raise CliError(f"entry {args.entry_id!r} has a degenerate embedding")
    similarities = harmonizer.similarity_matrix(reduced)
    term_sets = {entry.id: entry.term_set for entry in corpus}
    neighbors = harmonizer.rank_neighbors(
        similarities, args.entry_id, args.top_k, term_sets)
    lines = ["rank\tentry_id\tterms\tsimilarity"]
    for position, (entry_id, similarity) in enumerate(neighbors, start=1):
        lines.append("\t".join([
            str(position), entry_id, "|".join(corpus[entry_id].terms),
            f"{similarity:.6f}"]))
    _write_output("\n".join(lines) + "\n", args.out)


_CONFIG_KEY_TO_FLAG = {
    "a": ("a", float), "d_pcr": ("pcr", int),
    "prob_source": ("probs", str), "token_input": ("input", str),
    "vectors_path": ("vectors", str), "corpus_path": ("corpus", str),
    "dataset_path": ("dataset", str),
}

_EVALUATE_DEFAULTS = {"a": 1e-3, "pcr": 0, "probs": "uniform", "input": "entries"}


def _apply_config_file(args) -> None:
    """Fill unset evaluate options from a key=value file; explicit flags win."""
    values = evalharness.load_config(args.config)
    for key, (attr, cast) in _CONFIG_KEY_TO_FLAG.items():
        if key in values and getattr(args, attr) is None:
            setattr(args, attr, cast(values[key]))


def cmd_evaluate(args) -> None:
    if args.config:
        _apply_config_file(args)
    for attr, default in _EVALUATE_DEFAULTS.items():
        if getattr(args, attr) is None:
            setattr(args, attr, default)
    for required in ("corpus", "vectors", "dataset"):
        if getattr(args, required) is None:
            raise CliError(f"--{required} is required (flag or config file)")
    corpus = termbase.load_entry_corpus(args.corpus)
    store = vecstore.load_vectors(args.vectors)
    name, table = resolve_probability_source(args.probs, corpus)
    dataset = termbase.load_rating_dataset(args.dataset, corpus)
    result = evalharness.evaluate(
        corpus, store, table, _config_from_args(args, table), dataset, name)
    lines = [
        "a\td_pcr\tprob_source\ttoken_input\trho_x100\trho\tp_value\tn_pairs\tskipped",
        "\t".join([
            repr(result.config.a), str(result.config.d_pcr), name,
            result.config.token_input, str(evalharness.rho_times_100(result.rho)),
            repr(result.rho), repr(result.p_value), str(result.n_pairs),
            str(result.skipped_pairs)]),
    ]
    _write_output("\n".join(lines) + "\n", args.out)


def _parse_grid(spec: str, source_names: tuple[str, ...]) -> evalharness.SweepGrid:
    if spec == "default":
        return evalharness.default_grid(source_names)
    axes = {}
    for part in spec.split(";"):
        if not part.strip():
            continue
        key, _, values = part.partition("=")
        axes[key.strip()] = [v.strip() for v in values.split(",") if v.strip()]
    unknown = set(axes) - {"a", "pcr"}
    if unknown:
        raise CliError(f"unknown grid axes {sorted(unknown)}; use a=...;pcr=...")
    grid_kwargs = {"probability_sources": source_names}
    if "a" in axes:
        grid_kwargs["a_values"] = tuple(float(v) for v in axes["a"])
    else:
        grid_kwargs["a_values"] = evalharness.default_grid().a_values
    if "pcr" in axes:
        grid_kwargs["d_pcr_values"] = tuple(int(v) for v in axes["pcr"])
    return evalharness.SweepGrid(**grid_kwargs)


def cmd_sweep(args) -> None:
    corpus = termbase.load_entry_corpus(args.corpus)
    store = vecstore.load_vectors(args.vectors)
    dataset = termbase.load_rating_dataset(args.dataset, corpus)
    specs = args.probs or [evalharness.UNIFORM_SOURCE]
    tables = {}
    names = []
    for spec in specs:
        if "=" in spec:
            name, _, source = spec.partition("=")
            _, table = resolve_probability_source(source, corpus)
        else:
            name, table = resolve_probability_source(spec, corpus)
        if name in tables:
            raise CliError(f"duplicate probability source name {name!r}")
        tables[name] = table
        names.append(name)
    grid = _parse_grid(args.grid, tuple(names))
    results = evalharness.sweep(corpus, store, tables, grid, dataset)
    _write_output(evalharness.report(results), args.out)


def cmd_agreement(args) -> None:
    dataset = termbase.load_rating_dataset(args.ratings)
    alpha = ratestats.overall_alpha(dataset, args.metric)
    lines = [f"overall_alpha\t{alpha:.4f}", ""]
    raters = dataset.rater_ids()
    lines.append("rater_a\trater_b\talpha\tspearman\tshared_pairs")
    for i, a in enumerate(raters):
        for b in raters[i + 1:]:
            shared = sorted(
                set(dataset.ratings_by_rater(a)) & set(dataset.ratings_by_rater(b)))
            if len(shared) < 2:
                continue
            pair_alpha = ratestats.alpha_between(dataset, a, b, args.metric)
            a_values = [dataset.ratings_by_rater(a)[p] for p in shared]
            b_values = [dataset.ratings_by_rater(b)[p] for p in shared]
            try:
                rho = f"{ratestats.spearman_rho(a_values, b_values):.4f}"
            except ratestats.InsufficientDataError:
                rho = "n/a"
            lines.append(f"{a}\t{b}\t{pair_alpha:.4f}\t{rho}\t{len(shared)}")
    if len(raters) == 2:
        table = ratestats.ContingencyTable.from_dataset(dataset, raters[0], raters[1])
        lines.append("")
        lines.append(ratestats.format_contingency_table(table).rstrip("\n"))
        histogram = ratestats.pairwise_deviation_histogram(table)
        lines.append("")
        lines.append("abs_difference\tpairs")
        for delta in range(5):
            lines.append(f"{delta}\t{histogram[delta]}")
    _write_output("\n".join(lines) + "\n", args.out)


def cmd_assess_raters(args) -> None:
    dataset = termbase.load_rating_dataset(args.ratings)
    controls = termbase.load_rating_dataset(args.controls)
    control_results = {}
    by_id = {p.pair_id: p for p in controls.pairs}
    for (pair_id, rater_id), rating in controls.ratings.items():
        control_results[(rater_id, by_id[pair_id])] = rating
    reports = ratestats.assess_raters(dataset, control_results, args.metric)
    lines = [ratestats.format_rater_reports(reports).rstrip("\n")]
    for report in sorted(reports.values(), key=lambda r: r.rater_id):
        if report.excluded:
            effect = ratestats.exclusion_effect(dataset, report.rater_id, args.metric)
            lines.append("")
            lines.append(
                f"excluding {report.rater_id}: "
                f"alpha {effect['alpha_before']:.4f} -> {effect['alpha_after']:.4f}, "
                f"avg pairwise spearman {effect['spearman_before']:.4f} -> "
                f"{effect['spearman_after']:.4f}")
    _write_output("\n".join(lines) + "\n", args.out)


def cmd_thresholds(args) -> None:
    corpus = termbase.load_entry_corpus(args.corpus)
    store = vecstore.load_vectors(args.vectors)
    _, table = resolve_probability_source(args.probs, corpus)
    dataset = termbase.load_rating_dataset(args.dataset, corpus)
    matrix = sifcore.embed_corpus(corpus, store, _config_from_args(args, table))
    reduced, dropped = harmonizer.filter_degenerate(matrix)
    similarities = harmonizer.similarity_matrix(reduced)
    medians = _int_medians(dataset)
    kept = {k: v for k, v in medians.items()
            if all(entry_id not in dropped for entry_id in k)}
    analysis = harmonizer.threshold_analysis(similarities, kept, args.cutoff)
    lines = [
        f"cutoff\t{repr(args.cutoff)}",
        f"selected_rated_pairs\t{analysis.selected_count}",
        f"population_fraction\t{analysis.population_fraction:.6f}",
        f"skipped_degenerate_pairs\t{len(medians) - len(kept)}",
        "",
        "category\tcaptured\ttotal",
    ]
    for category, (captured, total) in analysis.per_category.items():
        lines.append(f"{category}\t{captured}\t{total}")
    _write_output("\n".join(lines) + "\n", args.out)


def cmd_candidates(args) -> None:
    corpus = termbase.load_entry_corpus(args.corpus)
    store = vecstore.load_vectors(args.vectors)
    _, table = resolve_probability_source(args.probs, corpus)
    matrices = {}
    degenerate: set[str] = set()
    for token_input in sifcore.TOKEN_INPUTS:
        config = sifcore.EmbeddingConfig(
            a=args.a, probability_source=table, d_pcr=args.pcr,
            token_input=token_input)
        matrices[token_input] = sifcore.embed_corpus(corpus, store, config)
        degenerate.update(matrices[token_input].degenerate_ids)
    reduced = {}
    for token_input, matrix in matrices.items():
        keep = [i for i, entry_id in enumerate(matrix.entry_ids)
                if entry_id not in degenerate]
        reduced[token_input] = harmonizer.similarity_matrix(
            sifcore.EmbeddingMatrix(
                tuple(matrix.entry_ids[i] for i in keep),
                matrix.matrix[keep],
                tuple(matrix.token_counts[i] for i in keep),
                matrix.removed_components))
    thresholds = harmonizer.CandidateThresholds(
        doublette=args.doublette_cutoff,
        term_high=args.term_cutoff,
        definition_low=args.definition_cutoff)
    report = harmonizer.candidate_report(
        reduced["entries"], reduced["terms"], reduced["definitions"], thresholds)
    _write_output(harmonizer.format_candidate_report(report), args.out)


def _service_from_args(args) -> RatingService:
    corpus = termbase.load_entry_corpus(args.corpus)
    dataset = termbase.load_rating_dataset(args.dataset, corpus)
    controls = termbase.load_rating_dataset(args.controls, corpus)
    config = ServiceConfig(
        codes=frozenset(c.strip() for c in args.codes.split(",") if c.strip()),
        corpus=corpus,
        dataset_pairs=tuple(dataset.pairs),
        control_pairs=tuple(controls.pairs),
        seed=args.seed,
    )
    return RatingService(config, args.db)


def cmd_serve(args) -> None:
    import uvicorn

    service = _service_from_args(args)
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


def cmd_export(args) -> None:
    service = _service_from_args(args)
    dataset_tsv, controls_tsv = service.export_dataset()
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "ratings.tsv").write_text(dataset_tsv, encoding="utf-8")
    (out_dir / "control_performance.tsv").write_text(controls_tsv, encoding="utf-8")
    sys.stdout.write(f"wrote {out_dir / 'ratings.tsv'} and "
                     f"{out_dir / 'control_performance.tsv'}\n")


# -- argument parsing ----------------------------------------------------------


def _add_embedding_options(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--corpus", required=required, help="entry corpus file")
    parser.add_argument("--vectors", required=required, help="word vector file")
    parser.add_argument("--probs", default="uniform",
                        help='probability source: "uniform", "entries", or a file path')
    parser.add_argument("--a", type=float, default=1e-3,
                        help="weighting parameter (default 1e-3)")
    parser.add_argument("--pcr", type=int, default=0,
                        help="number of top principal components to remove")
    parser.add_argument("--input", default="entries",
                        choices=list(sifcore.TOKEN_INPUTS),
                        help="token input variant")
    parser.add_argument("--drop-stopwords", action="store_true",
                        help="drop common English function words before weighting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termharmony",
        description="terminology harmonization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed an entry corpus")
    _add_embedding_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("rank", help="top-k similar entries for one entry")
    p.add_argument("entry_id")
    _add_embedding_options(p)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="correlate one configuration with ratings")
    _add_embedding_options(p, required=False)
    p.add_argument("--dataset", help="rating dataset file")
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--out")
    # None sentinels so config-file values fill only options not given
    p.set_defaults(func=cmd_evaluate, a=None, pcr=None, probs=None, input=None)

    p = sub.add_parser("sweep", help="parameter sweep over a configuration grid")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--probs", action="append",
                   help='probability source, repeatable; "name=spec" to label')
    p.add_argument("--grid", default="default",
                   help='"default" or compact axes like "a=1e-4,1e-3;pcr=0,1"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("agreement", help="inter-rater agreement statistics")
    p.add_argument("--ratings", required=True, help="rating dataset file")
    p.add_argument("--metric", default="ordinal", choices=list(ratestats.ALPHA_METRICS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("assess-raters", help="rater quality signals and exclusion")
    p.add_argument("--ratings", required=True)
    p.add_argument("--controls", required=True,
                   help="control-pair rating file (kind=control with intended ratings)")
    p.add_argument("--metric", default="ordinal", choices=list(ratestats.ALPHA_METRICS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_assess_raters)

    p = sub.add_parser("thresholds", help="similarity cut-off analysis")
    _add_embedding_options(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("candidates", help="doublette and inconsistency candidates")
    _add_embedding_options(p)
    p.add_argument("--doublette-cutoff", type=float, default=0.9)
    p.add_argument("--term-cutoff", type=float, default=0.9)
    p.add_argument("--definition-cutoff", type=float, default=0.4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_candidates)

    p = sub.add_parser("serve", help="run the rating-collection service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dataset", required=True, help="dataset pair file")
    p.add_argument("--controls", required=True, help="control pair file")
    p.add_argument("--codes", required=True, help="comma-separated recruitment codes")
    p.add_argument("--db", required=True, help="append-only event log path")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="export collected ratings from an event log")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--controls", required=True)
    p.add_argument("--codes", default="none", help=argparse.SUPPRESS)
    p.add_argument("--db", required=True)
    p.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--out", help="output directory (default: current)")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        sys.stderr.write(f"error: {message}\n")
        return EXIT_DATA_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
