"""Evaluate embedding configurations against rated pair datasets.

One evaluation embeds the whole corpus under a configuration, reads off
the cosine similarity of every rated pair, and correlates those against
the exact (unrounded) median ratings with tie-corrected Spearman. Sweeps
run a grid over the weighting parameter, the number of removed principal
components, probability sources, and token inputs, and report per-source
maxima the way single-number comparisons are usually quoted (rho x 100).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping

import numpy as np

from . import ratestats, sifcore
from .termbase import EntryCorpus, RatingDataset
from .vecstore import WordProbabilityTable, WordVectorStore

UNIFORM_SOURCE = "uniform"


@dataclass(frozen=True)
class EvaluationResult:
    """Correlation of one configuration's similarities with median ratings."""

    config: sifcore.EmbeddingConfig
    prob_source_name: str
    rho: float
    p_value: float
    n_pairs: int
    skipped_pairs: int


@dataclass(frozen=True)
class SweepGrid:
    """Axes of a parameter sweep; every combination is evaluated."""

    a_values: tuple[float, ...]
    d_pcr_values: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6)
    probability_sources: tuple[str, ...] = (UNIFORM_SOURCE,)
    token_inputs: tuple[str, ...] = sifcore.TOKEN_INPUTS

    def __post_init__(self):
        for name, axis in (("a_values", self.a_values),
                           ("d_pcr_values", self.d_pcr_values),
                           ("probability_sources", self.probability_sources),
                           ("token_inputs", self.token_inputs)):
            if not axis:
                raise ValueError(f"sweep axis {name} is empty")

    @property
    def size(self) -> int:
        return (len(self.a_values) * len(self.d_pcr_values)
                * len(self.probability_sources) * len(self.token_inputs))


def default_grid(probability_sources: tuple[str, ...] = (UNIFORM_SOURCE,)) -> SweepGrid:
    """26 log-spaced weighting parameters across 1e-6..1e-1, d_pcr 0..6."""
    a_values = tuple(float(a) for a in np.logspace(-6, -1, 26))
    return SweepGrid(a_values=a_values, probability_sources=probability_sources)


def evaluate(
    corpus: EntryCorpus,
    store: WordVectorStore,
    table: WordProbabilityTable | None,
    config: sifcore.EmbeddingConfig,
    dataset: RatingDataset,
    prob_source_name: str = "",
) -> EvaluationResult:
    """Correlate one configuration's pair similarities with median ratings.

    Pairs touching a degenerate (all-out-of-vocabulary) embedding are
    skipped and counted rather than imputed.
    """
    config = replace(config, probability_source=table)
    for pair in dataset.pairs:
        for entry_id in (pair.left_id, pair.right_id):
            if entry_id not in corpus:
                raise KeyError(f"dataset references unknown entry id {entry_id!r}")
    matrix = sifcore.embed_corpus(corpus, store, config)
    degenerate = set(matrix.degenerate_ids)
    if len(degenerate) == len(matrix.entry_ids):
        raise ValueError("all embeddings are degenerate under this configuration")
    row = {entry_id: matrix.matrix[i] for i, entry_id in enumerate(matrix.entry_ids)}
    medians = dataset.medians()
    similarities = []
    targets = []
    skipped = 0
    for pair in dataset.pairs:
        if pair.pair_id not in medians:
            continue
        if pair.left_id in degenerate or pair.right_id in degenerate:
            skipped += 1
            continue
        similarities.append(sifcore.cosine(row[pair.left_id], row[pair.right_id]))
        targets.append(float(medians[pair.pair_id]))
    rho = ratestats.spearman_rho(similarities, targets)
    return EvaluationResult(
        config=config,
        prob_source_name=prob_source_name,
        rho=rho,
        p_value=ratestats.spearman_p_value(rho, len(similarities)),
        n_pairs=len(similarities),
        skipped_pairs=skipped,
    )


@dataclass
class SweepResults:
    """All grid-point results plus per-cell errors."""

    results: list[EvaluationResult] = field(default_factory=list)
    errors: list[tuple[str, str]] = field(default_factory=list)  # (cell, message)

    def best_per_source(self) -> dict[tuple[str, str], EvaluationResult]:
        """Maximum-rho result per (probability source, token input)."""
        best: dict[tuple[str, str], EvaluationResult] = {}
        for result in self.results:
            key = (result.prob_source_name, result.config.token_input)
            if key not in best or result.rho > best[key].rho:
                best[key] = result
        return best


def sweep(
    corpus: EntryCorpus,
    store: WordVectorStore,
    tables: Mapping[str, WordProbabilityTable | None],
    grid: SweepGrid,
    dataset: RatingDataset,
) -> SweepResults:
    """Evaluate every grid point; per-cell failures are recorded, not fatal."""
    results = SweepResults()
    for source_name in grid.probability_sources:
        if source_name not in tables:
            raise KeyError(f"no probability table supplied for source {source_name!r}")
        table = tables[source_name]
        for token_input in grid.token_inputs:
            for d_pcr in grid.d_pcr_values:
                for a in grid.a_values:
                    cell = f"a={a!r},d_pcr={d_pcr},source={source_name},input={token_input}"
                    config = sifcore.EmbeddingConfig(
                        a=a, d_pcr=d_pcr, token_input=token_input)
                    try:
                        results.results.append(evaluate(
                            corpus, store, table, config, dataset, source_name))
                    except (ValueError, KeyError) as exc:
                        results.errors.append((cell, str(exc)))
    return results


def rho_times_100(rho: float) -> int:
    """rho scaled to an integer percentage, halves rounded away from zero."""
    return int(Decimal(repr(rho * 100)).quantize(Decimal("1"), rounding=ROUND_HALF_UP))


def _result_line(result: EvaluationResult) -> str:
    return "\t".join([
        repr(result.config.a),
        str(result.config.d_pcr),
        result.prob_source_name,
        result.config.token_input,
        str(rho_times_100(result.rho)),
        repr(result.rho),
        repr(result.p_value),
        str(result.n_pairs),
        str(result.skipped_pairs),
    ])


def report(results: SweepResults) -> str:
    """Deterministic tab-separated report: per-source maxima, then all rows."""
    if not results.results:
        raise ValueError("no results to report")
    lines = []
    best = results.best_per_source()
    if best:
        lines.append("# maxima per (probability source, token input)")
        lines.append("\t".join([
            "a", "d_pcr", "prob_source", "token_input",
            "rho_x100", "rho", "p_value", "n_pairs", "skipped"]))
        for key in sorted(best):
            lines.append(_result_line(best[key]))
        lines.append("")
    lines.append("# all grid points")
    lines.append("\t".join([
        "a", "d_pcr", "prob_source", "token_input",
        "rho_x100", "rho", "p_value", "n_pairs", "skipped"]))
    ordered = sorted(
        results.results,
        key=lambda r: (-r.rho, r.prob_source_name, r.config.token_input,
                       r.config.d_pcr, r.config.a))
    for result in ordered:
        lines.append(_result_line(result))
    if results.errors:
        lines.append("")
        lines.append("# failed grid points")
        for cell, message in results.errors:
            lines.append(f"{cell}\t{message}")
    return "\n".join(lines) + "\n"


CONFIG_KEYS = ("a", "d_pcr", "prob_source", "token_input",
               "vectors_path", "corpus_path", "dataset_path")


def load_config(path: str | Path) -> dict[str, str]:
    """Flat key=value configuration file; unknown keys are rejected."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {line_no}: expected key=value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {line_no}: unknown key {key!r}")
        values[key] = value.strip()
    return values
