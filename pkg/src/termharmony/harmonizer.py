"""Pairwise similarity over an entry corpus and harmonization candidates.

All n(n-1)/2 cosine similarities are kept in a condensed strict
upper-triangular layout. On top of it: top-k neighbor rankings with
duplicate-term suppression, cut-off analysis against rated pairs, and
doublette / inconsistency candidate reports driven by configurable
thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .sifcore import EmbeddingMatrix


def pair_count(n: int) -> int:
    """Number of unordered entry pairs, n(n-1)/2."""
    if n < 1:
        raise ValueError(f"corpus size must be >= 1, got {n}")
    return n * (n - 1) // 2


class SimilarityMatrix:
    """Strict upper-triangular cosine similarities over an ordered id set."""

    def __init__(self, entry_ids: Iterable[str], values: np.ndarray):
        self.entry_ids = tuple(entry_ids)
        self._index = {e: i for i, e in enumerate(self.entry_ids)}
        n = len(self.entry_ids)
        expected = pair_count(n) if n else 0
        if values.shape != (expected,):
            raise ValueError(
                f"expected {expected} condensed values for {n} entries, "
                f"got {values.shape}"
            )
        self.values = values

    def __len__(self) -> int:
        return len(self.entry_ids)

    def _condensed_index(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        n = len(self.entry_ids)
        return n * i - i * (i + 1) // 2 + (j - i - 1)

    def value(self, id_a: str, id_b: str) -> float:
        """Similarity of an unordered pair; (a, b) and (b, a) agree."""
        if id_a == id_b:
            return 1.0
        return float(self.values[self._condensed_index(self._index[id_a], self._index[id_b])])

    def pairs(self):
        """Yield (id_i, id_j, similarity) for all i < j in id order."""
        n = len(self.entry_ids)
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                yield self.entry_ids[i], self.entry_ids[j], float(self.values[k])
                k += 1


def similarity_matrix(matrix: EmbeddingMatrix) -> SimilarityMatrix:
    """All pairwise cosines of an embedding matrix.

    Degenerate rows have no defined similarity; the caller must filter
    them out first.
    """
    degenerate = matrix.degenerate_ids
    if degenerate:
        raise ValueError(
            f"degenerate embeddings for entries {list(degenerate)[:5]}; "
            "filter them before building a similarity matrix"
        )
    norms = np.linalg.norm(matrix.matrix, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ValueError(
            f"zero-norm embedding for entry {matrix.entry_ids[zero[0]]!r}"
        )
    normalized = matrix.matrix / norms[:, None]
    full = normalized @ normalized.T
    n = len(matrix.entry_ids)
    condensed = full[np.triu_indices(n, k=1)]
    return SimilarityMatrix(matrix.entry_ids, np.clip(condensed, -1.0, 1.0))


def filter_degenerate(matrix: EmbeddingMatrix) -> tuple[EmbeddingMatrix, tuple[str, ...]]:
    """Drop degenerate rows; returns the reduced matrix and the dropped ids."""
    keep = [i for i, c in enumerate(matrix.token_counts) if c > 0]
    dropped = matrix.degenerate_ids
    reduced = EmbeddingMatrix(
        tuple(matrix.entry_ids[i] for i in keep),
        matrix.matrix[keep],
        tuple(matrix.token_counts[i] for i in keep),
        matrix.removed_components,
    )
    return reduced, dropped


def rank_neighbors(
    matrix: SimilarityMatrix,
    entry_id: str,
    k: int,
    term_sets: Mapping[str, frozenset[str]] | None = None,
) -> list[tuple[str, float]]:
    """Top-k neighbors by descending similarity, ties broken by ascending id.

    When term sets are supplied, an entry whose term set duplicates the
    query's or an already-listed entry's term set is skipped, so each
    listed term set appears once.
    """
    if entry_id not in matrix.entry_ids:
        raise KeyError(f"unknown entry id {entry_id!r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    candidates = [
        (other, matrix.value(entry_id, other))
        for other in matrix.entry_ids if other != entry_id
    ]
    candidates.sort(key=lambda item: (-item[1], item[0]))
    if term_sets is None:
        return candidates[:k]
    seen = {term_sets[entry_id]} if entry_id in term_sets else set()
    ranked = []
    for other, similarity in candidates:
        terms = term_sets.get(other)
        if terms is not None and terms in seen:
            continue
        if terms is not None:
            seen.add(terms)
        ranked.append((other, similarity))
        if len(ranked) == k:
            break
    return ranked


@dataclass(frozen=True)
class ThresholdReport:
    """Pairs selected below a similarity cut-off."""

    cutoff: float
    selected_count: int                               # rated pairs below cutoff
    per_category: dict[int, tuple[int, int]]          # category -> (captured, total)
    population_fraction: float                        # share of all pairs below cutoff


def _pair_key(pair: Hashable) -> frozenset:
    if isinstance(pair, frozenset):
        return pair
    if isinstance(pair, tuple) and len(pair) == 2:
        return frozenset(pair)
    raise TypeError(f"pair key must be a 2-tuple or frozenset of ids, got {pair!r}")


def threshold_analysis(
    matrix: SimilarityMatrix,
    medians: Mapping[Hashable, int],
    cutoff: float,
) -> ThresholdReport:
    """How a similarity cut-off splits rated pairs and the whole population.

    medians maps unordered id pairs to rating categories. Selection means
    similarity strictly below the cut-off.
    """
    per_category: dict[int, list[int]] = {}
    selected = 0
    for pair, category in medians.items():
        ids = sorted(_pair_key(pair))
        if len(ids) != 2:
            raise ValueError(f"pair {pair!r} does not name two distinct entries")
        value = matrix.value(ids[0], ids[1])
        captured, total = per_category.get(int(category), [0, 0])
        if value < cutoff:
            captured += 1
            selected += 1
        per_category[int(category)] = [captured, total + 1]
    below = int(np.count_nonzero(matrix.values < cutoff))
    fraction = below / len(matrix.values) if len(matrix.values) else 0.0
    return ThresholdReport(
        cutoff=cutoff,
        selected_count=selected,
        per_category={c: (v[0], v[1]) for c, v in sorted(per_category.items())},
        population_fraction=fraction,
    )


DOUBLETTE_FLAG = "doublette_candidate"
INCONSISTENCY_FLAG = "inconsistency_candidate"


@dataclass(frozen=True)
class CandidateThresholds:
    """Provisional, user-tunable cut-offs for candidate flagging."""

    doublette: float = 0.9
    term_high: float = 0.9
    definition_low: float = 0.4


@dataclass(frozen=True)
class Candidate:
    pair: tuple[str, str]
    entry_similarity: float
    term_similarity: float
    definition_similarity: float
    flags: frozenset[str]


@dataclass
class CandidateReport:
    """Ranked doublette and inconsistency candidates."""

    thresholds: CandidateThresholds
    doublettes: list[Candidate] = field(default_factory=list)
    inconsistencies: list[Candidate] = field(default_factory=list)


def candidate_report(
    entry_sim: SimilarityMatrix,
    term_sim: SimilarityMatrix,
    def_sim: SimilarityMatrix,
    thresholds: CandidateThresholds = CandidateThresholds(),
) -> CandidateReport:
    """Flag doublette and inconsistency candidates over three matrices.

    Doublettes: entry similarity at or above the doublette threshold,
    ranked by entry similarity. Inconsistencies: term similarity high while
    definition similarity low, ranked by the term-definition gap.
    """
    ids = set(entry_sim.entry_ids)
    if ids != set(term_sim.entry_ids) or ids != set(def_sim.entry_ids):
        raise ValueError("the three similarity matrices cover different id sets")
    report = CandidateReport(thresholds)
    for id_i, id_j, entry_value in entry_sim.pairs():
        term_value = term_sim.value(id_i, id_j)
        def_value = def_sim.value(id_i, id_j)
        flags = set()
        if entry_value >= thresholds.doublette:
            flags.add(DOUBLETTE_FLAG)
        if term_value >= thresholds.term_high and def_value <= thresholds.definition_low:
            flags.add(INCONSISTENCY_FLAG)
        if not flags:
            continue
        candidate = Candidate(
            (id_i, id_j), entry_value, term_value, def_value, frozenset(flags))
        if DOUBLETTE_FLAG in flags:
            report.doublettes.append(candidate)
        if INCONSISTENCY_FLAG in flags:
            report.inconsistencies.append(candidate)
    report.doublettes.sort(key=lambda c: (-c.entry_similarity, c.pair))
    report.inconsistencies.sort(
        key=lambda c: (-(c.term_similarity - c.definition_similarity), c.pair))
    return report


def export_similarity_matrix(matrix: SimilarityMatrix) -> str:
    """Serialize as "id_i id_j similarity" lines."""
    lines = [f"{a} {b} {repr(value)}" for a, b, value in matrix.pairs()]
    return "\n".join(lines) + "\n"


def format_candidate_report(report: CandidateReport) -> str:
    """Tab-separated candidate listing with a provisional-thresholds note."""
    t = report.thresholds
    lines = [
        "# thresholds are provisional configuration; calibrate against rated "
        "high-similarity pairs before operational use",
        f"# doublette >= {t.doublette}, inconsistency: term >= {t.term_high} "
        f"and definition <= {t.definition_low}",
        "\t".join(["section", "left_id", "right_id", "entry_sim", "term_sim",
                   "definition_sim", "flags"]),
    ]
    for section, candidates in (("doublette", report.doublettes),
                                ("inconsistency", report.inconsistencies)):
        for c in candidates:
            lines.append("\t".join([
                section, c.pair[0], c.pair[1],
                f"{c.entry_similarity:.6f}", f"{c.term_similarity:.6f}",
                f"{c.definition_similarity:.6f}", ",".join(sorted(c.flags)),
            ]))
    return "\n".join(lines) + "\n"
