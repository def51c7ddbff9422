"""Similarity matrices, neighbor ranking, cut-offs, and candidate flags."""
from __future__ import annotations

import numpy as np
import pytest

from termharmony.harmonizer import (
    CandidateThresholds,
    SimilarityMatrix,
    candidate_report,
    export_similarity_matrix,
    filter_degenerate,
    pair_count,
    rank_neighbors,
    similarity_matrix,
    threshold_analysis,
)
from termharmony.sifcore import EmbeddingMatrix


def _embedding(rows: np.ndarray, ids=None, counts=None) -> EmbeddingMatrix:
    n = rows.shape[0]
    return EmbeddingMatrix(
        tuple(ids or (f"e{i}" for i in range(n))),
        rows.astype(float),
        tuple([1] * n if counts is None else counts),
        np.zeros((0, rows.shape[1])),
    )


class TestPairCount:
    def test_corpus_scale_value(self):
        assert pair_count(446) == 99235

    def test_single_entry(self):
        assert pair_count(1) == 0

    def test_closed_form(self):
        assert pair_count(10) == 45

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            pair_count(0)


class TestSimilarityMatrix:
    def test_identical_rows(self):
        rows = np.array([[1.0, 1.0], [2.0, 2.0]])
        matrix = similarity_matrix(_embedding(rows))
        assert matrix.value("e0", "e1") == pytest.approx(1.0)
        assert len(matrix.values) == 1

    def test_orthogonal_rows(self):
        rows = np.eye(3)
        matrix = similarity_matrix(_embedding(rows))
        for a, b, value in matrix.pairs():
            assert value == pytest.approx(0.0)

    def test_random_rows_match_double_loop_oracle(self):
        rng = np.random.default_rng(31)
        rows = rng.standard_normal((5, 4))
        matrix = similarity_matrix(_embedding(rows))
        for i in range(5):
            for j in range(i + 1, 5):
                expected = float(rows[i] @ rows[j]
                                 / (np.linalg.norm(rows[i]) * np.linalg.norm(rows[j])))
                assert matrix.value(f"e{i}", f"e{j}") == pytest.approx(expected, abs=1e-12)
                assert matrix.value(f"e{j}", f"e{i}") == pytest.approx(expected, abs=1e-12)

    def test_stored_value_count_is_pair_count(self):
        rng = np.random.default_rng(5)
        for n in (2, 5, 9):
            rows = rng.standard_normal((n, 3))
            matrix = similarity_matrix(_embedding(rows))
            assert len(matrix.values) == pair_count(n)

    def test_degenerate_row_is_an_error_naming_the_entry(self):
        rows = np.array([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(ValueError, match="e1"):
            similarity_matrix(_embedding(rows, counts=[1, 0]))

    def test_filter_degenerate(self):
        rows = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 2.0]])
        reduced, dropped = filter_degenerate(_embedding(rows, counts=[1, 0, 1]))
        assert dropped == ("e1",)
        assert reduced.entry_ids == ("e0", "e2")
        matrix = similarity_matrix(reduced)
        assert matrix.value("e0", "e2") == pytest.approx(0.0)

    def test_export_lines(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0]])
        text = export_similarity_matrix(similarity_matrix(_embedding(rows)))
        assert text == "e0 e1 0.0\n"


def _matrix_from_values(ids, values: dict[tuple[str, str], float]) -> SimilarityMatrix:
    n = len(ids)
    condensed = np.zeros(pair_count(n))
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            key = (ids[i], ids[j])
            condensed[k] = values.get(key, values.get((ids[j], ids[i]), 0.0))
            k += 1
    return SimilarityMatrix(ids, condensed)


class TestRankNeighbors:
    def test_two_entry_corpus(self):
        matrix = _matrix_from_values(["a", "b"], {("a", "b"): 0.4})
        assert rank_neighbors(matrix, "a", 1) == [("b", 0.4)]

    def test_ordering_matches_sort_oracle(self):
        ids = ["a", "b", "c", "d"]
        values = {("a", "b"): 0.9, ("a", "c"): 0.7, ("a", "d"): 0.8,
                  ("b", "c"): 0.1, ("b", "d"): 0.2, ("c", "d"): 0.3}
        matrix = _matrix_from_values(ids, values)
        expected = sorted(
            [("b", 0.9), ("c", 0.7), ("d", 0.8)], key=lambda t: (-t[1], t[0]))
        assert rank_neighbors(matrix, "a", 3) == expected

    def test_ties_break_by_ascending_id(self):
        ids = ["q", "z", "m"]
        values = {("q", "z"): 0.5, ("q", "m"): 0.5, ("z", "m"): 0.1}
        matrix = _matrix_from_values(ids, values)
        assert rank_neighbors(matrix, "q", 2) == [("m", 0.5), ("z", 0.5)]

    def test_duplicate_term_sets_are_skipped(self):
        ids = ["query", "dup", "other", "fresh"]
        values = {("query", "dup"): 0.95, ("query", "other"): 0.8,
                  ("query", "fresh"): 0.7, ("dup", "other"): 0.0,
                  ("dup", "fresh"): 0.0, ("other", "fresh"): 0.0}
        term_sets = {
            "query": frozenset({"risk"}),
            "dup": frozenset({"risk"}),          # same term as the query
            "other": frozenset({"hazard"}),
            "fresh": frozenset({"hazard"}),      # duplicates an already-listed set
        }
        matrix = _matrix_from_values(ids, values)
        ranked = rank_neighbors(matrix, "query", 3, term_sets)
        assert ranked == [("other", 0.8)]

    def test_unknown_entry(self):
        matrix = _matrix_from_values(["a", "b"], {("a", "b"): 0.1})
        with pytest.raises(KeyError):
            rank_neighbors(matrix, "zz", 1)


class TestThresholdAnalysis:
    def _setup(self):
        ids = ["a", "b", "c", "d"]
        values = {("a", "b"): 0.05, ("a", "c"): 0.25, ("a", "d"): 0.6,
                  ("b", "c"): 0.45, ("b", "d"): 0.8, ("c", "d"): 0.95}
        matrix = _matrix_from_values(ids, values)
        medians = {
            frozenset(("a", "b")): 0,
            frozenset(("a", "c")): 0,
            frozenset(("a", "d")): 2,
            frozenset(("b", "d")): 3,
        }
        return matrix, medians

    def test_cutoff_below_minimum_selects_nothing(self):
        matrix, medians = self._setup()
        report = threshold_analysis(matrix, medians, 0.01)
        assert report.selected_count == 0
        assert report.population_fraction == 0.0

    def test_counts_match_enumeration(self):
        matrix, medians = self._setup()
        report = threshold_analysis(matrix, medians, 0.3)
        assert report.selected_count == 2
        assert report.per_category[0] == (2, 2)   # both category-0 pairs captured
        assert report.per_category[2] == (0, 1)
        assert report.per_category[3] == (0, 1)
        assert report.population_fraction == pytest.approx(2 / 6)

    def test_per_category_counts_sum_to_selected(self):
        matrix, medians = self._setup()
        for cutoff in (0.0, 0.2, 0.5, 0.9, 1.1):
            report = threshold_analysis(matrix, medians, cutoff)
            assert sum(c for c, _ in report.per_category.values()) == report.selected_count
            assert 0.0 <= report.population_fraction <= 1.0

    def test_population_fraction_monotone_in_cutoff(self):
        matrix, medians = self._setup()
        fractions = [threshold_analysis(matrix, medians, c).population_fraction
                     for c in (0.0, 0.1, 0.3, 0.7, 1.0, 1.5)]
        assert fractions == sorted(fractions)


class TestCandidateReport:
    def _matrices(self):
        ids = ["a", "b", "c"]
        entry = _matrix_from_values(ids, {("a", "b"): 0.99, ("a", "c"): 0.5,
                                          ("b", "c"): 0.3})
        term = _matrix_from_values(ids, {("a", "b"): 0.98, ("a", "c"): 0.95,
                                         ("b", "c"): 0.2})
        definition = _matrix_from_values(ids, {("a", "b"): 0.97, ("a", "c"): 0.2,
                                               ("b", "c"): 0.9})
        return entry, term, definition

    def test_token_identical_pair_is_doublette(self):
        entry, term, definition = self._matrices()
        report = candidate_report(entry, term, definition)
        doublette_pairs = {c.pair for c in report.doublettes}
        assert ("a", "b") in doublette_pairs

    def test_high_term_low_definition_is_inconsistency(self):
        entry, term, definition = self._matrices()
        report = candidate_report(entry, term, definition)
        inconsistency_pairs = {c.pair for c in report.inconsistencies}
        assert ("a", "c") in inconsistency_pairs
        assert ("a", "b") not in inconsistency_pairs  # definition too similar

    def test_flags_match_brute_force_scan(self):
        rng = np.random.default_rng(17)
        ids = [f"n{i}" for i in range(10)]
        def random_matrix():
            return SimilarityMatrix(
                ids, rng.uniform(-1, 1, size=pair_count(len(ids))))
        entry, term, definition = random_matrix(), random_matrix(), random_matrix()
        thresholds = CandidateThresholds(doublette=0.5, term_high=0.4,
                                         definition_low=0.0)
        report = candidate_report(entry, term, definition, thresholds)
        expected_doublettes = set()
        expected_inconsistencies = set()
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                a, b = ids[i], ids[j]
                if entry.value(a, b) >= thresholds.doublette:
                    expected_doublettes.add((a, b))
                if (term.value(a, b) >= thresholds.term_high
                        and definition.value(a, b) <= thresholds.definition_low):
                    expected_inconsistencies.add((a, b))
        assert {c.pair for c in report.doublettes} == expected_doublettes
        assert {c.pair for c in report.inconsistencies} == expected_inconsistencies

    def test_ranking_keys(self):
        entry, term, definition = self._matrices()
        report = candidate_report(
            entry, term, definition,
            CandidateThresholds(doublette=0.2, term_high=0.9, definition_low=0.4))
        doublette_values = [c.entry_similarity for c in report.doublettes]
        assert doublette_values == sorted(doublette_values, reverse=True)
        gaps = [c.term_similarity - c.definition_similarity
                for c in report.inconsistencies]
        assert gaps == sorted(gaps, reverse=True)

    def test_symmetry_of_flags(self):
        entry, term, definition = self._matrices()
        report = candidate_report(entry, term, definition)
        for candidate in report.doublettes + report.inconsistencies:
            a, b = candidate.pair
            assert entry.value(a, b) == entry.value(b, a)

    def test_id_set_mismatch(self):
        entry, term, _ = self._matrices()
        other = _matrix_from_values(["x", "y"], {("x", "y"): 0.1})
        with pytest.raises(ValueError, match="id set"):
            candidate_report(entry, term, other)
