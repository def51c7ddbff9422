"""Entry corpus and rating dataset loading, medians, and round-trips."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from termharmony import termbase
from termharmony.termbase import (
    RatingDataset,
    RatingPair,
    TermbaseError,
    TerminologicalEntry,
    export_entry_corpus,
    export_rating_dataset,
    load_entry_corpus,
    load_rating_dataset,
    median_histogram,
    median_rating,
    round_half_up,
)

ENTRY_FILE = (
    "id\tterms\tdefinition\tsource\n"
    "916\thazardous event\tevent that may result in harm\tIEC 61508-4:2010\n"
)


def test_load_single_entry(tmp_path):
    path = tmp_path / "corpus.tsv"
    path.write_text(ENTRY_FILE, encoding="utf-8")
    corpus = load_entry_corpus(path)
    assert len(corpus) == 1
    entry = corpus["916"]
    assert entry.terms == ("hazardous event",)
    assert entry.definition == "event that may result in harm"
    assert entry.source == "IEC 61508-4:2010"


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("", encoding="utf-8")
    assert len(load_entry_corpus(path)) == 0


def test_duplicate_id_rejected(tmp_path):
    path = tmp_path / "dup.tsv"
    path.write_text(
        "1072\tincident\tsome event\tsrc\n"
        "1072\tincident\tanother event\tsrc\n",
        encoding="utf-8",
    )
    with pytest.raises(TermbaseError, match="1072"):
        load_entry_corpus(path)


def test_parse_error_reports_line_number(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("1\tterm\tdef\tsrc\nbroken line without tabs\n", encoding="utf-8")
    with pytest.raises(TermbaseError, match="line 2"):
        load_entry_corpus(path)


def test_empty_definition_rejected(tmp_path):
    path = tmp_path / "nodef.tsv"
    path.write_text("1\tterm\t   \tsrc\n", encoding="utf-8")
    with pytest.raises(TermbaseError, match="definition"):
        load_entry_corpus(path)


def test_multi_term_split():
    entry = TerminologicalEntry("7", ("safety", "functional safety"), "freedom from risk", "s")
    assert entry.term_set == frozenset({"safety", "functional safety"})


def test_entry_needs_terms_and_definition():
    with pytest.raises(TermbaseError):
        TerminologicalEntry("1", (), "def", "s")
    with pytest.raises(TermbaseError):
        TerminologicalEntry("1", ("t",), "  ", "s")


def test_round_trip_is_byte_identical(tmp_path):
    text = (
        "id\tterms\tdefinition\tsource\n"
        "1\trisk\tcombination of likelihood and severity\tGuide 51\n"
        "2\thazard|hazardous situation\tpotential source of harm\tGuide 51\n"
    )
    path = tmp_path / "c.tsv"
    path.write_text(text, encoding="utf-8")
    assert export_entry_corpus(load_entry_corpus(path)) == text


def _dataset_with(ratings: dict[str, list[int]]) -> RatingDataset:
    dataset = RatingDataset()
    for index, (pair_id, values) in enumerate(ratings.items()):
        dataset.pairs.append(RatingPair(pair_id, f"a{index}", f"b{index}"))
        for rater_index, value in enumerate(values):
            dataset.ratings[(pair_id, f"r{rater_index}")] = value
    return dataset


def test_median_single_value():
    dataset = _dataset_with({"p1": [2]})
    assert median_rating(dataset, "p1") == 2


def test_median_even_count_is_exact_midpoint():
    dataset = _dataset_with({"p1": [1, 2]})
    assert median_rating(dataset, "p1") == Fraction(3, 2)


def test_median_symmetric_extremes():
    dataset = _dataset_with({"p1": [0, 4]})
    assert median_rating(dataset, "p1") == 2


def test_median_five_values():
    # sort-and-pick oracle: sorted [1,2,3,3,4] -> middle value 3
    values = [3, 3, 1, 2, 4]
    assert sorted(values)[2] == 3
    dataset = _dataset_with({"p1": values})
    assert median_rating(dataset, "p1") == 3


def test_median_constant():
    dataset = _dataset_with({"p1": [4, 4, 4, 4, 4]})
    assert median_rating(dataset, "p1") == 4


def test_median_unrated_pair_is_error():
    dataset = RatingDataset(pairs=[RatingPair("p1", "a", "b")])
    with pytest.raises(TermbaseError, match="no ratings"):
        median_rating(dataset, "p1")


@given(st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=9))
def test_median_is_permutation_invariant(values):
    shuffled = list(values)
    random.Random(42).shuffle(shuffled)
    assert (_dataset_with({"p": values}).median("p")
            == _dataset_with({"p": shuffled}).median("p"))


def test_half_up_rounding():
    assert round_half_up(Fraction(3, 2)) == 2
    assert round_half_up(Fraction(5, 2)) == 3
    assert round_half_up(Fraction(1, 2)) == 1
    assert round_half_up(2) == 2


def test_median_histogram_rounds_half_up():
    dataset = _dataset_with({"p1": [1, 2], "p2": [3], "p3": [0, 0]})
    histogram = median_histogram(dataset)
    assert histogram == {0: 1, 1: 0, 2: 1, 3: 1, 4: 0}


RATING_FILE = (
    "pair_id\tleft_id\tright_id\tkind\tintended_rating\trater_id\trating\n"
    "q1\t916\t1072\tdataset\t\tu1\t2\n"
    "q1\t916\t1072\tdataset\t\tu2\t1\n"
    "q2\t916\t1190\tdataset\t\tu1\t0\n"
)


def _rating_corpus(tmp_path):
    path = tmp_path / "corpus.tsv"
    path.write_text(
        "916\thazardous event\tevent that may result in harm\ts\n"
        "1072\tincident\tunexpected operational event\ts\n"
        "1190\tguard\tgateway between two networks\ts\n",
        encoding="utf-8",
    )
    return load_entry_corpus(path)


def test_load_rating_dataset(tmp_path):
    corpus = _rating_corpus(tmp_path)
    path = tmp_path / "ratings.tsv"
    path.write_text(RATING_FILE, encoding="utf-8")
    dataset = load_rating_dataset(path, corpus)
    assert len(dataset.pairs) == 2
    assert dataset.rater_ids() == ("u1", "u2")
    assert dataset.median("q1") == Fraction(3, 2)
    assert dataset.median("q2") == 0


def test_load_rating_dataset_unknown_entry(tmp_path):
    corpus = _rating_corpus(tmp_path)
    path = tmp_path / "ratings.tsv"
    path.write_text("q1\t916\tnope\tdataset\t\tu1\t2\n", encoding="utf-8")
    with pytest.raises(TermbaseError, match="nope"):
        load_rating_dataset(path, corpus)


def test_load_rating_dataset_rating_out_of_scale(tmp_path):
    path = tmp_path / "ratings.tsv"
    path.write_text("q1\ta\tb\tdataset\t\tu1\t5\n", encoding="utf-8")
    with pytest.raises(TermbaseError, match="outside 0-4"):
        load_rating_dataset(path)


def test_load_rating_dataset_duplicate_rating(tmp_path):
    path = tmp_path / "ratings.tsv"
    path.write_text(
        "q1\ta\tb\tdataset\t\tu1\t2\nq1\ta\tb\tdataset\t\tu1\t3\n",
        encoding="utf-8",
    )
    with pytest.raises(TermbaseError, match="duplicate"):
        load_rating_dataset(path)


def test_rating_dataset_round_trip(tmp_path):
    path = tmp_path / "ratings.tsv"
    path.write_text(RATING_FILE, encoding="utf-8")
    dataset = load_rating_dataset(path)
    assert export_rating_dataset(dataset) == RATING_FILE


def test_control_pair_requires_intended_rating():
    with pytest.raises(TermbaseError, match="intended"):
        RatingPair("c1", "a", "b", kind="control")
    pair = RatingPair("c1", "a", "b", kind="control", intended_rating=4)
    assert pair.intended_rating == 4


def test_pair_is_unordered():
    assert RatingPair("x", "a", "b").same_pair(RatingPair("y", "b", "a"))
    with pytest.raises(TermbaseError):
        RatingPair("x", "a", "a")


def test_pair_count_matches_rated_and_unrated(tmp_path):
    # declaration lines (empty rater and rating) keep unrated pairs
    path = tmp_path / "ratings.tsv"
    path.write_text(
        "q1\ta\tb\tdataset\t\tu1\t2\n"
        "q2\ta\tc\tdataset\t\t\t\n",
        encoding="utf-8",
    )
    dataset = load_rating_dataset(path)
    rated = {p for (p, _) in dataset.ratings}
    unrated = {p.pair_id for p in dataset.pairs} - rated
    assert len(dataset.pairs) == len(rated | unrated) == 2
