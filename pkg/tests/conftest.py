"""Shared fixtures: the published two-rater contingency counts and toy stores."""
from __future__ import annotations

import numpy as np
import pytest

from termharmony.termbase import EntryCorpus, RatingDataset, RatingPair, TerminologicalEntry
from termharmony.vecstore import WordVectorStore

# Two-rater 5x5 contingency counts over 152 rated pairs; rows are rater A's
# category (4 down to 0), columns rater B's (4 down to 0).
TABLE_AB_COUNTS = [
    [16, 5, 0, 1, 0],
    [0, 22, 6, 3, 1],
    [0, 6, 21, 15, 2],
    [0, 1, 10, 10, 13],
    [0, 0, 0, 7, 13],
]


def two_rater_pairs() -> list[tuple[int, int]]:
    """Flatten the contingency counts into one (a, b) rating pair per item."""
    pairs = []
    categories = [4, 3, 2, 1, 0]
    for i, a in enumerate(categories):
        for j, b in enumerate(categories):
            pairs.extend([(a, b)] * TABLE_AB_COUNTS[i][j])
    assert len(pairs) == 152
    return pairs


def two_rater_dataset() -> RatingDataset:
    """The 152-pair two-rater dataset reconstructed from the counts."""
    dataset = RatingDataset()
    for index, (a, b) in enumerate(two_rater_pairs(), start=1):
        pair_id = f"p{index:03d}"
        dataset.pairs.append(RatingPair(pair_id, f"L{index}", f"R{index}"))
        dataset.ratings[(pair_id, "u12")] = a
        dataset.ratings[(pair_id, "u13")] = b
    return dataset


@pytest.fixture
def author_dataset() -> RatingDataset:
    return two_rater_dataset()


def make_store(vectors: dict[str, list[float]]) -> WordVectorStore:
    return WordVectorStore({t: np.array(v, float) for t, v in vectors.items()})


def make_corpus(rows: list[tuple[str, list[str], str]]) -> EntryCorpus:
    """rows: (id, terms, definition); source is synthesized."""
    return EntryCorpus(
        TerminologicalEntry(entry_id, tuple(terms), definition, "test-source")
        for entry_id, terms, definition in rows
    )
