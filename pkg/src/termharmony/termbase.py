"""Canonical data model for terminological entries and similarity ratings.

An entry describes one concept: one or more terms, a definition, and a
source label. Rating datasets pair entries and collect per-rater ordinal
ratings on the five-point scale. Both live in flat UTF-8 tab-separated
files so they can be diffed, versioned, and produced by other tools.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

RATING_CATEGORIES = (0, 1, 2, 3, 4)

# label / description pairs for the five-point entry similarity scale,
# keyed by language; descriptions keep the everyday word-pair examples
# that anchor each point.
RATING_SCALE = {
    "en": {
        4: ("Very similar",
            "Both concepts are semantically very similar or identical "
            "(e.g., midday-noon or motherboard-mainboard)."),
        3: ("Similar",
            "Both concepts have many semantic similarities but are different "
            "in details. They are closely related to each other "
            "(e.g., lion-zebra or firefighter-policeman)."),
        2: ("Slightly similar",
            "Both concepts are semantically not very similar but belong to "
            "the same topic or domain. They are directly related to each "
            "other (e.g., house-window or airplane-pilot)."),
        1: ("Dissimilar",
            "Both concepts are semantically not similar but belong to the "
            "same topic or domain. They are indirectly related to each other "
            "(e.g., software-keyboard or driver-suspension)."),
        0: ("Totally dissimilar and unrelated",
            "Both concepts are semantically not similar and do not belong to "
            "the same topic or domain. They are not related to each other "
            "(e.g., pencil-frog or PlayStation-monarchy)."),
    },
    "de": {
        4: ("Sehr ähnlich",
            "Die beiden Begriffe sind inhaltlich sehr ähnlich oder identisch "
            "(z.B. midday - noon oder motherboard - mainboard)."),
        3: ("Ähnlich",
            "Die beiden Begriffe haben viele inhaltliche Ähnlichkeiten, "
            "unterscheiden sich aber in Details. Sie stehen in einem sehr "
            "engen Zusammenhang (z.B. lion - zebra oder firefighter - "
            "policeman)."),
        2: ("Etwas ähnlich",
            "Die beiden Begriffe sind inhaltlich nicht sehr ähnlich, gehören "
            "aber zum selben Thema oder Sachgebiet. Sie stehen in einem "
            "direkten Zusammenhang (z.B. house - window oder airplane - "
            "pilot)."),
        1: ("Unähnlich",
            "Die beiden Begriffe sind inhaltlich nicht ähnlich, gehören aber "
            "zum selben Thema oder Sachgebiet. Sie stehen in einem nur "
            "entfernten Zusammenhang (z.B. software - keyboard oder driver - "
            "suspension)."),
        0: ("Vollkommen unähnlich und nicht zusammenhängend",
            "Die beiden Begriffe sind inhaltlich nicht ähnlich und gehören "
            "nicht zum selben Thema oder Sachgebiet. Sie stehen in keinem "
            "Zusammenhang (z.B. pencil - frog oder PlayStation - monarchy)."),
    },
}

ENTRY_HEADER = "id\tterms\tdefinition\tsource"
RATING_HEADER = "pair_id\tleft_id\tright_id\tkind\tintended_rating\trater_id\trating"


class TermbaseError(ValueError):
    """Raised for malformed corpus or rating files and invariant violations."""


@dataclass(frozen=True)
class TerminologicalEntry:
    """One concept: id, term(s), definition, and source label."""

    id: str
    terms: tuple[str, ...]
    definition: str
    source: str

    def __post_init__(self):
        if not self.terms or any(not t.strip() for t in self.terms):
            raise TermbaseError(f"entry {self.id!r}: needs at least one non-empty term")
        if not self.definition.strip():
            raise TermbaseError(f"entry {self.id!r}: definition is empty")

    @property
    def term_set(self) -> frozenset[str]:
        return frozenset(self.terms)


class EntryCorpus:
    """Id-indexed, insertion-ordered collection of entries."""

    def __init__(self, entries: Iterable[TerminologicalEntry] = ()):
        self._entries: dict[str, TerminologicalEntry] = {}
        for entry in entries:
            self.add(entry)

    def add(self, entry: TerminologicalEntry) -> None:
        if entry.id in self._entries:
            raise TermbaseError(f"duplicate entry id {entry.id!r}")
        self._entries[entry.id] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, entry_id: str) -> bool:
        return entry_id in self._entries

    def __getitem__(self, entry_id: str) -> TerminologicalEntry:
        try:
            return self._entries[entry_id]
        except KeyError:
            raise KeyError(f"unknown entry id {entry_id!r}") from None

    def __iter__(self):
        return iter(self._entries.values())

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._entries)


@dataclass(frozen=True)
class RatingPair:
    """An unordered pair of entry ids to be rated.

    Control pairs carry the rating they are expected to receive; dataset
    pairs do not.
    """

    pair_id: str
    left_id: str
    right_id: str
    kind: str = "dataset"
    intended_rating: int | None = None

    def __post_init__(self):
        if self.left_id == self.right_id:
            raise TermbaseError(f"pair {self.pair_id!r}: left and right ids are equal")
        if self.kind not in ("dataset", "control"):
            raise TermbaseError(f"pair {self.pair_id!r}: kind must be dataset or control")
        if self.kind == "control":
            if self.intended_rating not in RATING_CATEGORIES:
                raise TermbaseError(
                    f"control pair {self.pair_id!r}: intended rating required, 0-4"
                )
        elif self.intended_rating is not None:
            raise TermbaseError(f"dataset pair {self.pair_id!r}: must not carry an intended rating")

    @property
    def key(self) -> frozenset[str]:
        """Unordered identity: (x, y) names the same pair as (y, x)."""
        return frozenset((self.left_id, self.right_id))

    def same_pair(self, other: "RatingPair") -> bool:
        return self.key == other.key


@dataclass
class RatingDataset:
    """Rating pairs plus per-rater ordinal ratings.

    Medians are computed on demand and kept as exact rationals; rounding
    happens only at report boundaries.
    """

    pairs: list[RatingPair] = field(default_factory=list)
    ratings: dict[tuple[str, str], int] = field(default_factory=dict)  # (pair_id, rater_id) -> 0..4

    def pair(self, pair_id: str) -> RatingPair:
        for p in self.pairs:
            if p.pair_id == pair_id:
                return p
        raise KeyError(f"unknown pair id {pair_id!r}")

    @property
    def pair_ids(self) -> tuple[str, ...]:
        return tuple(p.pair_id for p in self.pairs)

    def rater_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for (_, rater_id) in self.ratings:
            seen.setdefault(rater_id, None)
        return tuple(sorted(seen))

    def add_rating(self, pair_id: str, rater_id: str, category: int) -> None:
        if category not in RATING_CATEGORIES:
            raise TermbaseError(f"rating {category!r} outside 0-4 for pair {pair_id!r}")
        if pair_id not in {p.pair_id for p in self.pairs}:
            raise TermbaseError(f"rating references unknown pair {pair_id!r}")
        key = (pair_id, rater_id)
        if key in self.ratings:
            raise TermbaseError(f"duplicate rating for pair {pair_id!r} by rater {rater_id!r}")
        self.ratings[key] = category

    def ratings_for_pair(self, pair_id: str) -> dict[str, int]:
        return {r: c for (p, r), c in self.ratings.items() if p == pair_id}

    def ratings_by_rater(self, rater_id: str) -> dict[str, int]:
        return {p: c for (p, r), c in self.ratings.items() if r == rater_id}

    def median(self, pair_id: str) -> Fraction:
        return median_rating(self, pair_id)

    def medians(self) -> dict[str, Fraction]:
        """Median per pair, for pairs with at least one rating."""
        by_pair: dict[str, list[int]] = {}
        for (pair_id, _), category in self.ratings.items():
            by_pair.setdefault(pair_id, []).append(category)
        return {
            pair_id: _median(values)
            for pair_id, values in by_pair.items()
        }


def _median(values: list[int]) -> Fraction:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return Fraction(ordered[mid])
    return Fraction(ordered[mid - 1] + ordered[mid], 2)


def median_rating(dataset: RatingDataset, pair_id: str) -> Fraction:
    """Exact median of all ratings for one pair; midpoint for even counts."""
    values = list(dataset.ratings_for_pair(pair_id).values())
    if not values:
        raise TermbaseError(f"pair {pair_id!r} has no ratings")
    return _median(values)


def round_half_up(value: Fraction | float) -> int:
    """Round to nearest integer with .5 going up; report-boundary rounding."""
    frac = Fraction(value) if not isinstance(value, Fraction) else value
    return int((frac + Fraction(1, 2)).__floor__())


def _check_field(value: str, what: str, line_no: int) -> str:
    if "\t" in value or "\n" in value:
        raise TermbaseError(f"line {line_no}: {what} contains a separator character")
    return value


def load_entry_corpus(path: str | Path) -> EntryCorpus:
    """Load entries from a tab-separated file.

    One record per line: id, "|"-joined terms, definition, source. A header
    line is recognized by a literal leading ``id\\t`` and skipped.
    """
    corpus = EntryCorpus()
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line_no == 1 and line.startswith("id\t"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise TermbaseError(
                f"line {line_no}: expected 4 tab-separated fields, got {len(fields)}"
            )
        entry_id, terms_field, definition, source = fields
        terms = tuple(t for t in (s.strip() for s in terms_field.split("|")) if t)
        if not terms:
            raise TermbaseError(f"line {line_no}: entry {entry_id!r} has no terms")
        if not definition.strip():
            raise TermbaseError(f"line {line_no}: entry {entry_id!r} has an empty definition")
        entry = TerminologicalEntry(entry_id.strip(), terms, definition, source)
        try:
            corpus.add(entry)
        except TermbaseError as exc:
            raise TermbaseError(f"line {line_no}: {exc}") from None
    return corpus


def export_entry_corpus(corpus: EntryCorpus) -> str:
    """Serialize a corpus back to the canonical file format (with header)."""
    lines = [ENTRY_HEADER]
    for entry in corpus:
        for i, part in enumerate([entry.id, "|".join(entry.terms), entry.definition, entry.source]):
            _check_field(part, f"field {i}", 0)
        lines.append(
            "\t".join([entry.id, "|".join(entry.terms), entry.definition, entry.source])
        )
    return "\n".join(lines) + "\n"


def _parse_rating_line(fields: list[str], line_no: int):
    pair_id, left_id, right_id, kind, intended_field, rater_id, rating_field = fields
    intended = None
    if intended_field.strip():
        try:
            intended = int(intended_field)
        except ValueError:
            raise TermbaseError(f"line {line_no}: bad intended rating {intended_field!r}") from None
    try:
        pair = RatingPair(pair_id, left_id, right_id, kind, intended)
    except TermbaseError as exc:
        raise TermbaseError(f"line {line_no}: {exc}") from None
    rating = None
    if rater_id.strip() or rating_field.strip():
        if not (rater_id.strip() and rating_field.strip()):
            raise TermbaseError(f"line {line_no}: rater and rating must be given together")
        try:
            rating = int(rating_field)
        except ValueError:
            raise TermbaseError(f"line {line_no}: bad rating {rating_field!r}") from None
        if rating not in RATING_CATEGORIES:
            raise TermbaseError(f"line {line_no}: rating {rating} outside 0-4")
    return pair, rater_id.strip(), rating


def load_rating_dataset(path: str | Path, corpus: EntryCorpus | None = None) -> RatingDataset:
    """Load a rating dataset from a tab-separated file.

    One line per (pair, rater): pair_id, left_id, right_id, kind,
    intended_rating (empty unless control), rater_id, rating. Lines with
    empty rater and rating declare an unrated pair. When a corpus is given,
    every referenced entry id must exist in it.
    """
    dataset = RatingDataset()
    known: dict[str, RatingPair] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line_no == 1 and line.startswith("pair_id\t"):
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise TermbaseError(
                f"line {line_no}: expected 7 tab-separated fields, got {len(fields)}"
            )
        pair, rater_id, rating = _parse_rating_line(fields, line_no)
        if corpus is not None:
            for entry_id in (pair.left_id, pair.right_id):
                if entry_id not in corpus:
                    raise TermbaseError(f"line {line_no}: unknown entry id {entry_id!r}")
        if pair.pair_id in known:
            prior = known[pair.pair_id]
            same = (prior.same_pair(pair) and prior.kind == pair.kind
                    and prior.intended_rating == pair.intended_rating)
            if not same:
                raise TermbaseError(
                    f"line {line_no}: pair {pair.pair_id!r} redeclared with different fields"
                )
        else:
            known[pair.pair_id] = pair
            dataset.pairs.append(pair)
        if rating is not None:
            key = (pair.pair_id, rater_id)
            if key in dataset.ratings:
                raise TermbaseError(
                    f"line {line_no}: duplicate rating for pair {pair.pair_id!r} "
                    f"by rater {rater_id!r}"
                )
            dataset.ratings[key] = rating
    return dataset


def export_rating_dataset(dataset: RatingDataset) -> str:
    """Serialize pairs and ratings back to the canonical file format."""
    lines = [RATING_HEADER]
    rated = {p for (p, _) in dataset.ratings}
    for pair in dataset.pairs:
        intended = "" if pair.intended_rating is None else str(pair.intended_rating)
        base = [pair.pair_id, pair.left_id, pair.right_id, pair.kind, intended]
        pair_ratings = sorted(dataset.ratings_for_pair(pair.pair_id).items())
        if pair.pair_id not in rated:
            lines.append("\t".join(base + ["", ""]))
        for rater_id, category in pair_ratings:
            lines.append("\t".join(base + [rater_id, str(category)]))
    return "\n".join(lines) + "\n"


def median_histogram(dataset: RatingDataset) -> dict[int, int]:
    """Count pairs per median category, rounding .5 medians up."""
    counts = {c: 0 for c in RATING_CATEGORIES}
    for median in dataset.medians().values():
        counts[round_half_up(median)] += 1
    return counts
