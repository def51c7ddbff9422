"""Rank correlation, chance-corrected agreement, and rater quality checks.

Spearman's rho is the Pearson correlation of average ranks (ties get the
mean of their rank positions). Krippendorff's alpha uses the coincidence
matrix formulation, 1 - D_o/D_e, with ordinal or interval distances; the
ordinal distance between two categories is the squared sum of the marginal
frequencies lying between them. On top of these, the module implements the
two-signal rater exclusion protocol and the similarity/relatedness
cross-tabulation used to estimate dataset reliability.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .termbase import RATING_CATEGORIES, RatingDataset, RatingPair

ALPHA_METRICS = ("ordinal", "interval")


class InsufficientDataError(ValueError):
    """Raised when a statistic's preconditions are not met."""


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=np.float64)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        # positions i..j (0-based) share the mean rank
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Spearman rank correlation."""
    if len(x) != len(y):
        raise InsufficientDataError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise InsufficientDataError(f"need at least 3 observations, got {len(x)}")
    rx = average_ranks(x)
    ry = average_ranks(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        raise InsufficientDataError("correlation undefined for constant input")
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def spearman_p_value(rho: float, n: int) -> float:
    """Two-sided p-value via the t approximation on n-2 degrees of freedom."""
    if n < 4 or abs(rho) >= 1.0:
        return 0.0 if abs(rho) >= 1.0 else 1.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * _scipy_stats.t.sf(abs(t), df=n - 2))


def _coincidence_matrix(
    units: Sequence[Sequence[float]],
) -> tuple[dict[float, int], np.ndarray]:
    """Coincidence counts over all value pairs within multiply-rated units."""
    categories = sorted({v for unit in units for v in unit})
    index = {c: i for i, c in enumerate(categories)}
    o = np.zeros((len(categories), len(categories)))
    for unit in units:
        m = len(unit)
        if m < 2:
            continue
        for i, a in enumerate(unit):
            for j, b in enumerate(unit):
                if i != j:
                    o[index[a], index[b]] += 1.0 / (m - 1)
    return index, o


def _squared_distances(categories: Sequence[float], marginals: np.ndarray, metric: str) -> np.ndarray:
    k = len(categories)
    d2 = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if metric == "interval":
                d2[i, j] = (categories[i] - categories[j]) ** 2
            else:  # ordinal: marginal mass between the two categories
                lo, hi = min(i, j), max(i, j)
                between = marginals[lo:hi + 1].sum()
                d2[i, j] = (between - (marginals[lo] + marginals[hi]) / 2.0) ** 2
    return d2


def krippendorff_alpha(
    ratings: Mapping[tuple[Hashable, Hashable], float],
    metric: str = "ordinal",
) -> float:
    """Chance-corrected inter-rater agreement, 1 - D_o/D_e.

    ratings maps (item, rater) to a category. Missing ratings are allowed;
    items with fewer than two ratings contribute nothing. Returns 1.0 for
    perfect agreement even when expected disagreement is zero.
    """
    if metric not in ALPHA_METRICS:
        raise ValueError(f"metric must be one of {ALPHA_METRICS}")
    by_item: dict[Hashable, list[float]] = {}
    for (item, _), value in ratings.items():
        by_item.setdefault(item, []).append(float(value))
    units = [values for values in by_item.values() if len(values) >= 2]
    if len(units) < 2:
        raise InsufficientDataError(
            f"need at least 2 items with 2+ ratings, got {len(units)}"
        )
    index, o = _coincidence_matrix(units)
    categories = sorted(index)
    marginals = o.sum(axis=1)
    n = marginals.sum()
    d2 = _squared_distances(categories, marginals, metric)
    d_observed = float((o * d2).sum())
    if d_observed == 0.0:
        return 1.0
    d_expected = float((np.outer(marginals, marginals) * d2).sum())
    return 1.0 - (n - 1.0) * d_observed / d_expected


@dataclass(frozen=True)
class ContingencyTable:
    """5x5 rating counts for two raters over their shared pairs."""

    rater_a: str
    rater_b: str
    counts: np.ndarray  # counts[category_a][category_b]

    def __post_init__(self):
        if self.counts.shape != (5, 5):
            raise ValueError(f"expected a 5x5 table, got {self.counts.shape}")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_dataset(cls, dataset: RatingDataset, rater_a: str, rater_b: str) -> "ContingencyTable":
        counts = np.zeros((5, 5), dtype=np.int64)
        a_ratings = dataset.ratings_by_rater(rater_a)
        b_ratings = dataset.ratings_by_rater(rater_b)
        for pair_id, a_value in a_ratings.items():
            if pair_id in b_ratings:
                counts[a_value, b_ratings[pair_id]] += 1
        return cls(rater_a, rater_b, counts)


def pairwise_deviation_histogram(table: ContingencyTable) -> dict[int, int]:
    """Counts of shared pairs grouped by absolute category difference."""
    histogram = {delta: 0 for delta in range(5)}
    for a in RATING_CATEGORIES:
        for b in RATING_CATEGORIES:
            histogram[abs(a - b)] += int(table.counts[a, b])
    return histogram


def _alpha_from_pairs(pairs: Sequence[tuple[float, float]], metric: str) -> float:
    ratings = {}
    for i, (a, b) in enumerate(pairs):
        ratings[(i, "a")] = a
        ratings[(i, "b")] = b
    return krippendorff_alpha(ratings, metric)


def alpha_between(
    dataset: RatingDataset, rater_a: str, rater_b: str, metric: str = "ordinal"
) -> float:
    """Krippendorff's alpha over the two raters' shared pairs."""
    a_ratings = dataset.ratings_by_rater(rater_a)
    b_ratings = dataset.ratings_by_rater(rater_b)
    shared = sorted(set(a_ratings) & set(b_ratings))
    return _alpha_from_pairs([(a_ratings[p], b_ratings[p]) for p in shared], metric)


def alpha_vs_others_median(
    dataset: RatingDataset, rater: str, metric: str = "ordinal"
) -> float:
    """Alpha between one rater and the median of all other raters."""
    own = dataset.ratings_by_rater(rater)
    pairs = []
    for pair_id, value in own.items():
        others = [
            c for (p, r), c in dataset.ratings.items()
            if p == pair_id and r != rater
        ]
        if others:
            others.sort()
            mid = len(others) // 2
            if len(others) % 2:
                median = float(others[mid])
            else:
                median = (others[mid - 1] + others[mid]) / 2.0
            pairs.append((float(value), median))
    return _alpha_from_pairs(pairs, metric)


def average_pairwise_spearman(dataset: RatingDataset, rater: str) -> float:
    """Mean Spearman correlation of one rater against each other rater."""
    own = dataset.ratings_by_rater(rater)
    values = []
    for other in dataset.rater_ids():
        if other == rater:
            continue
        theirs = dataset.ratings_by_rater(other)
        shared = sorted(set(own) & set(theirs))
        if len(shared) < 3:
            continue
        values.append(spearman_rho([own[p] for p in shared], [theirs[p] for p in shared]))
    if not values:
        raise InsufficientDataError(f"no comparable raters for {rater!r}")
    return float(np.mean(values))


@dataclass(frozen=True)
class RaterReport:
    """Quality signals for one rater and the outcome of the exclusion check."""

    rater_id: str
    alpha_vs_others_median: float
    avg_pairwise_spearman: float
    strong_agreement_count: int
    control_deviations_ge2: int
    flagged: bool
    excluded: bool


def assess_raters(
    dataset: RatingDataset,
    control_results: Mapping[tuple[str, RatingPair], int],
    metric: str = "ordinal",
    agreement_threshold: float = 0.7,
) -> dict[str, RaterReport]:
    """Compute per-rater quality signals and apply the exclusion protocol.

    A rater is flagged when both the against-others-median alpha and the
    average pairwise Spearman fall more than one population standard
    deviation below their means. A flagged rater is excluded when it also
    has the minimal count of strong (> threshold) pairwise agreements and
    at least one control-pair deviation of two or more scale points.
    """
    raters = dataset.rater_ids()
    if len(raters) < 3:
        raise InsufficientDataError(f"need at least 3 raters, got {len(raters)}")

    alphas = {r: alpha_vs_others_median(dataset, r, metric) for r in raters}
    spearmans = {r: average_pairwise_spearman(dataset, r) for r in raters}
    strong = {
        r: sum(
            1 for other in raters
            if other != r and alpha_between(dataset, r, other, metric) > agreement_threshold
        )
        for r in raters
    }
    control_misses = {r: 0 for r in raters}
    for (rater, pair), rating in control_results.items():
        if pair.intended_rating is None:
            raise ValueError(f"control pair {pair.pair_id!r} has no intended rating")
        if rater in control_misses and abs(rating - pair.intended_rating) >= 2:
            control_misses[rater] += 1

    alpha_values = np.array([alphas[r] for r in raters])
    spearman_values = np.array([spearmans[r] for r in raters])
    alpha_cut = alpha_values.mean() - alpha_values.std()
    spearman_cut = spearman_values.mean() - spearman_values.std()
    min_strong = min(strong.values())

    reports = {}
    for rater in raters:
        flagged = alphas[rater] < alpha_cut and spearmans[rater] < spearman_cut
        excluded = (
            flagged
            and strong[rater] == min_strong
            and control_misses[rater] >= 1
        )
        reports[rater] = RaterReport(
            rater_id=rater,
            alpha_vs_others_median=alphas[rater],
            avg_pairwise_spearman=spearmans[rater],
            strong_agreement_count=strong[rater],
            control_deviations_ge2=control_misses[rater],
            flagged=flagged,
            excluded=excluded,
        )
    return reports


def overall_alpha(dataset: RatingDataset, metric: str = "ordinal",
                  exclude: str | None = None) -> float:
    ratings = {
        (p, r): float(c) for (p, r), c in dataset.ratings.items() if r != exclude
    }
    return krippendorff_alpha(ratings, metric)


def overall_avg_pairwise_spearman(dataset: RatingDataset, exclude: str | None = None) -> float:
    raters = [r for r in dataset.rater_ids() if r != exclude]
    values = []
    for i, a in enumerate(raters):
        a_ratings = dataset.ratings_by_rater(a)
        for b in raters[i + 1:]:
            b_ratings = dataset.ratings_by_rater(b)
            shared = sorted(set(a_ratings) & set(b_ratings))
            if len(shared) < 3:
                continue
            values.append(spearman_rho(
                [a_ratings[p] for p in shared], [b_ratings[p] for p in shared]))
    if not values:
        raise InsufficientDataError("no rater pairs with enough shared pairs")
    return float(np.mean(values))


def exclusion_effect(
    dataset: RatingDataset, excluded_rater: str, metric: str = "ordinal"
) -> dict[str, float]:
    """Overall alpha and average pairwise Spearman with and without one rater."""
    if excluded_rater not in dataset.rater_ids():
        raise KeyError(f"unknown rater {excluded_rater!r}")
    return {
        "alpha_before": overall_alpha(dataset, metric),
        "alpha_after": overall_alpha(dataset, metric, exclude=excluded_rater),
        "spearman_before": overall_avg_pairwise_spearman(dataset),
        "spearman_after": overall_avg_pairwise_spearman(dataset, exclude=excluded_rater),
    }


SIMILAR_BAND = "3-4"
DISSIMILAR_BAND = "0-2"


def tendency_band(values: Sequence[float]) -> str | None:
    """Band of a reference rating set: all >= 3, all <= 2, or no clear side."""
    if all(v >= 3 for v in values):
        return SIMILAR_BAND
    if all(v <= 2 for v in values):
        return DISSIMILAR_BAND
    return None


@dataclass(frozen=True)
class CrossTabulation:
    """Banded reference ratings against observed categories."""

    counts: dict[str, dict[int, int]]     # band -> observed category -> count
    under_rated: int                       # similar band observed as 0-2
    over_rated: int                        # dissimilar band observed as 3-4
    unbanded: int                          # reference pairs without a clear band
    reliable_share: float                  # pairs outside the confusion cells


def cross_tabulate(
    reference: Mapping[Hashable, str | None],
    observed: Mapping[Hashable, int | Fraction],
) -> CrossTabulation:
    """Cross-tabulate banded reference judgments against observed categories.

    Pairs whose reference band is None (no clear tendency) are counted but
    excluded from the table. The reliable share is the fraction of all
    shared pairs that are banded and fall outside the two confusion
    regions: similar-band pairs observed at 2 or less, and dissimilar-band
    pairs observed at 3 or more.
    """
    shared = sorted(set(reference) & set(observed), key=repr)
    if not shared:
        raise InsufficientDataError("reference and observed share no pairs")
    counts = {
        SIMILAR_BAND: {c: 0 for c in RATING_CATEGORIES},
        DISSIMILAR_BAND: {c: 0 for c in RATING_CATEGORIES},
    }
    unbanded = 0
    under = over = 0
    for pair in shared:
        band = reference[pair]
        if band is None:
            unbanded += 1
            continue
        if band not in counts:
            raise ValueError(f"unknown band {band!r} for pair {pair!r}")
        category = int(observed[pair])
        counts[band][category] += 1
        if band == SIMILAR_BAND and category <= 2:
            under += 1
        elif band == DISSIMILAR_BAND and category >= 3:
            over += 1
    banded = len(shared) - unbanded
    reliable = (banded - under - over) / len(shared)
    return CrossTabulation(counts, under, over, unbanded, reliable)


def format_contingency_table(table: ContingencyTable) -> str:
    """Tab-separated rendering, high categories first, with margins."""
    cats = list(reversed(RATING_CATEGORIES))
    lines = ["\t".join([f"{table.rater_a}\\{table.rater_b}"] + [str(c) for c in cats] + ["total"])]
    for a in cats:
        row = [str(a)] + [str(int(table.counts[a, b])) for b in cats]
        row.append(str(int(table.counts[a].sum())))
        lines.append("\t".join(row))
    footer = ["total"] + [str(int(table.counts[:, b].sum())) for b in cats]
    footer.append(str(table.total))
    lines.append("\t".join(footer))
    return "\n".join(lines) + "\n"


def format_rater_reports(reports: Mapping[str, RaterReport]) -> str:
    """Tab-separated rater table, strongest median agreement first."""
    header = "\t".join([
        "rater", "alpha_vs_others_median", "avg_pairwise_spearman",
        "strong_agreements", "control_deviations_ge2", "flagged", "excluded",
    ])
    lines = [header]
    ordered = sorted(reports.values(),
                     key=lambda r: (-r.alpha_vs_others_median, r.rater_id))
    for report in ordered:
        lines.append("\t".join([
            report.rater_id,
            f"{report.alpha_vs_others_median:.4f}",
            f"{report.avg_pairwise_spearman:.4f}",
            str(report.strong_agreement_count),
            str(report.control_deviations_ge2),
            "yes" if report.flagged else "no",
            "yes" if report.excluded else "no",
        ]))
    return "\n".join(lines) + "\n"
