"""Agreement statistics on a two-rater panel and a six-rater quality check.

The first half reproduces the classic two-rater picture: a contingency
table, the absolute-deviation histogram, and chance-corrected agreement.
The second half runs the exclusion protocol over a synthetic panel with
one deliberately scrambled rater.
"""
from termharmony.ratestats import (
    ContingencyTable,
    assess_raters,
    exclusion_effect,
    format_contingency_table,
    format_rater_reports,
    krippendorff_alpha,
    pairwise_deviation_histogram,
)
from termharmony.termbase import RatingDataset, RatingPair

# -- two raters over 40 shared pairs ------------------------------------------

dataset = RatingDataset()
ratings_a = [4, 4, 3, 3, 3, 2, 2, 2, 2, 1, 1, 1, 0, 0, 4, 3, 2, 1, 0, 2] * 2
ratings_b = [4, 3, 3, 3, 2, 2, 2, 1, 2, 1, 0, 1, 0, 1, 4, 3, 2, 1, 0, 3] * 2
for index, (a, b) in enumerate(zip(ratings_a, ratings_b)):
    pair_id = f"p{index:02d}"
    dataset.pairs.append(RatingPair(pair_id, f"L{index}", f"R{index}"))
    dataset.ratings[(pair_id, "rater_a")] = a
    dataset.ratings[(pair_id, "rater_b")] = b

table = ContingencyTable.from_dataset(dataset, "rater_a", "rater_b")
print(format_contingency_table(table))
print("deviation histogram:", pairwise_deviation_histogram(table))
alpha = krippendorff_alpha({k: float(v) for k, v in dataset.ratings.items()}, "ordinal")
print(f"ordinal alpha: {alpha:.3f}\n")

# -- six raters, one of them scrambled ----------------------------------------

panel = RatingDataset()
truth = [i % 5 for i in range(40)]
for index in range(40):
    panel.pairs.append(RatingPair(f"q{index:02d}", f"A{index}", f"B{index}"))
rows = {f"expert{k}": [min(4, t + (1 if (i + k) % 7 == 0 else 0))
                       for i, t in enumerate(truth)] for k in range(5)}
rows["scrambled"] = [(t + 2) % 5 for t in truth]
for rater, values in rows.items():
    for index, value in enumerate(values):
        panel.ratings[(f"q{index:02d}", rater)] = value

controls = [RatingPair(f"c{j}", f"CL{j}", f"CR{j}", "control", intended_rating=j % 5)
            for j in range(10)]
control_results = {(rater, pair): pair.intended_rating
                   for rater in rows for pair in controls}
control_results[("scrambled", controls[0])] = controls[0].intended_rating + 2

reports = assess_raters(panel, control_results)
print(format_rater_reports(reports))
for rater, report in reports.items():
    if report.excluded:
        effect = exclusion_effect(panel, rater)
        print(f"excluding {rater}: alpha {effect['alpha_before']:.3f} -> "
              f"{effect['alpha_after']:.3f}, average pairwise spearman "
              f"{effect['spearman_before']:.3f} -> {effect['spearman_after']:.3f}")
