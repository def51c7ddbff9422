"""Sweep weighting parameter, probability source, and component removal.

Uses a toy geometry where the "true" similarity is controlled, evaluates
every grid point against median ratings, and prints the standard report:
per-source maxima first, all grid points after.
"""
import math

import numpy as np

from termharmony import EntryCorpus, TerminologicalEntry, WordProbabilityTable, WordVectorStore
from termharmony.evalharness import SweepGrid, report, sweep
from termharmony.termbase import RatingDataset, RatingPair

# entries whose single meaningful token sits at a known angle; definition
# words are shared filler so weighting has something to push against
angles = {"e1": 0.0, "e2": 0.35, "e3": 0.9, "e4": 1.5, "e5": 2.2}
corpus = EntryCorpus([
    TerminologicalEntry(entry_id, (f"term{entry_id}",),
                        f"filler words about concept {entry_id}", "demo")
    for entry_id in angles
])
vectors = {f"term{e}": [math.cos(a), math.sin(a)] for e, a in angles.items()}
vectors |= {"filler": [0.6, 0.6], "words": [0.55, 0.65], "about": [0.6, 0.55],
            "concept": [0.5, 0.5]}
store = WordVectorStore({t: np.array(v) for t, v in vectors.items()})

# ratings follow the angular distance between the term tokens
dataset = RatingDataset()
ids = list(angles)
pair_index = 0
for i, left in enumerate(ids):
    for right in ids[i + 1:]:
        gap = abs(angles[left] - angles[right])
        category = max(0, 4 - int(gap / 0.55))
        pair_id = f"p{pair_index}"
        dataset.pairs.append(RatingPair(pair_id, left, right))
        dataset.ratings[(pair_id, "expert")] = category
        pair_index += 1

frequencies = WordProbabilityTable(
    {"filler": 400, "words": 300, "about": 200, "concept": 100}
    | {f"term{e}": 2 for e in angles})

grid = SweepGrid(
    a_values=tuple(float(a) for a in np.logspace(-4, -1, 4)),
    d_pcr_values=(0, 1),
    probability_sources=("uniform", "demo-frequencies"),
    token_inputs=("entries", "terms"),
)
results = sweep(corpus, store, {"uniform": None, "demo-frequencies": frequencies},
                grid, dataset)
print(report(results))
