"""Walk through entry embeddings: token bags, weighting, and ranking.

Builds a miniature corpus of safety/security concepts with 2-d word
vectors small enough to inspect by eye, then shows how frequency
weighting and top-component removal change the picture.
"""
import numpy as np

from termharmony import (
    EmbeddingConfig,
    EntryCorpus,
    TerminologicalEntry,
    WordProbabilityTable,
    WordVectorStore,
    embed_corpus,
    entry_token_bag,
    sif_weight,
)
from termharmony.harmonizer import rank_neighbors, similarity_matrix

corpus = EntryCorpus([
    TerminologicalEntry("1", ("risk",), "combination of likelihood and severity of harm", "demo"),
    TerminologicalEntry("2", ("hazard",), "potential source of harm", "demo"),
    TerminologicalEntry("3", ("harm",), "physical injury or damage", "demo"),
    TerminologicalEntry("4", ("encryption",), "process of changing plaintext into ciphertext", "demo"),
    TerminologicalEntry("5", ("decryption",), "process of changing ciphertext into plaintext", "demo"),
])

store = WordVectorStore({token: np.array(vector) for token, vector in {
    "risk": [0.9, 0.1, 0.3], "hazard": [0.8, 0.2, 0.35], "harm": [0.7, 0.3, 0.5],
    "likelihood": [0.9, 0.0, 0.1], "severity": [0.8, 0.1, 0.4],
    "combination": [0.5, 0.4, 0.2], "potential": [0.5, 0.5, 0.3],
    "source": [0.6, 0.4, 0.2], "physical": [0.6, 0.3, 0.6],
    "injury": [0.7, 0.2, 0.6], "damage": [0.7, 0.25, 0.55],
    "encryption": [0.1, 0.9, 0.2], "decryption": [0.1, 0.85, 0.25],
    "process": [0.45, 0.5, 0.3], "changing": [0.4, 0.5, 0.25],
    "plaintext": [0.2, 0.8, 0.15], "ciphertext": [0.15, 0.85, 0.2],
    "of": [0.5, 0.5, 0.4], "and": [0.5, 0.5, 0.4], "or": [0.5, 0.5, 0.4],
    "into": [0.5, 0.5, 0.4],
}.items()})

# 1. an entry is flattened to a bag of tokens (terms first, then definition)
print("token bag for entry 1:", entry_token_bag(corpus["1"], "entries"))

# 2. frequent words get small weights: a/(a + p)
table = WordProbabilityTable({
    "of": 400, "and": 300, "or": 200, "into": 100, "process": 40,
    "risk": 12, "harm": 10, "changing": 8, "likelihood": 4, "severity": 4,
    "hazard": 4, "combination": 3, "potential": 3, "source": 3,
    "physical": 2, "injury": 2, "damage": 2, "encryption": 2,
    "decryption": 2, "plaintext": 1, "ciphertext": 1,
})
for token in ("of", "risk", "plaintext"):
    weight = sif_weight(1e-2, table.probability(token))
    print(f"weight({token!r:12}) = {weight:.3f}   (p = {table.probability(token):.4f})")

# 3. embed the corpus: weighted average, then remove the top component,
#    which strips the direction shared by all these definition-style rows
config = EmbeddingConfig(a=1e-2, probability_source=table, d_pcr=1)
matrix = embed_corpus(corpus, store, config)
print("\nembeddings (top component removed):")
for entry_id, row in zip(matrix.entry_ids, matrix.matrix):
    print(f"  entry {entry_id}: [" + ", ".join(f"{x: .4f}" for x in row) + "]")

# 4. similarity ranking with duplicate-term suppression
similarities = similarity_matrix(matrix)
term_sets = {entry.id: entry.term_set for entry in corpus}
print("\nnearest neighbors of 'encryption' (entry 4):")
for neighbor_id, value in rank_neighbors(similarities, "4", 3, term_sets):
    print(f"  {', '.join(corpus[neighbor_id].terms):12} similarity {value: .4f}")
