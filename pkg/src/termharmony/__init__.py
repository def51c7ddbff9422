"""Terminology harmonization toolkit.

Weighted entry embeddings over pre-trained word vectors, pairwise
similarity rankings for doublette and inconsistency triage, agreement
statistics for similarity rating datasets, and a session-based rating
collection service.
"""
from .termbase import (
    EntryCorpus,
    RatingDataset,
    RatingPair,
    TerminologicalEntry,
    load_entry_corpus,
    load_rating_dataset,
    median_rating,
)
from .vecstore import (
    WordProbabilityTable,
    WordVectorStore,
    build_probability_table,
    load_probability_table,
    load_vectors,
    probability_of,
)
from .sifcore import (
    EmbeddingConfig,
    EmbeddingMatrix,
    EntryEmbedding,
    cosine,
    embed_corpus,
    entry_token_bag,
    remove_top_components,
    sif_weight,
    tokenize,
    weighted_average_embedding,
)
from .ratestats import (
    ContingencyTable,
    RaterReport,
    assess_raters,
    cross_tabulate,
    exclusion_effect,
    krippendorff_alpha,
    pairwise_deviation_histogram,
    spearman_rho,
)
from .harmonizer import (
    CandidateReport,
    CandidateThresholds,
    SimilarityMatrix,
    candidate_report,
    pair_count,
    rank_neighbors,
    similarity_matrix,
    threshold_analysis,
)
from .evalharness import EvaluationResult, SweepGrid, default_grid, evaluate, report, sweep

__version__ = "0.1.0"
