"""Entry embeddings: smooth-inverse-frequency weighted token averages.

Each entry is flattened into a bag of tokens (terms, definition, or both),
every in-vocabulary token's vector is scaled by a/(a+p(token)), the scaled
vectors are averaged, and the projections of the whole embedding matrix on
its top principal directions are removed. Rare words therefore dominate
the average, and the shared high-variance direction common to most entries
is stripped.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .termbase import EntryCorpus, TerminologicalEntry
from .vecstore import WordProbabilityTable, WordVectorStore

TOKEN_INPUTS = ("entries", "terms", "definitions")

# word characters, keeping internal hyphens ("real-time" stays one token)
_TOKEN_RE = re.compile(r"\w+(?:-\w+)*", re.UNICODE)

# common English function words, used only when stopword dropping is enabled
STOPWORDS = frozenset("""
a an and are as at be but by for from has have if in into is it its of on or
such that the their then there these this to was were which while will with
""".split())


@dataclass(frozen=True)
class EmbeddingConfig:
    """Parameters of one embedding run.

    probability_source None selects the uniform baseline: every token gets
    weight exactly 1, which reproduces plain token averaging for any a.
    """

    a: float = 1e-3
    probability_source: WordProbabilityTable | None = None
    d_pcr: int = 0
    token_input: str = "entries"
    drop_stopwords: bool = False

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError(f"weighting parameter a must be positive, got {self.a}")
        if self.d_pcr < 0:
            raise ValueError(f"d_pcr must be >= 0, got {self.d_pcr}")
        if self.token_input not in TOKEN_INPUTS:
            raise ValueError(f"token_input must be one of {TOKEN_INPUTS}")


@dataclass(frozen=True)
class EntryEmbedding:
    """Embedding of one entry plus the number of in-vocabulary tokens used."""

    entry_id: str
    vector: np.ndarray
    token_count: int

    @property
    def degenerate(self) -> bool:
        """True when no token had a vector; the embedding is the zero vector."""
        return self.token_count == 0


@dataclass
class EmbeddingMatrix:
    """Embeddings for a whole corpus under one configuration."""

    entry_ids: tuple[str, ...]
    matrix: np.ndarray                    # n x d, row order matches entry_ids
    token_counts: tuple[int, ...]
    removed_components: np.ndarray = field(
        default_factory=lambda: np.zeros((0, 0)))  # k x d unit directions

    def row(self, entry_id: str) -> np.ndarray:
        return self.matrix[self.entry_ids.index(entry_id)]

    @property
    def degenerate_ids(self) -> tuple[str, ...]:
        return tuple(
            entry_id for entry_id, count in zip(self.entry_ids, self.token_counts)
            if count == 0
        )


def tokenize(text: str) -> list[str]:
    """Split on whitespace and punctuation, preserving intra-word hyphens."""
    return _TOKEN_RE.findall(text)


def entry_token_bag(entry: TerminologicalEntry, token_input: str) -> list[str]:
    """Token bag for one entry: term tokens, definition tokens, or both.

    Duplicates are kept; for "entries" the term tokens come first.
    """
    if token_input not in TOKEN_INPUTS:
        raise ValueError(f"token_input must be one of {TOKEN_INPUTS}")
    term_tokens: list[str] = []
    for term in entry.terms:
        term_tokens.extend(tokenize(term))
    definition_tokens = tokenize(entry.definition)
    if token_input == "terms":
        return term_tokens
    if token_input == "definitions":
        return definition_tokens
    return term_tokens + definition_tokens


def sif_weight(a: float, p: float) -> float:
    """Smooth inverse frequency weight a/(a+p); 1 at p=0, decreasing in p."""
    if a <= 0:
        raise ValueError(f"weighting parameter a must be positive, got {a}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return a / (a + p)


def _lookup(store: WordVectorStore, token: str) -> tuple[str, np.ndarray] | None:
    """Exact-case lookup first, then the lowercase form."""
    vec = store.get(token)
    if vec is not None:
        return token, vec
    lowered = token.lower()
    if lowered != token:
        vec = store.get(lowered)
        if vec is not None:
            return lowered, vec
    return None


def _probability_for(table: WordProbabilityTable, token: str) -> float:
    """Probability of the matched token, falling back to its lowercase form.

    Frequency corpora are commonly lowercased while vector vocabularies are
    not; a cased token missing from the table borrows the lowercase count
    rather than being treated as maximally rare.
    """
    if token in table:
        return table.probability(token)
    lowered = token.lower()
    if lowered != token and lowered in table:
        return table.probability(lowered)
    return 0.0


def weighted_average_embedding(
    bag: Sequence[str],
    store: WordVectorStore,
    table: WordProbabilityTable | None,
    a: float,
    entry_id: str = "",
) -> EntryEmbedding:
    """Mean of SIF-weighted vectors over the in-vocabulary sub-bag.

    Out-of-vocabulary tokens are skipped entirely so they neither shrink
    the mean nor pull it toward zero; with no in-vocabulary token the
    result is the zero vector, flagged degenerate via token_count == 0.
    """
    total = np.zeros(store.dimension)
    count = 0
    for token in bag:
        hit = _lookup(store, token)
        if hit is None:
            continue
        matched, vec = hit
        weight = 1.0 if table is None else sif_weight(a, _probability_for(table, matched))
        total += weight * vec
        count += 1
    if count:
        total /= count
    return EntryEmbedding(entry_id, total, count)


def _canonical_sign(direction: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component positive."""
    threshold = 1e-12 * max(np.max(np.abs(direction)), 1e-300)
    for component in direction:
        if abs(component) > threshold:
            return direction if component > 0 else -direction
    return direction


def top_principal_directions(
    matrix: np.ndarray,
    k: int,
    tolerance: float = 1e-13,
    max_iterations: int = 1000,
) -> np.ndarray:
    """Top-k principal directions of the uncentered row set.

    Power iteration with projection deflation on the d x d Gram matrix.
    Clustered singular values slow plain power iteration down, so when the
    iteration stalls the Gram matrix is squared (doubling the spectral-gap
    exponent) and iteration resumes. Raises when the numerical rank is
    below k. Signs are canonicalized (first nonzero component positive) so
    repeated runs and row permutations agree.
    """
    n, d = matrix.shape
    if k == 0:
        return np.zeros((0, d))
    gram = matrix.T @ matrix
    scale = max(float(np.trace(gram)), 1e-300)
    directions = np.zeros((k, d))
    rng = np.random.default_rng(0)
    for index in range(k):
        fro = float(np.linalg.norm(gram))
        if fro <= scale * 1e-13:
            raise ValueError(
                f"requested {k} principal directions but matrix rank is {index}"
            )
        powered = gram / fro
        vec = rng.standard_normal(d)
        vec /= np.linalg.norm(vec)
        iterations = 0
        converged = False
        while not converged and iterations < max_iterations:
            for _ in range(40):
                if iterations >= max_iterations:
                    break
                nxt = powered @ vec
                norm = np.linalg.norm(nxt)
                if norm == 0.0:
                    raise ValueError(
                        f"requested {k} principal directions but matrix rank is {index}"
                    )
                nxt /= norm
                iterations += 1
                if np.linalg.norm(nxt - vec) < tolerance:
                    vec = nxt
                    converged = True
                    break
                vec = nxt
            if not converged:
                powered = powered @ powered
                powered /= np.linalg.norm(powered)
        # numerical leakage toward already-found directions stays tiny, but
        # clean it up so the result is orthonormal by construction
        vec -= directions[:index].T @ (directions[:index] @ vec)
        vec /= np.linalg.norm(vec)
        eigenvalue = float(vec @ gram @ vec)
        if eigenvalue <= scale * 1e-12:
            raise ValueError(
                f"requested {k} principal directions but matrix rank is {index}"
            )
        directions[index] = _canonical_sign(vec)
        # projection deflation: remove the found direction from the operator
        gram_vec = gram @ vec
        gram = (gram - np.outer(vec, gram_vec) - np.outer(gram_vec, vec)
                + eigenvalue * np.outer(vec, vec))
    return directions


def remove_top_components(matrix: EmbeddingMatrix, d_pcr: int) -> EmbeddingMatrix:
    """Subtract each row's projections onto the top d_pcr principal directions.

    Directions are computed on the uncentered matrix and recorded on the
    result; afterwards every row is orthogonal to each removed direction.
    """
    if d_pcr < 0:
        raise ValueError(f"d_pcr must be >= 0, got {d_pcr}")
    if d_pcr == 0:
        return replace(matrix, removed_components=np.zeros((0, matrix.matrix.shape[1])))
    non_degenerate = sum(1 for c in matrix.token_counts if c > 0)
    if non_degenerate < d_pcr:
        raise ValueError(
            f"d_pcr={d_pcr} needs at least {d_pcr} non-degenerate rows, "
            f"have {non_degenerate}"
        )
    directions = top_principal_directions(matrix.matrix, d_pcr)
    projected = matrix.matrix - (matrix.matrix @ directions.T) @ directions
    return replace(matrix, matrix=projected, removed_components=directions)


def cosine(v1: np.ndarray, v2: np.ndarray) -> float:
    """Cosine similarity; undefined (error) for zero vectors."""
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    return float(np.dot(v1, v2) / (n1 * n2))


def embed_corpus(
    corpus: EntryCorpus,
    store: WordVectorStore,
    config: EmbeddingConfig,
) -> EmbeddingMatrix:
    """Embed every entry under one configuration.

    Builds each entry's token bag, averages SIF-weighted vectors, then
    removes the configured number of top principal components from the
    assembled matrix. Degenerate (all-OOV) entries stay as zero rows and
    are listed on the result rather than raising.
    """
    ids: list[str] = []
    rows: list[np.ndarray] = []
    counts: list[int] = []
    for entry in corpus:
        bag = entry_token_bag(entry, config.token_input)
        if config.drop_stopwords:
            bag = [t for t in bag if t.lower() not in STOPWORDS]
        embedding = weighted_average_embedding(
            bag, store, config.probability_source, config.a, entry.id)
        ids.append(entry.id)
        rows.append(embedding.vector)
        counts.append(embedding.token_count)
    matrix = EmbeddingMatrix(
        tuple(ids),
        np.vstack(rows) if rows else np.zeros((0, store.dimension)),
        tuple(counts),
        np.zeros((0, store.dimension)),
    )
    return remove_top_components(matrix, config.d_pcr)


def export_embedding_matrix(matrix: EmbeddingMatrix) -> str:
    """Serialize as "entry_id v1 ... vd" lines."""
    lines = []
    for entry_id, row in zip(matrix.entry_ids, matrix.matrix):
        lines.append(entry_id + " " + " ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"
