"""Pre-trained word vectors and word-probability tables.

Vectors come from the public text layout ("token v1 ... vd" per line,
optionally gzipped). Probabilities are estimated from raw token streams or
loaded from pre-counted "token count" frequency files; unknown tokens get
probability 0, which the weighting scheme treats as maximally rare.
"""
from __future__ import annotations

import gzip
from collections import Counter
from pathlib import Path
from typing import Iterable

import numpy as np


class VectorFormatError(ValueError):
    """Raised for malformed vector or frequency files."""


class WordVectorStore:
    """Token -> d-dimensional vector map with a single fixed dimension."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise VectorFormatError("vector store is empty")
        dims = {v.shape for v in vectors.values()}
        if len(dims) != 1:
            raise VectorFormatError(f"inconsistent vector dimensions: {sorted(dims)}")
        self._vectors = vectors
        self.dimension = next(iter(dims))[0]
        for token, vec in vectors.items():
            if not np.all(np.isfinite(vec)):
                raise VectorFormatError(f"non-finite components in vector for {token!r}")

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, token: str) -> bool:
        return token in self._vectors

    def get(self, token: str) -> np.ndarray | None:
        """Case-exact lookup; case policy is the embedding layer's concern."""
        return self._vectors.get(token)


def load_vectors(path: str | Path) -> WordVectorStore:
    """Load a text vector file ("token v1 ... vd" per line, optionally .gz)."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    vectors: dict[str, np.ndarray] = {}
    dimension = None
    with opener(path, "rt", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                if not line.strip():
                    continue
                raise VectorFormatError(f"line {line_no}: no vector components")
            token = parts[0]
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise VectorFormatError(f"line {line_no}: {exc}") from None
            if dimension is None:
                dimension = vec.shape[0]
            elif vec.shape[0] != dimension:
                raise VectorFormatError(
                    f"line {line_no}: dimension mismatch, expected {dimension} "
                    f"components, got {vec.shape[0]}"
                )
            vectors[token] = vec
    if not vectors:
        raise VectorFormatError(f"{path}: empty vector file")
    return WordVectorStore(vectors)


class WordProbabilityTable:
    """Relative token frequencies; p(token) = count/total, 0 when unknown."""

    def __init__(self, counts: Counter[str] | dict[str, int]):
        self.counts = Counter(counts)
        bad = [t for t, c in self.counts.items() if c <= 0]
        if bad:
            raise VectorFormatError(f"non-positive counts for {bad[:3]}")
        self.total = sum(self.counts.values())
        if self.total <= 0:
            raise VectorFormatError("probability table has no counts")

    def probability(self, token: str) -> float:
        return self.counts.get(token, 0) / self.total

    def __contains__(self, token: str) -> bool:
        return token in self.counts

    def __len__(self) -> int:
        return len(self.counts)

    def most_common(self, n: int | None = None):
        return self.counts.most_common(n)


def probability_of(table: WordProbabilityTable | None, token: str) -> float:
    """p(token) under the table; a missing table means the uniform source (p=0)."""
    if table is None:
        return 0.0
    return table.probability(token)


def build_probability_table(token_stream: Iterable[str]) -> WordProbabilityTable:
    """Count exact frequencies over a token stream."""
    counts = Counter(token_stream)
    if not counts:
        raise VectorFormatError("empty token stream")
    return WordProbabilityTable(counts)


def load_probability_table(path: str | Path) -> WordProbabilityTable:
    """Load a pre-counted frequency file ("token count" per line)."""
    counts: Counter[str] = Counter()
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise VectorFormatError(
                f"line {line_no}: expected 'token count', got {len(parts)} fields"
            )
        token, count_field = parts
        try:
            count = int(count_field)
        except ValueError:
            raise VectorFormatError(f"line {line_no}: bad count {count_field!r}") from None
        if count <= 0:
            raise VectorFormatError(f"line {line_no}: count must be positive")
        counts[token] += count
    if not counts:
        raise VectorFormatError(f"{path}: empty frequency file")
    return WordProbabilityTable(counts)
