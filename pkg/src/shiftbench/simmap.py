"""Embedding storage and the cosine-similarity kernel used by the mapping oracle.

Vectors live in a pluggable space: either loaded from an embedding CSV (for
externally computed, e.g. neural, embeddings) or produced by the built-in
deterministic keyword embedder, so the pipeline runs with no ML dependency.

Embedding file format: CSV with header ``key,dim,v0,...,v{d-1}`` and one row
per vector; all rows must share the same dimension.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UndefinedSimilarityError, UnscorableSampleError, ValidationError
from .manifest import Sample, canonical_class

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1


def as_vector(values) -> np.ndarray:
    """Validate and convert to a float64 vector (finite entries, ndim 1)."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise ValidationError("embedding vector must be a non-empty 1-D array")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("embedding vector contains NaN or Inf")
    return vec


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable key -> vector map with a single shared dimension."""

    dims: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dims <= 0:
            raise ValidationError("embedding dimension must be positive")
        clean = {}
        for key, values in self.entries.items():
            vec = as_vector(values)
            if vec.size != self.dims:
                raise ValidationError(
                    f"embedding {key!r} has dim {vec.size}, store expects {self.dims}"
                )
            vec.setflags(write=False)
            clean[key] = vec
        object.__setattr__(self, "entries", clean)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: str) -> np.ndarray | None:
        return self.entries.get(key)


def load_embeddings(path) -> EmbeddingStore:
    """Load an embedding CSV, validating the header and constant dimension."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty embedding file") from None
        if len(header) < 3 or header[0] != "key" or header[1] != "dim":
            raise ValidationError(f"{path}: header must be key,dim,v0,...,v{{d-1}}")
        dims = len(header) - 2
        expected = ["key", "dim"] + [f"v{i}" for i in range(dims)]
        if header != expected:
            raise ValidationError(f"{path}: malformed embedding header {header!r}")
        entries = {}
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dims + 2:
                raise ValidationError(
                    f"{path}:{row_no}: expected {dims + 2} fields, got {len(row)}"
                )
            key = row[0]
            if key in entries:
                raise ValidationError(f"{path}:{row_no}: duplicate key {key!r}")
            if int(row[1]) != dims:
                raise ValidationError(
                    f"{path}:{row_no}: dim field {row[1]} disagrees with header ({dims})"
                )
            try:
                entries[key] = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise ValidationError(f"{path}:{row_no}: non-numeric value") from exc
    return EmbeddingStore(dims=dims, entries=entries)


def save_embeddings(store: EmbeddingStore, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "dim"] + [f"v{i}" for i in range(store.dims)])
        for key in sorted(store.entries):
            vec = store.entries[key]
            writer.writerow([key, store.dims] + [repr(float(v)) for v in vec])


def cosine_similarity(x: np.ndarray, y: np.ndarray) -> float:
    """cos(x, y) = (x . y) / (||x|| * ||y||), clamped to [-1, 1].

    Symmetric bit-for-bit: the elementwise products of x.y and y.x are
    identical, and they are accumulated in the same index order.
    """
    x = as_vector(x)
    y = as_vector(y)
    if x.size != y.size:
        raise ValidationError(f"dimension mismatch: {x.size} vs {y.size}")
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx == 0.0 or ny == 0.0:
        raise UndefinedSimilarityError("cosine similarity undefined for zero-norm vector")
    value = float(np.dot(x, y)) / (nx * ny)
    return max(-1.0, min(1.0, value))


def fnv1a64(text: str) -> int:
    """64-bit FNV-1a over the UTF-8 bytes of ``text``.

    offset basis 0xcbf29ce484222325, prime 0x100000001b3.
    """
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def keyword_embed(tokens, dims: int) -> np.ndarray:
    """Deterministic hashed bag-of-words embedding, L2-normalized.

    Each token is lower-cased and hashed with 64-bit FNV-1a. The hash maps to
    index ``(h >> 1) % dims`` and contributes sign +1 when ``h`` is even, -1
    when odd (sign from hash parity, index from the remaining bits so the two
    stay decoupled). Signed counts accumulate per index and the result is
    L2-normalized, so the output is order-invariant over the token bag.
    """
    if dims < 8:
        raise ValidationError("keyword embedding dimension must be >= 8")
    tokens = list(tokens)
    if not tokens:
        raise ValidationError("cannot embed an empty token list")
    acc = np.zeros(dims, dtype=np.float64)
    for token in tokens:
        h = fnv1a64(str(token).lower())
        sign = 1.0 if (h & 1) == 0 else -1.0
        acc[(h >> 1) % dims] += sign
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        raise ValidationError(
            "token contributions cancelled to the zero vector; embedding undefined"
        )
    return acc / norm


def class_vector(sample: Sample, store: EmbeddingStore | None, dims: int) -> np.ndarray:
    """Vector representing a sample for similarity scoring.

    Precedence: the store entry under ``embedding_ref`` when present, else the
    keyword embedding of ``prompt_keywords`` with the sample's class name
    appended (once, if not already among the keywords).
    """
    if store is not None and sample.embedding_ref is not None:
        vec = store.get(sample.embedding_ref)
        if vec is not None:
            return vec
    if sample.prompt_keywords:
        tokens = [t.lower() for t in sample.prompt_keywords]
        if sample.class_name not in tokens:
            tokens.append(sample.class_name)
        return keyword_embed(tokens, dims)
    if sample.embedding_ref is not None:
        raise UnscorableSampleError(
            f"sample {sample.id!r}: embedding_ref {sample.embedding_ref!r} not in store"
        )
    raise UnscorableSampleError(
        f"sample {sample.id!r} has neither embedding_ref nor prompt_keywords"
    )


def label_vector(class_name: str, store: EmbeddingStore | None, dims: int) -> np.ndarray:
    """Vector representing a bare class label (the anchor side of the oracle).

    Looks up the class name as a store key first, so externally supplied class
    embeddings take precedence over the keyword embedding of the name itself.
    """
    canon = canonical_class(class_name)
    if store is not None:
        vec = store.get(canon)
        if vec is not None:
            return vec
    return keyword_embed([canon], dims)
