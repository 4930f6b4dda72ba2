"""Synthetic corpora for benchmarks and acceptance runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import FieldKind, FieldSchema, Schema


def skills_schema() -> Schema:
    return Schema([FieldSchema("category", FieldKind.EXACT_STRING),
                   FieldSchema("skills", FieldKind.EXACT_STRING)])


def zipf_corpus(n_docs: int, n_terms: int, terms_per_doc: int = 10, n_categories: int = 20,
                seed: int = 0, exponent: float = 1.0) -> list[dict]:
    """Docs with a ``category`` and a Zipf-distributed ``skills`` list.

    Each category boosts its own slice of the vocabulary so discovery from a
    category finds positively and negatively related skills.
    """
    rng = np.random.default_rng(seed)
    base = 1.0 / np.arange(1, n_terms + 1) ** exponent
    base /= base.sum()
    slice_len = max(n_terms // n_categories, 1)
    cats = rng.integers(0, n_categories, n_docs)
    weights = []
    for c in range(n_categories):
        w = base.copy()
        w[c * slice_len:(c + 1) * slice_len] *= 20
        weights.append(w / w.sum())
    hi = terms_per_doc + terms_per_doc // 2
    counts = rng.integers(max(terms_per_doc // 2, 1), hi + 1, n_docs)
    picks = np.empty((n_docs, hi), dtype=np.int64)
    for c in range(n_categories):
        rows = np.flatnonzero(cats == c)
        picks[rows] = rng.choice(n_terms, (rows.size, hi), p=weights[c])
    docs = []
    for i in range(n_docs):
        chosen = np.unique(picks[i, :counts[i]])
        docs.append({"id": f"doc{i}", "category": f"cat{cats[i]}",
                     "skills": [f"skill{t}" for t in chosen]})
    return docs


@dataclass
class PlantedCorpus:
    docs: list[dict]
    strong: list[tuple[str, str]]
    independent: list[tuple[str, str]]


def planted_pairs_corpus(n_docs: int = 10_000, n_strong: int = 200, n_independent: int = 200,
                         n_filler: int = 2_000, filler_per_doc: int = 8, seed: int = 0,
                         rate: tuple[float, float] = (0.005, 0.03),
                         co_rate: float = 0.7) -> PlantedCorpus:
    """Corpus over one ``terms`` field with planted term pairs.

    Strong pair ``(a, b)``: ``a`` lands in each doc with a probability drawn
    from ``rate``; ``b`` joins ``co_rate`` of those docs and also appears
    elsewhere at its own background rate. Independent pair: both terms are
    placed by separate Bernoulli draws, so their co-occurrence is chance.
    Filler terms give every document realistic bulk.
    """
    rng = np.random.default_rng(seed)
    terms: list[list[str]] = [[] for _ in range(n_docs)]

    def place(mask, name):
        for d in np.flatnonzero(mask):
            terms[d].append(name)

    strong, independent = [], []
    for i in range(n_strong):
        a, b = f"strong{i}a", f"strong{i}b"
        qa, qb = rng.uniform(*rate, 2)
        in_a = rng.random(n_docs) < qa
        in_b = (in_a & (rng.random(n_docs) < co_rate)) | (~in_a & (rng.random(n_docs) < qb))
        place(in_a, a)
        place(in_b, b)
        strong.append((a, b))
    for i in range(n_independent):
        a, b = f"indep{i}a", f"indep{i}b"
        qa, qb = rng.uniform(*rate, 2)
        place(rng.random(n_docs) < qa, a)
        place(rng.random(n_docs) < qb, b)
        independent.append((a, b))
    zipf = 1.0 / np.arange(1, n_filler + 1)
    zipf /= zipf.sum()
    for d in range(n_docs):
        picks = np.unique(rng.choice(n_filler, filler_per_doc, p=zipf))
        terms[d].extend(f"filler{t}" for t in picks)
    docs = [{"id": f"doc{d}", "terms": t} for d, t in enumerate(terms)]
    return PlantedCorpus(docs, strong, independent)


def planted_schema() -> Schema:
    return Schema([FieldSchema("terms", FieldKind.EXACT_STRING)])
