"""Graph-based extractive summarization.

Sentences become graph nodes; edges are weighted by content-token overlap
normalized by log sentence sizes; a damped weighted-PageRank iteration ranks
the nodes and the top-k sentences are emitted in document order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from medtextkit import textproc
from medtextkit._kernels import rank_scores
from medtextkit.textproc import Sentence

__all__ = [
    "RankConfig",
    "SentenceGraph",
    "build_graph",
    "extract_summary",
    "rank",
    "select_indices",
]


@dataclass(frozen=True)
class RankConfig:
    """Iteration parameters for the ranking loop."""

    damping: float = 0.85
    tolerance: float = 1e-4  # L1 change per iteration
    max_iterations: int = 100

    def __post_init__(self) -> None:
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must be in (0, 1), got {self.damping}")
        if self.tolerance <= 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SentenceGraph:
    """Sentences plus a symmetric, zero-diagonal similarity matrix."""

    sentences: tuple[Sentence, ...]
    weights: tuple[tuple[float, ...], ...]


def _content_set(sentence: Sentence) -> frozenset[str]:
    return frozenset(t for t in sentence.tokens if t not in textproc.STOPWORDS)


def build_graph(sentences: list[Sentence]) -> SentenceGraph:
    """Build the similarity graph over a sentence list.

    Edge weight is the number of shared distinct content tokens divided by
    the sum of the natural-log sizes of the two content sets. Sentences with
    fewer than two content tokens take weight 0 on all their edges (the
    log-zero guard).
    """
    if not sentences:
        raise ValueError("cannot build a graph over zero sentences")
    contents = [_content_set(s) for s in sentences]
    logs = [math.log(len(c)) if len(c) >= 2 else 0.0 for c in contents]
    n = len(sentences)
    weights = [[0.0] * n for _ in range(n)]
    for i in range(n):
        if len(contents[i]) < 2:
            continue
        for j in range(i + 1, n):
            if len(contents[j]) < 2:
                continue
            shared = len(contents[i] & contents[j])
            if shared:
                w = shared / (logs[i] + logs[j])
                weights[i][j] = w
                weights[j][i] = w
    return SentenceGraph(tuple(sentences), tuple(tuple(row) for row in weights))


def rank(graph: SentenceGraph, config: RankConfig | None = None) -> list[float]:
    """Score every node of the graph; isolated nodes settle at 1 - damping."""
    config = config or RankConfig()
    return rank_scores(
        [list(row) for row in graph.weights],
        config.damping,
        config.tolerance,
        config.max_iterations,
    )


def select_indices(
    sentences: list[Sentence], k: int, config: RankConfig | None = None
) -> list[int]:
    """Indices of the top-k sentences, ascending (document order).

    Ties rank the earlier sentence higher.
    """
    if k < 1:
        raise ValueError(f"sentence budget must be >= 1, got {k}")
    if not sentences:
        return []
    graph = build_graph(sentences)
    scores = rank(graph, config)
    by_score = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    return sorted(by_score[:k])


def extract_summary(text: str, k: int, config: RankConfig | None = None) -> str:
    """Top-k sentence extractive summary of ``text``, in original order."""
    if k < 1:
        raise ValueError(f"sentence budget must be >= 1, got {k}")
    sentences = textproc.split_sentences(text)
    if not sentences:
        return ""
    chosen = select_indices(sentences, k, config)
    return " ".join(sentences[i].text for i in chosen)


def budget_to_sentence_count(text: str, max_words: int) -> int:
    """Largest k whose k-sentence summary stays within a word budget.

    Top-k selections are nested, so this walks the ranking greedily. Returns
    0 when even the single best sentence exceeds the budget.
    """
    sentences = textproc.split_sentences(text)
    if not sentences:
        return 0
    graph = build_graph(sentences)
    scores = rank(graph)
    by_score = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    words = 0
    k = 0
    for i in by_score:
        words += len(sentences[i].tokens)
        if words > max_words:
            break
        k += 1
    return k
