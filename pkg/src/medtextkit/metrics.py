"""Quantitative evaluation measures: ROUGE-1/2/L, corpus BLEU, FKGL
readability, accuracy, Likert aggregation and binarized percentage-agreement.

All overlap metrics operate on token lists produced by
:func:`medtextkit.textproc.tokenize` and report values in [0, 1]; display
scaling (x100) is a presentation concern and happens in the CLI only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from medtextkit import textproc
from medtextkit._kernels import lcs_length

__all__ = [
    "AgreementReport",
    "BleuScore",
    "LIKERT_CRITERIA",
    "ReadabilityScore",
    "RougeScore",
    "accuracy",
    "agreement_report",
    "corpus_bleu",
    "fkgl",
    "likert_summary",
    "percentage_agreement",
    "rouge_l",
    "rouge_n",
]

TokenSeq = Sequence[str]

LIKERT_CRITERIA = ("readability", "relevancy", "accuracy", "completeness")

_BLEU_EPSILON = 1e-9


@dataclass(frozen=True)
class RougeScore:
    """Precision/recall/F1 triple for one ROUGE variant."""

    precision: float
    recall: float
    f1: float
    degenerate: bool = False


@dataclass(frozen=True)
class BleuScore:
    """Corpus BLEU with its components."""

    bleu: float
    brevity_penalty: float
    precisions: tuple[float, ...]
    candidate_len: int
    reference_len: int


@dataclass(frozen=True)
class ReadabilityScore:
    """Flesch-Kincaid grade level plus the counts that produced it."""

    fkgl: float
    words: int
    sentences: int
    syllables: int


@dataclass(frozen=True)
class AgreementReport:
    """Binarized percentage agreement between two raters, per criterion."""

    per_criterion: dict[str, float]
    n_items: int
    binarization_threshold: int = 3


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _rouge_pair(overlap: int, cand_total: int, ref_total: int) -> RougeScore:
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return RougeScore(precision, recall, _f1(precision, recall))


def _best_by_f1(scores: list[RougeScore]) -> RougeScore:
    best = scores[0]
    for s in scores[1:]:
        if s.f1 > best.f1:
            best = s
    return best


def rouge_n(candidate: TokenSeq, references: Sequence[TokenSeq], n: int) -> RougeScore:
    """Clipped n-gram overlap ROUGE against the best-F1 reference.

    Recall is overlap over the reference n-gram total, precision over the
    candidate's. With several references the triple of the highest-F1
    reference is reported. An empty candidate scored against empty
    references yields all zeros with ``degenerate`` set.
    """
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    if not references:
        raise ValueError("at least one reference is required")
    if not candidate and all(not r for r in references):
        return RougeScore(0.0, 0.0, 0.0, degenerate=True)
    cand_counts = textproc.ngrams(list(candidate), n)
    cand_total = sum(cand_counts.values())
    scores = []
    for ref in references:
        ref_counts = textproc.ngrams(list(ref), n)
        overlap = sum(
            min(count, ref_counts[gram]) for gram, count in cand_counts.items()
        )
        scores.append(_rouge_pair(overlap, cand_total, sum(ref_counts.values())))
    return _best_by_f1(scores)


def rouge_l(candidate: TokenSeq, references: Sequence[TokenSeq]) -> RougeScore:
    """Longest-common-subsequence ROUGE over whole token sequences."""
    if not references:
        raise ValueError("at least one reference is required")
    if not candidate and all(not r for r in references):
        return RougeScore(0.0, 0.0, 0.0, degenerate=True)
    ids: dict[str, int] = {}
    cand_ids = [ids.setdefault(t, len(ids)) for t in candidate]
    scores = []
    for ref in references:
        ref_ids = [ids.setdefault(t, len(ids)) for t in ref]
        lcs = lcs_length(cand_ids, ref_ids)
        scores.append(_rouge_pair(lcs, len(candidate), len(ref)))
    return _best_by_f1(scores)


def corpus_bleu(
    candidates: Sequence[TokenSeq],
    references: Sequence[TokenSeq],
    max_order: int = 4,
) -> BleuScore:
    """Corpus-level BLEU: pooled modified n-gram precisions, uniform weights.

    Brevity penalty is exp(1 - r/c) when the candidate corpus is not longer
    than the reference corpus, else 1. Zero numerators for orders >= 2 are
    smoothed with a 1e-9 epsilon, but only when at least one unigram
    matched; corpora with no unigram overlap score exactly 0.
    """
    if len(candidates) != len(references):
        raise ValueError(
            f"candidate/reference count mismatch: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise ValueError("at least one candidate/reference pair is required")
    matches = [0] * max_order
    totals = [0] * max_order
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_len += len(cand)
        ref_len += len(ref)
        for order in range(1, max_order + 1):
            cand_counts = textproc.ngrams(list(cand), order)
            ref_counts = textproc.ngrams(list(ref), order)
            matches[order - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in cand_counts.items()
            )
            totals[order - 1] += max(0, len(cand) - order + 1)

    precisions: list[float] = []
    for order in range(1, max_order + 1):
        num = float(matches[order - 1])
        if num == 0.0 and order >= 2 and matches[0] > 0:
            num = _BLEU_EPSILON
        precisions.append(num / max(totals[order - 1], 1))

    if cand_len == 0 or cand_len > ref_len:
        brevity_penalty = 1.0
    else:
        brevity_penalty = math.exp(1.0 - ref_len / cand_len)

    if any(p == 0.0 for p in precisions):
        bleu = 0.0
    else:
        log_mean = sum(math.log(p) for p in precisions) / max_order
        bleu = brevity_penalty * math.exp(log_mean)
    return BleuScore(bleu, brevity_penalty, tuple(precisions), cand_len, ref_len)


def fkgl(text: str) -> ReadabilityScore:
    """Flesch-Kincaid grade level of a text.

    0.39 * (words/sentences) + 11.8 * (syllables/words) - 15.59, with counts
    from :mod:`medtextkit.textproc`. Unclamped: very simple text goes
    negative.
    """
    words = textproc.tokenize(text)
    if not words:
        raise ValueError("FKGL needs at least one word")
    sentences = len(textproc.split_sentences(text))
    syllables = sum(textproc.count_syllables(w) for w in words)
    score = 0.39 * (len(words) / sentences) + 11.8 * (syllables / len(words)) - 15.59
    return ReadabilityScore(score, len(words), sentences, syllables)


def accuracy(predictions: Sequence[int], gold: Sequence[int]) -> float:
    """Fraction of positions where prediction equals gold."""
    if len(predictions) != len(gold):
        raise ValueError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(gold)}"
        )
    if not predictions:
        raise ValueError("accuracy of an empty list is undefined")
    return sum(p == g for p, g in zip(predictions, gold)) / len(predictions)


def _check_likert(value: Any, criterion: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
        raise ValueError(f"{criterion} score must be an integer in 1..5, got {value!r}")
    return value


def likert_summary(ratings: Iterable[Any]) -> dict[str, float]:
    """Arithmetic mean per criterion over rating records.

    Records expose the four criterion attributes (readability, relevancy,
    accuracy, completeness), each an integer in 1..5.
    """
    sums = dict.fromkeys(LIKERT_CRITERIA, 0)
    count = 0
    for record in ratings:
        for criterion in LIKERT_CRITERIA:
            sums[criterion] += _check_likert(getattr(record, criterion), criterion)
        count += 1
    if count == 0:
        raise ValueError("at least one rating record is required")
    return {criterion: sums[criterion] / count for criterion in LIKERT_CRITERIA}


def percentage_agreement(
    rater_a: Sequence[int], rater_b: Sequence[int], threshold: int = 3
) -> float:
    """Binarized percentage agreement between two score vectors.

    Scores at or above ``threshold`` binarize to 1, below to 0; the result
    is the fraction of positions where the binarized values coincide.
    """
    if len(rater_a) != len(rater_b):
        raise ValueError(
            f"rater length mismatch: {len(rater_a)} vs {len(rater_b)}"
        )
    if not rater_a:
        raise ValueError("agreement of empty score vectors is undefined")
    for scores in (rater_a, rater_b):
        for s in scores:
            _check_likert(s, "rating")
    agree = sum((a >= threshold) == (b >= threshold) for a, b in zip(rater_a, rater_b))
    return agree / len(rater_a)


def agreement_report(
    ratings_a: dict[str, Sequence[int]],
    ratings_b: dict[str, Sequence[int]],
    threshold: int = 3,
) -> AgreementReport:
    """Per-criterion percentage agreement for two raters' co-rated items."""
    per_criterion = {}
    n_items = 0
    for criterion in LIKERT_CRITERIA:
        a, b = ratings_a[criterion], ratings_b[criterion]
        per_criterion[criterion] = percentage_agreement(a, b, threshold)
        n_items = len(a)
    return AgreementReport(per_criterion, n_items, threshold)
