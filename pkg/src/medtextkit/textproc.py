"""Deterministic text primitives: sentence segmentation, word tokenization,
n-gram counting and syllable estimation.

Everything downstream (metrics, summarizer, search index) tokenizes through
this module so there is exactly one tokenization authority. All functions
NFC-normalize their input first, so outputs are byte-stable across Unicode
encodings of the same text.
"""
from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass

__all__ = [
    "Sentence",
    "STOPWORDS",
    "content_tokens",
    "count_syllables",
    "ngrams",
    "split_sentences",
    "tokenize",
]

# Tokens are maximal runs of letters/digits; single apostrophes or hyphens
# are kept when they join two runs ("post-op", "don't"). Everything else,
# including de-identification brackets like [**2144-4-21**], separates.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*", re.UNICODE)

_TERMINALS = frozenset(".!?")
_VOWELS = frozenset("aeiouy")

# Lowercased abbreviations whose trailing period never ends a sentence.
# Multi-dot forms ("e.g.", "p.m.") are matched against the token including
# its internal periods.
_ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr", "vs", "etc",
    "e.g", "i.e", "cf", "a.m", "p.m", "fig", "no", "al", "approx",
})

# Small fixed stopword list used wherever "content tokens" are needed
# (sentence similarity, option scoring, keyword extraction). Deliberately
# short: clinical terms must never be swallowed.
STOPWORDS = frozenset({
    "a", "an", "the", "and", "or", "but", "if", "then", "than", "so",
    "of", "to", "in", "on", "for", "with", "at", "by", "from", "as",
    "into", "onto", "over", "under", "about", "after", "before",
    "is", "are", "was", "were", "be", "been", "being", "am",
    "has", "have", "had", "do", "does", "did", "done",
    "can", "could", "will", "would", "shall", "should", "may", "might", "must",
    "it", "its", "this", "that", "these", "those", "there", "here",
    "he", "she", "they", "we", "i", "you", "his", "her", "him", "them",
    "their", "our", "your", "my", "me", "us",
    "which", "who", "whom", "whose", "what", "when", "where", "why", "how",
    "not", "no", "nor", "own", "same", "such", "also", "any", "all",
    "each", "both", "more", "most", "other", "some", "only", "very",
})


@dataclass(frozen=True)
class Sentence:
    """One sentence of a source document.

    ``index`` is the 0-based position in the document, ``text`` the original
    substring (leading/trailing whitespace stripped), ``tokens`` the
    lowercased word tokens of that substring.
    """

    index: int
    text: str
    tokens: tuple[str, ...]


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split text into word tokens.

    Tokens are maximal alphanumeric runs with internal apostrophes/hyphens
    retained; standalone punctuation is dropped.

    >>> tokenize("CABG complicated by post-op bleed")
    ['cabg', 'complicated', 'by', 'post-op', 'bleed']
    """
    text = _nfc(text)
    if lowercase:
        text = text.lower()
    return _TOKEN_RE.findall(text)


def ngrams(tokens: list[str] | tuple[str, ...], n: int) -> Counter[tuple[str, ...]]:
    """Count all contiguous n-grams of a token sequence, with multiplicity.

    Raises ValueError for n < 1. For n > len(tokens) the result is empty.
    """
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def count_syllables(word: str) -> int:
    """Estimate syllables of a single token with a vowel-group heuristic.

    Counts maximal vowel groups (a, e, i, o, u, y), subtracts one for a
    terminal silent 'e' unless the word ends in "le" after a consonant,
    and never returns less than 1.

    >>> [count_syllables(w) for w in ("cat", "hydrated", "table", "a")]
    [1, 3, 2, 1]
    """
    if not word:
        raise ValueError("cannot count syllables of an empty token")
    w = _nfc(word).lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in _VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    if w.endswith("e") and not (
        len(w) >= 3 and w.endswith("le") and w[-3] not in _VOWELS
    ):
        groups -= 1
    return max(1, groups)


def content_tokens(text: str) -> set[str]:
    """Distinct lowercased tokens of ``text`` with stopwords removed."""
    return {t for t in tokenize(text) if t not in STOPWORDS}


def _is_abbreviation(text: str, dot: int) -> bool:
    """True when the period at ``dot`` terminates a known abbreviation."""
    start = dot
    while start > 0 and (text[start - 1].isalpha() or text[start - 1] == "."):
        start -= 1
    word = text[start:dot].lstrip(".").lower()
    return word in _ABBREVIATIONS


def _is_boundary(text: str, first: int, last: int) -> bool:
    """Decide whether the terminal-punctuation run text[first..last] ends a sentence.

    The run is a boundary when it is followed (after whitespace) by an
    uppercase letter or digit, or by end-of-text. A lone period inside a
    decimal number or after a known abbreviation is never a boundary.
    """
    if first == last and text[first] == ".":
        prev_ch = text[first - 1] if first > 0 else ""
        next_ch = text[first + 1] if first + 1 < len(text) else ""
        if prev_ch.isdigit() and next_ch.isdigit():
            return False
        if _is_abbreviation(text, first):
            return False
    pos = last + 1
    if pos >= len(text) or not text[pos].isspace():
        # Mid-word period ("e.g.x") or no separating whitespace: only
        # end-of-text terminates here.
        return pos >= len(text)
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text):
        return True
    nxt = text[pos]
    return nxt.isupper() or nxt.isdigit()


def split_sentences(text: str) -> list[Sentence]:
    """Segment text into sentences.

    Splits after '.', '!' or '?' when followed by whitespace and an
    uppercase letter or digit (or end-of-text); periods inside decimal
    numbers and after common abbreviations do not split. Whitespace-only
    input yields an empty list. Spans that carry no word token (e.g. stray
    punctuation) are merged into their neighbor so that every returned
    sentence has tokens whenever the input has any.

    >>> [s.text for s in split_sentences("He weighed 3.5 kg. Then he slept.")]
    ['He weighed 3.5 kg.', 'Then he slept.']
    """
    text = _nfc(text)
    ends: list[int] = []
    i, n = 0, len(text)
    while i < n:
        if text[i] in _TERMINALS:
            last = i
            while last + 1 < n and text[last + 1] in _TERMINALS:
                last += 1
            if _is_boundary(text, i, last):
                ends.append(last + 1)
            i = last + 1
        else:
            i += 1
    if n and (not ends or ends[-1] < n) and text[ends[-1] if ends else 0 :].strip():
        ends.append(n)

    spans: list[tuple[int, int]] = []
    start = 0
    for end in ends:
        spans.append((start, end))
        start = end

    sentences: list[Sentence] = []
    pending_start: int | None = None
    for span_start, span_end in spans:
        raw = text[span_start:span_end]
        stripped = raw.strip()
        if not stripped:
            continue
        tokens = tuple(tokenize(stripped))
        if not tokens:
            # Token-less span: extend the previous sentence, or hold it to
            # prepend to the next one.
            if sentences:
                prev = sentences[-1]
                sentences[-1] = Sentence(
                    prev.index, (prev.text + raw).rstrip(), prev.tokens
                )
            elif pending_start is None:
                pending_start = span_start
            continue
        if pending_start is not None:
            stripped = text[pending_start:span_end].strip()
            pending_start = None
        sentences.append(Sentence(len(sentences), stripped, tokens))
    if pending_start is not None and not sentences:
        stripped = text[pending_start:].strip()
        if stripped:
            sentences.append(Sentence(0, stripped, ()))
    return sentences
