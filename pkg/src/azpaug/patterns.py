"""POS-window collocation mining around zero-pronoun gaps.

For every gold gap we read a window of tags (default two before and two
after, with <S>/</S> filling positions past the sentence edges), score each
distinct window with the collocation t-test

    t = (x_bar - mu) / sqrt(s2 / n)

where x_bar is the window's relative frequency among all gap windows, mu
its expected frequency under tag independence (product of slot unigram
probabilities; boundary slots contribute 1), s2 = x_bar * (1 - x_bar), and
n the total number of windows. The top-scoring windows then act as exact
matchers proposing gap positions in unlabeled tagged sentences.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .errors import ParseError, ValidationError
from .tagset import BOUNDARY_TAGS, SENT_END, SENT_START


@dataclass(frozen=True, order=True)
class PosPattern:
    """Tags flanking a gap: ``before`` ends at gap-1, ``after`` starts at the gap."""

    before: tuple
    after: tuple

    @property
    def window(self) -> int:
        return len(self.before)

    def slots(self) -> tuple:
        return self.before + self.after

    def __str__(self) -> str:
        return f"{' '.join(self.before)} | {' '.join(self.after)}"

    @classmethod
    def parse(cls, text: str) -> "PosPattern":
        left, sep, right = text.partition("|")
        if not sep:
            raise ParseError(f"pattern {text!r} has no '|' separator")
        before, after = tuple(left.split()), tuple(right.split())
        if not before or len(before) != len(after):
            raise ParseError(f"pattern {text!r} has uneven window sides")
        return cls(before=before, after=after)


@dataclass(frozen=True)
class PatternStats:
    pattern: PosPattern
    count: int
    x_bar: float
    mu: float
    s2: float
    n: int
    t: float


def window_at(tags, gap: int, window: int = 2) -> PosPattern:
    """The pattern around position ``gap`` in a tag sequence, boundary-filled."""
    before = tuple(tags[i] if i >= 0 else SENT_START for i in range(gap - window, gap))
    after = tuple(tags[i] if i < len(tags) else SENT_END for i in range(gap, gap + window))
    return PosPattern(before=before, after=after)


def extract_windows(sentences, window: int = 2) -> Counter:
    """Multiset of patterns, one per (sentence, gap) pair in ``sentences``."""
    if window < 1:
        raise ValidationError(f"window must be >= 1, got {window}")
    windows: Counter = Counter()
    for sentence in sentences:
        tags = sentence.pos_tags()
        for gap in sentence.azp_gaps:
            windows[window_at(tags, gap, window)] += 1
    return windows


def unigram_counts(sentences) -> Counter:
    """Tag unigram multiset over a corpus, for the independence baseline."""
    counts: Counter = Counter()
    for sentence in sentences:
        counts.update(sentence.pos_tags())
    return counts


def score_patterns(windows: Counter, unigrams) -> list:
    """t-score every distinct window; highest t first.

    ``unigrams`` is a multiset (or iterable) of POS tags from the same
    corpus. Boundary pseudo-tags contribute probability 1 to the expected
    frequency; they carry no distributional evidence.
    """
    n = sum(windows.values())
    if n == 0:
        raise ValidationError("empty window set")
    counts = Counter(unigrams)
    for tag in BOUNDARY_TAGS:
        counts.pop(tag, None)
    total = sum(counts.values())

    def slot_prob(tag: str) -> float:
        if tag in BOUNDARY_TAGS:
            return 1.0
        return counts[tag] / total if total else 0.0

    stats = []
    for pattern, count in windows.items():
        x_bar = count / n
        mu = math.prod(slot_prob(tag) for tag in pattern.slots())
        s2 = x_bar * (1.0 - x_bar)
        t = math.inf if s2 == 0.0 else (x_bar - mu) / math.sqrt(s2 / n)
        stats.append(PatternStats(pattern=pattern, count=count, x_bar=x_bar, mu=mu, s2=s2, n=n, t=t))
    stats.sort(key=_rank_key)
    return stats


def _rank_key(stat: PatternStats):
    return (-stat.t, -stat.count, stat.pattern.slots())


def select_top(stats, k: int = 5) -> list:
    """The k best patterns: highest t, then higher count, then tag order."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    ranked = sorted(stats, key=_rank_key)
    return [stat.pattern for stat in ranked[:k]]


def match_patterns(patterns, sentence) -> list:
    """Ascending gap positions in ``sentence`` whose window equals a pattern.

    The caller is responsible for the skip-first-sentence rule when
    scanning summary pages.
    """
    pattern_set = set(patterns)
    if not pattern_set:
        return []
    sizes = {p.window for p in pattern_set}
    if len(sizes) != 1:
        raise ValidationError(f"patterns mix window sizes {sorted(sizes)}")
    window = sizes.pop()
    tags = sentence.pos_tags()
    return [gap for gap in range(len(tags) + 1) if window_at(tags, gap, window) in pattern_set]


# ---------------------------------------------------------------------------
# Pattern-file round trip: ``TAG TAG | TAG TAG<TAB>t<TAB>count`` per line.


def write_patterns(stats: Iterable[PatternStats], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for stat in stats:
            t = "inf" if math.isinf(stat.t) else f"{stat.t:.6f}"
            handle.write(f"{stat.pattern}\t{t}\t{stat.count}\n")


def read_patterns(path) -> list:
    patterns = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ParseError("expected pattern, t, count columns", line=lineno)
            patterns.append(PosPattern.parse(cols[0]))
    return patterns
