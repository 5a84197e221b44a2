"""Explicit-subject detection and removal, plus two-sentence sample assembly.

Removing a verb's overt subject turns a sentence into a zero-pronoun
sentence. Subjects are found from dependency columns when the corpus has
them; otherwise a verb-subject-order heuristic is used: the nearest
maximal nominal chunk strictly after the verb, cut off at the first
preposition, and accepted only if its head agrees with the verb in number
and gender (so the dropped subject stays recoverable from the verb's own
morphology).

Assembly pairs a page's first sentence (which carries the title mention,
the designated true antecedent) with a later sentence containing the gap.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from . import morph
from .corpus import AzpSample, Sentence, SummaryPage
from .errors import ValidationError
from .normalize import normalize_text
from .tagset import NOMINAL_TAGS, PREP_TAGS, VERB_TAGS

SUBJECT_DEPRELS = frozenset({"nsubj", "subj", "SBJ"})


def _subtree_span(sentence: Sentence, root: int) -> tuple:
    """Contiguous extent of a dependency subtree, or just the root token."""
    members = {root}
    changed = True
    while changed:
        changed = False
        for tok in sentence.tokens:
            if tok.head in members and tok.index not in members:
                members.add(tok.index)
                changed = True
    lo, hi = min(members), max(members)
    if members == set(range(lo, hi + 1)):
        return (lo, hi + 1)
    return (root, root + 1)


def find_subject(sentence: Sentence, verb_index: int, lex: morph.MorphLexicon,
                 strict: bool = True) -> Optional[tuple]:
    """Token span of the verb's explicit subject, or None.

    Dependency annotations, when present on the sentence, override the
    positional heuristic.
    """
    if not 0 <= verb_index < len(sentence.tokens):
        raise ValidationError(f"verb_index {verb_index} out of range")
    verb = sentence.tokens[verb_index]
    if verb.pos not in VERB_TAGS:
        raise ValidationError(f"token at {verb_index} has tag {verb.pos!r}, not a verb tag")

    if any(tok.deprel is not None for tok in sentence.tokens):
        for tok in sentence.tokens:
            if tok.head == verb_index and tok.deprel in SUBJECT_DEPRELS:
                return _subtree_span(sentence, tok.index)
        return None

    verb_feats = morph.analyze(verb, lex)
    i = verb_index + 1
    while i < len(sentence.tokens):
        pos = sentence.tokens[i].pos
        if pos in PREP_TAGS:
            return None
        if pos in NOMINAL_TAGS:
            end = i
            while end < len(sentence.tokens) and sentence.tokens[end].pos in NOMINAL_TAGS:
                end += 1
            head = sentence.tokens[morph.span_head_index(sentence, i, end)]
            if morph.agrees(verb_feats, morph.analyze(head, lex), strict=strict):
                return (i, end)
            i = end
        else:
            i += 1
    return None


def remove_subject(sentence: Sentence, span: tuple) -> Sentence:
    """Delete the span's tokens and record a gap at its former start.

    Remaining tokens are renumbered; pre-existing gaps shift left past the
    deletion (gaps inside the span collapse onto its start).
    """
    start, end = span
    if not 0 <= start < end <= len(sentence.tokens):
        raise ValidationError(f"span ({start}, {end}) empty or out of bounds")
    width = end - start
    tokens = [
        replace(tok, index=tok.index if tok.index < start else tok.index - width)
        for tok in sentence.tokens
        if not start <= tok.index < end
    ]
    gaps = {start}
    for gap in sentence.azp_gaps:
        if gap <= start:
            gaps.add(gap)
        elif gap >= end:
            gaps.add(gap - width)
        else:
            gaps.add(start)
    return Sentence(tokens=tokens, azp_gaps=sorted(gaps))


def insert_at_gap(sentence: Sentence, gap_index: int, span_tokens) -> Sentence:
    """Inverse of remove_subject: put tokens back at a recorded gap."""
    if gap_index not in sentence.azp_gaps:
        raise ValidationError(f"no gap recorded at {gap_index}")
    width = len(span_tokens)
    if width == 0:
        raise ValidationError("nothing to insert")
    tokens = []
    for tok in sentence.tokens[:gap_index]:
        tokens.append(tok)
    for offset, tok in enumerate(span_tokens):
        tokens.append(replace(tok, index=gap_index + offset))
    for tok in sentence.tokens[gap_index:]:
        tokens.append(replace(tok, index=tok.index + width))
    gaps = [g if g < gap_index else g + width for g in sentence.azp_gaps if g != gap_index]
    return Sentence(tokens=tokens, azp_gaps=sorted(gaps))


def locate_title_span(page: SummaryPage) -> Optional[tuple]:
    """Span of the title mention in the page's first sentence, or None.

    Both sides are normalized before an exact token-subsequence search; the
    longest match wins, leftmost on ties. If the full title is absent its
    head noun (approximated by the first title token) is tried instead.
    """
    title_tokens = [normalize_text(t) for t in page.title.split()]
    first = [normalize_text(tok.surface) for tok in page.sentences[0].tokens]
    if not title_tokens:
        return None

    def find(needle):
        width = len(needle)
        for start in range(len(first) - width + 1):
            if first[start:start + width] == needle:
                return (start, start + width)
        return None

    span = find(title_tokens)
    if span is None and len(title_tokens) > 1:
        span = find(title_tokens[:1])
    return span


def assemble_sample(
    page: SummaryPage,
    azp_sentence_index: int,
    gap_index: int,
    verb_index: int,
    method: str,
    lex: morph.MorphLexicon,
    azp_sentence: Sentence = None,
    corpus_id: str = "wiki",
) -> Optional[AzpSample]:
    """Join the page's first sentence with an AZP sentence into one sample.

    ``azp_sentence`` overrides ``page.sentences[azp_sentence_index]`` for
    methods that rewrote the sentence (subject removal). Returns None when
    the title cannot be located in the first sentence, dropping the page.
    """
    if azp_sentence_index < 1:
        raise ValidationError("the first sentence never hosts the AZP side of a sample")
    if not azp_sentence_index < len(page.sentences):
        raise ValidationError(f"sentence index {azp_sentence_index} out of range")
    span = locate_title_span(page)
    if span is None:
        return None
    if azp_sentence is None:
        azp_sentence = page.sentences[azp_sentence_index]
    if gap_index not in azp_sentence.azp_gaps:
        azp_sentence = Sentence(
            tokens=azp_sentence.tokens,
            azp_gaps=sorted(set(azp_sentence.azp_gaps) | {gap_index}),
        )
    antecedent = page.sentences[0]
    head = antecedent.tokens[morph.span_head_index(antecedent, *span)]
    return AzpSample(
        id=f"{method}-{page.title}-{azp_sentence_index}-{gap_index}-v{verb_index}",
        method=method,
        antecedent_sentence=antecedent,
        azp_sentence=azp_sentence,
        gap_index=gap_index,
        verb_index=verb_index,
        antecedent_span=span,
        features=morph.analyze(head, lex),
        source=(corpus_id, page.title, azp_sentence_index),
    )
