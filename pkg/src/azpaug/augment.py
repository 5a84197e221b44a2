"""The three generative methods, each mapping existing samples to new
candidate samples.

- masked replacement (mcm): the antecedent head is masked and replaced by
  each of a masked-LM's top-k single-token predictions;
- back-translation (bt): the AZP sentence is round-tripped through a pivot
  language; the governing verb is re-located by normalized surface, a
  re-introduced explicit subject is removed again, and the sample is
  dropped when the verb does not survive the round trip;
- agreement change (csa): verb and antecedent head are re-inflected
  together to a different grammatical number.

Outputs are candidates: they still go through the agreement filter
(morph.filter_samples) before being kept.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from . import morph, providers, subject
from .corpus import AzpSample, Sentence, Token, tokenize
from .errors import ValidationError
from .normalize import normalize_text


def _replace_token(sentence: Sentence, index: int, surface: str) -> Sentence:
    tokens = [tok.with_surface(surface) if tok.index == index else tok for tok in sentence.tokens]
    return Sentence(tokens=tokens, azp_gaps=list(sentence.azp_gaps))


def mcm_augment(sample: AzpSample, lm, top_k: int, lex: morph.MorphLexicon) -> list:
    """One new sample per predicted replacement of the antecedent head.

    Predictions identical to the original token are skipped, as are
    multi-word predictions (replacement is strictly single-token).
    """
    if top_k < 1:
        raise ValidationError(f"top_k must be >= 1, got {top_k}")
    ant = sample.antecedent_sentence
    head_index = morph.span_head_index(ant, *sample.antecedent_span)
    original = normalize_text(ant.tokens[head_index].surface)
    req = providers.MaskRequest(
        tokens=tuple(ant.surfaces()), mask_index=head_index, top_k=top_k
    )
    resp = providers.mask_topk(req, lm)

    out = []
    for cand in resp.candidates:
        token = cand.token.strip()
        if not token or " " in token or normalize_text(token) == original:
            continue
        new_ant = _replace_token(ant, head_index, token)
        new_head = new_ant.tokens[head_index]
        out.append(
            replace(
                sample,
                id=f"{sample.id}-mcm{len(out) + 1}",
                method="mcm",
                antecedent_sentence=new_ant,
                features=morph.analyze(new_head, lex),
            )
        )
    return out


def _project_tags(original: Sentence, surfaces) -> list:
    """Carry tags over from the source sentence by normalized surface."""
    known = {}
    for tok in original.tokens:
        known.setdefault(normalize_text(tok.surface), tok.pos)
    return [known.get(normalize_text(s), "NN") for s in surfaces]


def _relocate_verb(tokens, verb_surface: str, near: int) -> Optional[int]:
    target = normalize_text(verb_surface)
    hits = [i for i, tok in enumerate(tokens) if normalize_text(tok.surface) == target]
    if not hits:
        return None
    return min(hits, key=lambda i: (abs(i - near), i))


def bt_augment(
    sample: AzpSample,
    tr,
    lex: morph.MorphLexicon,
    tagger=None,
    pivot_lang: str = "en",
    source_lang: str = "ar",
) -> Optional[AzpSample]:
    """Round-trip the AZP sentence through ``pivot_lang``.

    Returns None when either translation comes back empty or the governing
    verb cannot be re-located in the result. Tags come from ``tagger`` when
    given, otherwise they are projected from the source sentence.
    """
    src_text = sample.azp_sentence.text()
    pivot = providers.translate(
        providers.TranslateRequest(text=src_text, source_lang=source_lang, target_lang=pivot_lang), tr
    ).text
    if not pivot.strip():
        return None
    back = providers.translate(
        providers.TranslateRequest(text=pivot, source_lang=pivot_lang, target_lang=source_lang), tr
    ).text
    surfaces = tokenize(back)
    if not surfaces:
        return None

    if tagger is not None:
        tags = list(providers.tag(providers.TagRequest(tokens=tuple(surfaces)), tagger).tags)
    else:
        tags = _project_tags(sample.azp_sentence, surfaces)

    orig_verb = sample.azp_sentence.tokens[sample.verb_index]
    verb_index = _relocate_verb(
        [Token(s, t, i) for i, (s, t) in enumerate(zip(surfaces, tags))],
        orig_verb.surface,
        near=sample.verb_index,
    )
    if verb_index is None:
        return None
    # We matched the verb by surface; keep its verb tag even if the tagger
    # read the new context differently.
    tags[verb_index] = orig_verb.pos

    sentence = Sentence(
        tokens=[Token(surface=s, pos=t, index=i) for i, (s, t) in enumerate(zip(surfaces, tags))]
    )
    span = subject.find_subject(sentence, verb_index, lex)
    if span is not None:
        sentence = subject.remove_subject(sentence, span)
        gap_index = span[0]
        if verb_index >= span[1]:
            verb_index -= span[1] - span[0]
    else:
        offset = sample.gap_index - sample.verb_index
        gap_index = min(max(verb_index + offset, 0), len(sentence.tokens))
        sentence = Sentence(tokens=sentence.tokens, azp_gaps=[gap_index])

    return replace(
        sample,
        id=f"{sample.id}-bt",
        method="bt",
        azp_sentence=sentence,
        gap_index=gap_index,
        verb_index=verb_index,
    )


def csa_augment(sample: AzpSample, target_number: str, lex: morph.MorphLexicon) -> Optional[AzpSample]:
    """Re-inflect the AZP verb and antecedent head to ``target_number``.

    Returns None when either inflection is unavailable (broken plurals
    without a lexicon table, proper nouns, unanalyzable forms).
    """
    if target_number == sample.features.number:
        raise ValidationError(f"target number {target_number!r} equals the sample's current number")
    verb = sample.azp_sentence.tokens[sample.verb_index]
    new_verb = morph.inflect_verb(verb, morph.analyze(verb, lex), target_number)
    if new_verb is None:
        return None
    ant = sample.antecedent_sentence
    head_index = morph.span_head_index(ant, *sample.antecedent_span)
    head = ant.tokens[head_index]
    new_head = morph.inflect_noun(head, morph.analyze(head, lex), target_number, lex=lex)
    if new_head is None:
        return None
    new_ant = _replace_token(ant, head_index, new_head.surface)
    new_azp = _replace_token(sample.azp_sentence, sample.verb_index, new_verb.surface)
    return replace(
        sample,
        id=f"{sample.id}-csa-{target_number}",
        method="csa",
        antecedent_sentence=new_ant,
        azp_sentence=new_azp,
        features=morph.analyze(new_ant.tokens[head_index], lex),
    )


def csa_augment_all(sample: AzpSample, lex: morph.MorphLexicon) -> list:
    """All admissible number variants of a sample (targets differing from
    its current number, where both inflections exist)."""
    out = []
    for target in morph.NUMBERS:
        if target == sample.features.number:
            continue
        variant = csa_augment(sample, target, lex)
        if variant is not None:
            out.append(variant)
    return out
