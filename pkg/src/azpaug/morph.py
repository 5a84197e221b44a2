"""Rule-based Arabic morphology: feature analysis, number inflection,
agreement checking, and the agreement filter for candidate samples.

Coverage model:

- verbs are analyzed purely from their affix shape (third-person imperfect
  and perfect paradigms);
- nominals use affix rules for the marked sound forms (ـة / ـان / ـون /
  ـتان / ـات) plus a lexicon of bare singulars, broken plurals, pronouns
  and proper nouns. The shipped seed lexicon is nominal-only.

A leading definite article (ال) is transparently stripped for both lookup
and inflection, and re-attached to inflected forms.

Anything outside rules and lexicon analyzes to all-unknown; in strict mode
unknown features fail agreement, which is exactly what the sample filter
wants (noisy generated samples get removed rather than guessed at).
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Optional

from .errors import ValidationError
from .normalize import normalize_text
from .tagset import NOMINAL_TAGS, NOUN_TAGS, PROPER_TAGS, VERB_TAGS

if TYPE_CHECKING:  # pragma: no cover
    from .corpus import AzpSample, Sentence, Token

SINGULAR = "singular"
DUAL = "dual"
PLURAL = "plural"
MASCULINE = "masculine"
FEMININE = "feminine"
UNKNOWN = "unknown"

NUMBERS = (SINGULAR, DUAL, PLURAL)
GENDERS = (MASCULINE, FEMININE)

REJECT_NUMBER = "number_mismatch"
REJECT_GENDER = "gender_mismatch"
REJECT_UNANALYZABLE = "unanalyzable"

DEFINITE_ARTICLE = "ال"


@dataclass(frozen=True)
class MorphFeatures:
    """Number/gender/person bundle; unknown fields mean inconclusive analysis."""

    number: str = UNKNOWN
    gender: str = UNKNOWN
    person: Optional[int] = None


@dataclass(frozen=True)
class AffixRule:
    prefix: str
    suffix: str
    features: MorphFeatures
    min_stem: int = 1


def _f(number: str, gender: str, person: int = 3) -> MorphFeatures:
    return MorphFeatures(number=number, gender=gender, person=person)


# Ordered most-specific-first; the first matching rule wins. The dual and
# plural suffixes collide with root-final letters of short stems (يسكن is
# singular, not يسكـ+ن plural; يكون singular, not يكـ+ون), so those rules
# require at least three stem letters.
VERB_RULES = (
    AffixRule("ي", "ون", _f(PLURAL, MASCULINE), min_stem=3),   # يكتبون
    AffixRule("ي", "ان", _f(DUAL, MASCULINE), min_stem=3),     # يكتبان
    AffixRule("ت", "ان", _f(DUAL, FEMININE), min_stem=3),      # تكتبان
    AffixRule("ي", "ن", _f(PLURAL, FEMININE), min_stem=3),     # يكتبن
    AffixRule("", "وا", _f(PLURAL, MASCULINE), min_stem=2),    # كتبوا
    AffixRule("", "تا", _f(DUAL, FEMININE), min_stem=3),       # كتبتا
    AffixRule("", "ت", _f(SINGULAR, FEMININE), min_stem=3),    # كتبت
    AffixRule("ي", "", _f(SINGULAR, MASCULINE), min_stem=2),   # يكتب
    AffixRule("ت", "", _f(SINGULAR, FEMININE), min_stem=2),    # تكتب
    AffixRule("", "ا", _f(DUAL, MASCULINE), min_stem=3),       # كتبا
    AffixRule("", "ن", _f(PLURAL, FEMININE), min_stem=3),      # كتبن
)

NOUN_RULES = (
    AffixRule("", "تان", _f(DUAL, FEMININE), min_stem=2),      # معلمتان
    AffixRule("", "ات", _f(PLURAL, FEMININE), min_stem=2),     # معلمات
    AffixRule("", "ون", _f(PLURAL, MASCULINE), min_stem=2),    # مهندسون
    AffixRule("", "ان", _f(DUAL, MASCULINE), min_stem=2),      # مهندسان
    AffixRule("", "ة", _f(SINGULAR, FEMININE), min_stem=2),    # مهندسة
)


@dataclass(frozen=True)
class LexEntry:
    features: MorphFeatures
    # number -> surface form; a missing or None target means "no such form";
    # a present table is authoritative (sound rules are not consulted).
    table: Optional[dict] = None


@dataclass
class MorphLexicon:
    """Surface-form overrides plus the affix rule lists."""

    overrides: dict = field(default_factory=dict)
    verb_rules: tuple = VERB_RULES
    noun_rules: tuple = NOUN_RULES

    def lookup(self, surface: str) -> Optional[LexEntry]:
        entry = self.overrides.get(surface)
        if entry is None:
            bare = strip_article(surface)
            if bare is not None:
                entry = self.overrides.get(bare)
        return entry


def strip_article(surface: str) -> Optional[str]:
    """Return the surface without a leading ال, or None if there is none."""
    if surface.startswith(DEFINITE_ARTICLE) and len(surface) > 3:
        return surface[2:]
    return None


_NUMBER_VALUES = frozenset(NUMBERS) | {UNKNOWN}
_GENDER_VALUES = frozenset(GENDERS) | {UNKNOWN}


def _parse_person(text: str) -> Optional[int]:
    if text == UNKNOWN:
        return None
    if text in {"1", "2", "3"}:
        return int(text)
    raise ValidationError(f"bad person value {text!r}")


def load_lexicon(path) -> MorphLexicon:
    """Load a TSV lexicon: SURFACE, NUMBER, GENDER, PERSON[, TABLE].

    TABLE is ;-separated number=form pairs; a form of '-' marks the slot
    explicitly unavailable. At most one entry per surface.
    """
    overrides: dict = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (4, 5):
                raise ValidationError(f"lexicon line {lineno}: expected 4 or 5 columns, got {len(cols)}")
            surface, number, gender, person = cols[:4]
            if number not in _NUMBER_VALUES:
                raise ValidationError(f"lexicon line {lineno}: bad number {number!r}")
            if gender not in _GENDER_VALUES:
                raise ValidationError(f"lexicon line {lineno}: bad gender {gender!r}")
            feats = MorphFeatures(number=number, gender=gender, person=_parse_person(person))
            table = None
            if len(cols) == 5 and cols[4]:
                table = {}
                for pair in cols[4].split(";"):
                    key, _, form = pair.partition("=")
                    if key not in NUMBERS or not form:
                        raise ValidationError(f"lexicon line {lineno}: bad table entry {pair!r}")
                    table[key] = None if form == "-" else form
            if surface in overrides:
                raise ValidationError(f"lexicon line {lineno}: duplicate surface {surface!r}")
            overrides[surface] = LexEntry(features=feats, table=table)
    return MorphLexicon(overrides=overrides)


def default_lexicon() -> MorphLexicon:
    """The seed lexicon shipped with the package."""
    path = importlib.resources.files("azpaug.data").joinpath("lexicon.tsv")
    with importlib.resources.as_file(path) as fspath:
        return load_lexicon(fspath)


def _rule_match(surface: str, rules: Iterable[AffixRule]) -> Optional[MorphFeatures]:
    for rule in rules:
        affix_len = len(rule.prefix) + len(rule.suffix)
        if len(surface) - affix_len < rule.min_stem:
            continue
        if surface.startswith(rule.prefix) and surface.endswith(rule.suffix):
            return rule.features
    return None


def analyze(token: "Token", lex: MorphLexicon) -> MorphFeatures:
    """Analyze a token: lexicon override first, then affix rules, else unknown."""
    surface = normalize_text(token.surface)
    entry = lex.lookup(surface)
    if entry is not None:
        return entry.features
    if token.pos in VERB_TAGS:
        rules = lex.verb_rules
    elif token.pos in NOMINAL_TAGS:
        rules = lex.noun_rules
    else:
        return MorphFeatures()
    for candidate in (surface, strip_article(surface)):
        if candidate is None:
            continue
        feats = _rule_match(candidate, rules)
        if feats is not None:
            return feats
    return MorphFeatures()


# (prefix, suffix) per (gender, number) for third-person verb paradigms.
_IMPERFECT = {
    MASCULINE: {SINGULAR: ("ي", ""), DUAL: ("ي", "ان"), PLURAL: ("ي", "ون")},
    FEMININE: {SINGULAR: ("ت", ""), DUAL: ("ت", "ان"), PLURAL: ("ي", "ن")},
}
_PERFECT = {
    MASCULINE: {SINGULAR: ("", ""), DUAL: ("", "ا"), PLURAL: ("", "وا")},
    FEMININE: {SINGULAR: ("", "ت"), DUAL: ("", "تا"), PLURAL: ("", "ن")},
}

# Sound nominal suffixes per gender; feminine singulars must end in ة.
_SOUND_NOUN = {
    MASCULINE: {SINGULAR: "", DUAL: "ان", PLURAL: "ون"},
    FEMININE: {SINGULAR: "ة", DUAL: "تان", PLURAL: "ات"},
}


def _check_target(target_number: str) -> None:
    if target_number not in NUMBERS:
        raise ValidationError(f"bad target number {target_number!r}")


def _strip_affixes(surface: str, prefix: str, suffix: str) -> Optional[str]:
    if len(surface) <= len(prefix) + len(suffix):
        return None
    if not surface.startswith(prefix) or not surface.endswith(suffix):
        return None
    return surface[len(prefix):len(surface) - len(suffix)]


def inflect_verb(verb: "Token", current: MorphFeatures, target_number: str) -> Optional["Token"]:
    """Re-inflect a third-person verb to ``target_number`` (sound paradigms only)."""
    _check_target(target_number)
    if verb.pos not in VERB_TAGS:
        raise ValidationError(f"inflect_verb needs a verb tag, got {verb.pos!r}")
    if target_number == current.number:
        return verb
    if current.person != 3 or current.gender not in GENDERS or current.number not in NUMBERS:
        return None
    surface = normalize_text(verb.surface)
    for paradigm in (_IMPERFECT, _PERFECT):
        cur_prefix, cur_suffix = paradigm[current.gender][current.number]
        stem = _strip_affixes(surface, cur_prefix, cur_suffix)
        if stem is None:
            continue
        new_prefix, new_suffix = paradigm[current.gender][target_number]
        new_surface = new_prefix + stem + new_suffix
        # Emit only forms that analyze back to the target number: stems too
        # short for the suffix rules would produce ambiguous surfaces.
        produced = _rule_match(new_surface, VERB_RULES)
        if produced is None or produced.number != target_number:
            return None
        return verb.with_surface(new_surface)
    return None


def inflect_noun(
    noun: "Token",
    current: MorphFeatures,
    target_number: str,
    lex: Optional[MorphLexicon] = None,
) -> Optional["Token"]:
    """Re-inflect a nominal to ``target_number``.

    A lexicon inflection table wins when present (and is authoritative:
    missing targets mean no form). Without a table, proper nouns are never
    inflected and everything else goes through the sound nominative
    paradigms.
    """
    _check_target(target_number)
    if noun.pos not in NOUN_TAGS:
        raise ValidationError(f"inflect_noun needs a noun tag, got {noun.pos!r}")
    if target_number == current.number:
        return noun
    surface = normalize_text(noun.surface)
    bare = strip_article(surface)
    article = DEFINITE_ARTICLE if bare is not None else ""
    core = bare if bare is not None else surface

    entry = None
    form_article = ""
    if lex is not None:
        entry = lex.overrides.get(surface)
        if entry is None and bare is not None:
            entry = lex.overrides.get(bare)
            form_article = article  # table forms are bare; restore what we stripped
    if entry is not None and entry.table is not None:
        form = entry.table.get(target_number)
        return noun.with_surface(form_article + form) if form else None
    if noun.pos in PROPER_TAGS:
        return None
    if current.gender not in GENDERS or current.number not in NUMBERS:
        return None
    cur_suffix = _SOUND_NOUN[current.gender][current.number]
    stem = _strip_affixes(core, "", cur_suffix)
    if stem is None:
        return None
    form = article + stem + _SOUND_NOUN[current.gender][target_number]
    # Emit only forms that analyze back to the same bundle; stems ending in
    # letters that mimic another paradigm's suffix (a ت before ـان reads as
    # the feminine dual) would otherwise round-trip wrongly.
    produced = analyze(noun.with_surface(form), lex or MorphLexicon())
    if produced.number != target_number or produced.gender != current.gender:
        return None
    return noun.with_surface(form)


def agrees(verb_feats: MorphFeatures, ant_feats: MorphFeatures, strict: bool = True) -> bool:
    """True iff number and gender both match.

    Strict mode (the default) fails any comparison involving an unknown
    field; lenient mode treats unknown as a wildcard.
    """
    pairs = (
        (verb_feats.number, ant_feats.number),
        (verb_feats.gender, ant_feats.gender),
    )
    for left, right in pairs:
        if left == UNKNOWN or right == UNKNOWN:
            if strict:
                return False
            continue
        if left != right:
            return False
    return True


def span_head_index(sentence: "Sentence", start: int, end: int) -> int:
    """Head token of a span: the rightmost noun, else the last token."""
    if not (0 <= start < end <= len(sentence.tokens)):
        raise ValidationError(f"span ({start}, {end}) out of bounds")
    for i in range(end - 1, start - 1, -1):
        if sentence.tokens[i].pos in NOUN_TAGS:
            return i
    return end - 1


def antecedent_head(sample: "AzpSample") -> "Token":
    start, end = sample.antecedent_span
    return sample.antecedent_sentence.tokens[span_head_index(sample.antecedent_sentence, start, end)]


def rejection_reason(sample: "AzpSample", lex: MorphLexicon, strict: bool = True) -> Optional[str]:
    """None if the sample's verb and antecedent head agree, else the reason."""
    verb = sample.azp_sentence.tokens[sample.verb_index]
    vf = analyze(verb, lex)
    af = analyze(antecedent_head(sample), lex)
    unknowns = UNKNOWN in (vf.number, af.number, vf.gender, af.gender)
    if strict and unknowns:
        return REJECT_UNANALYZABLE
    if vf.number != af.number and UNKNOWN not in (vf.number, af.number):
        return REJECT_NUMBER
    if vf.gender != af.gender and UNKNOWN not in (vf.gender, af.gender):
        return REJECT_GENDER
    return None


def filter_samples(samples, lex: MorphLexicon, strict: bool = True):
    """Partition samples into (kept, rejected) by verb/antecedent agreement.

    ``rejected`` holds (sample, reason) pairs with reason one of
    number_mismatch, gender_mismatch, unanalyzable.
    """
    kept = []
    rejected = []
    for sample in samples:
        reason = rejection_reason(sample, lex, strict=strict)
        if reason is None:
            kept.append(sample)
        else:
            rejected.append((sample, reason))
    return kept, rejected
