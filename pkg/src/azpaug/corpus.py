"""Data model and I/O: tagged corpora, summary pages, and sample records.

Three file formats live here:

- tagged corpus: one ``SURFACE<TAB>POS`` token per line (optionally
  ``SURFACE<TAB>POS<TAB>HEAD<TAB>DEPREL``), blank line between sentences,
  ``# doc=<id>`` document headers, and ``*`` in the surface column marking
  a zero-pronoun gap at that position;
- sample files: one JSON object per line with the fixed field set below;
- summary pages: one JSON object per line with ``title`` and ``text``.

Gaps are between-token positions: a gap at index ``i`` sits before token
``i``, with ``i == len(tokens)`` meaning sentence-final.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from . import morph
from .errors import ParseError, SchemaError, ValidationError
from .tagset import DEFAULT_TAGSET, VERB_TAGS

METHODS = ("gold", "onp", "rsm", "mcm", "bt", "csa")

SAMPLE_FIELDS = (
    "id", "method", "ant_tokens", "ant_pos", "azp_tokens", "azp_pos",
    "gap_index", "verb_index", "ant_start", "ant_end", "number", "gender",
    "source",
)

GAP_MARK = "*"

# Arabic full stop is the Latin one; the rest are Arabic-specific.
SENTENCE_TERMINATORS = frozenset({".", "؟", "!", "؛"})
_PUNCT_CHARS = SENTENCE_TERMINATORS | frozenset({"،", ",", ":", "(", ")", "«", "»", '"'})


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    index: int
    head: Optional[int] = None
    deprel: Optional[str] = None

    def with_surface(self, surface: str) -> "Token":
        return replace(self, surface=surface)


@dataclass
class Sentence:
    tokens: list
    azp_gaps: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def surfaces(self) -> list:
        return [t.surface for t in self.tokens]

    def pos_tags(self) -> list:
        return [t.pos for t in self.tokens]

    def text(self) -> str:
        return " ".join(self.surfaces())


def make_sentence(pairs: Iterable[tuple], gaps: Iterable[int] = ()) -> Sentence:
    """Build a Sentence from (surface, pos) pairs; convenience for callers/tests."""
    tokens = [Token(surface=s, pos=p, index=i) for i, (s, p) in enumerate(pairs)]
    sentence = Sentence(tokens=tokens, azp_gaps=sorted(set(gaps)))
    for gap in sentence.azp_gaps:
        if not 0 <= gap <= len(tokens):
            raise ValidationError(f"gap {gap} out of range for {len(tokens)} tokens")
    return sentence


@dataclass
class SummaryPage:
    """A page title plus its tagged summary-section sentences."""

    title: str
    sentences: list

    def __post_init__(self):
        if not self.title:
            raise ValidationError("page title must be non-empty")
        if not self.sentences:
            raise ValidationError(f"page {self.title!r} has no sentences")


@dataclass
class AzpSample:
    """A two-sentence training record: antecedent sentence + AZP sentence."""

    id: str
    method: str
    antecedent_sentence: Sentence
    azp_sentence: Sentence
    gap_index: int
    verb_index: int
    antecedent_span: tuple  # half-open (start, end) token range
    features: morph.MorphFeatures
    source: tuple  # (corpus id, document id, sentence index)


def validate_sample(sample: AzpSample, tagset: frozenset = DEFAULT_TAGSET) -> None:
    if not sample.id:
        raise ValidationError("sample id must be non-empty")
    if sample.method not in METHODS:
        raise ValidationError(f"unknown method {sample.method!r}")
    azp = sample.azp_sentence
    ant = sample.antecedent_sentence
    if not 0 <= sample.verb_index < len(azp.tokens):
        raise ValidationError(f"verb_index {sample.verb_index} out of range")
    if azp.tokens[sample.verb_index].pos not in VERB_TAGS:
        raise ValidationError(
            f"token at verb_index has tag {azp.tokens[sample.verb_index].pos!r}, not a verb tag"
        )
    if sample.gap_index not in azp.azp_gaps:
        raise ValidationError(f"gap_index {sample.gap_index} not among sentence gaps {azp.azp_gaps}")
    start, end = sample.antecedent_span
    if not 0 <= start < end <= len(ant.tokens):
        raise ValidationError(f"antecedent span ({start}, {end}) empty or out of bounds")
    for sentence, name in ((ant, "antecedent"), (azp, "azp")):
        for tok in sentence.tokens:
            if not tok.surface or re.search(r"\s", tok.surface):
                raise ValidationError(f"{name} token {tok.index} has empty/whitespace surface")
            if tok.pos not in tagset:
                raise ValidationError(f"{name} token {tok.index} has unknown tag {tok.pos!r}")


# ---------------------------------------------------------------------------
# Tagged-corpus parsing and serialization


def parse_tagged(text, tagset: frozenset = DEFAULT_TAGSET):
    """Parse a tagged corpus into ``[(doc_id, [Sentence, ...]), ...]``.

    ``text`` is a string or an iterable of lines. Rejects wrong column
    counts and unknown POS tags with the offending line number.
    """
    lines = text.splitlines() if isinstance(text, str) else [l.rstrip("\n") for l in text]
    docs: list = []
    doc_id: Optional[str] = None
    doc_sentences: list = []
    tokens: list = []
    gaps: list = []

    def close_sentence():
        nonlocal tokens, gaps
        if tokens or gaps:
            doc_sentences.append(Sentence(tokens=tokens, azp_gaps=sorted(set(gaps))))
            tokens, gaps = [], []

    def close_doc():
        nonlocal doc_sentences
        close_sentence()
        if doc_id is not None or doc_sentences:
            docs.append((doc_id if doc_id is not None else "doc", doc_sentences))
            doc_sentences = []

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip()
        if not line:
            close_sentence()
            continue
        if line.startswith("#"):
            match = re.match(r"#\s*doc\s*=\s*(\S+)\s*$", line)
            if match:
                close_doc()
                doc_id = match.group(1)
            continue
        cols = line.split("\t")
        if len(cols) not in (2, 4):
            raise ParseError(f"expected 2 or 4 tab-separated columns, got {len(cols)}", line=lineno)
        surface, pos = cols[0], cols[1]
        if surface == GAP_MARK:
            gaps.append(len(tokens))
            continue
        if not surface or re.search(r"\s", surface):
            raise ParseError(f"bad surface column {surface!r}", line=lineno)
        if pos not in tagset:
            raise ParseError(f"unknown POS tag {pos!r}", line=lineno)
        head = deprel = None
        if len(cols) == 4:
            if cols[2] != "-":
                try:
                    head = int(cols[2])
                except ValueError:
                    raise ParseError(f"bad head column {cols[2]!r}", line=lineno) from None
            if cols[3] != "-":
                deprel = cols[3]
        tokens.append(Token(surface=surface, pos=pos, index=len(tokens), head=head, deprel=deprel))

    close_doc()
    return docs


def serialize_tagged(docs) -> str:
    """Inverse of parse_tagged; emits the canonical column format."""
    out = []
    for doc_id, sentences in docs:
        out.append(f"# doc={doc_id}")
        for sentence in sentences:
            gaps = set(sentence.azp_gaps)
            for tok in sentence.tokens:
                if tok.index in gaps:
                    out.append(f"{GAP_MARK}\t{GAP_MARK}")
                if tok.head is not None or tok.deprel is not None:
                    head = "-" if tok.head is None else str(tok.head)
                    deprel = tok.deprel if tok.deprel is not None else "-"
                    out.append(f"{tok.surface}\t{tok.pos}\t{head}\t{deprel}")
                else:
                    out.append(f"{tok.surface}\t{tok.pos}")
            if len(sentence.tokens) in gaps:
                out.append(f"{GAP_MARK}\t{GAP_MARK}")
            out.append("")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# Raw-text segmentation


def split_sentences(text: str) -> list:
    """Split raw text at the Arabic sentence terminators.

    Each returned sentence keeps its terminator run; only the whitespace
    between sentences is dropped. A trailing terminator-less segment is
    returned as-is.
    """
    sentences = []
    i, n = 0, len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        start = i
        while i < n and text[i] not in SENTENCE_TERMINATORS:
            i += 1
        while i < n and text[i] in SENTENCE_TERMINATORS:
            i += 1
        sentences.append(text[start:i].rstrip())
    return sentences


def tokenize(text: str) -> list:
    """Whitespace tokenization with punctuation split off as its own tokens."""
    tokens = []
    for chunk in text.split():
        lead = []
        while chunk and chunk[0] in _PUNCT_CHARS:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail = []
        while chunk and chunk[-1] in _PUNCT_CHARS:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


# ---------------------------------------------------------------------------
# Sample-file records


def _sample_to_record(sample: AzpSample) -> dict:
    return {
        "id": sample.id,
        "method": sample.method,
        "ant_tokens": sample.antecedent_sentence.surfaces(),
        "ant_pos": sample.antecedent_sentence.pos_tags(),
        "azp_tokens": sample.azp_sentence.surfaces(),
        "azp_pos": sample.azp_sentence.pos_tags(),
        "gap_index": sample.gap_index,
        "verb_index": sample.verb_index,
        "ant_start": sample.antecedent_span[0],
        "ant_end": sample.antecedent_span[1],
        "number": sample.features.number,
        "gender": sample.features.gender,
        "source": list(sample.source),
    }


def write_samples(samples: Iterable[AzpSample], path) -> int:
    """Write samples as JSON lines; returns the number written.

    The record schema carries exactly one gap (the sample's own), so the
    AZP sentence must hold just that gap and the antecedent sentence none.
    """
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for sample in samples:
            validate_sample(sample)
            if sample.azp_sentence.azp_gaps != [sample.gap_index]:
                raise ValidationError(
                    f"sample {sample.id}: record schema holds a single gap, "
                    f"sentence has {sample.azp_sentence.azp_gaps}"
                )
            if sample.antecedent_sentence.azp_gaps:
                raise ValidationError(f"sample {sample.id}: antecedent sentence must be gap-free")
            record = _sample_to_record(sample)
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":")))
            handle.write("\n")
            count += 1
    return count


def _require(record: dict, key: str, types, recno: int):
    value = record[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaError(f"expected {types}, got {type(value).__name__}", record=recno, field=key)
    return value


def _record_to_sample(record: dict, recno: int, tagset: frozenset) -> AzpSample:
    keys = set(record)
    expected = set(SAMPLE_FIELDS)
    for missing in sorted(expected - keys):
        raise SchemaError("missing field", record=recno, field=missing)
    for extra in sorted(keys - expected):
        raise SchemaError("unexpected field", record=recno, field=extra)

    sid = _require(record, "id", str, recno)
    method = _require(record, "method", str, recno)
    str_lists = {}
    for key in ("ant_tokens", "ant_pos", "azp_tokens", "azp_pos"):
        value = _require(record, key, list, recno)
        if not all(isinstance(x, str) for x in value):
            raise SchemaError("expected a list of strings", record=recno, field=key)
        str_lists[key] = value
    for a, b in (("ant_tokens", "ant_pos"), ("azp_tokens", "azp_pos")):
        if len(str_lists[a]) != len(str_lists[b]):
            raise SchemaError(f"length differs from {a}", record=recno, field=b)
    gap_index = _require(record, "gap_index", int, recno)
    verb_index = _require(record, "verb_index", int, recno)
    ant_start = _require(record, "ant_start", int, recno)
    ant_end = _require(record, "ant_end", int, recno)
    number = _require(record, "number", str, recno)
    gender = _require(record, "gender", str, recno)
    source = _require(record, "source", list, recno)
    if len(source) != 3 or not all(isinstance(source[i], t) for i, t in enumerate((str, str, int))):
        raise SchemaError("expected [corpus, document, sentence_index]", record=recno, field="source")
    if number not in set(morph.NUMBERS) | {morph.UNKNOWN}:
        raise SchemaError(f"bad number value {number!r}", record=recno, field="number")
    if gender not in set(morph.GENDERS) | {morph.UNKNOWN}:
        raise SchemaError(f"bad gender value {gender!r}", record=recno, field="gender")

    ant = make_sentence(zip(str_lists["ant_tokens"], str_lists["ant_pos"]))
    azp = make_sentence(zip(str_lists["azp_tokens"], str_lists["azp_pos"]), gaps=[gap_index])
    # The record schema does not carry person; antecedent mentions are
    # nominal, hence third person.
    sample = AzpSample(
        id=sid,
        method=method,
        antecedent_sentence=ant,
        azp_sentence=azp,
        gap_index=gap_index,
        verb_index=verb_index,
        antecedent_span=(ant_start, ant_end),
        features=morph.MorphFeatures(number=number, gender=gender, person=3),
        source=(source[0], source[1], source[2]),
    )
    try:
        validate_sample(sample, tagset=tagset)
    except ValidationError as exc:
        raise SchemaError(str(exc), record=recno) from exc
    return sample


def read_samples(path, tagset: frozenset = DEFAULT_TAGSET) -> list:
    """Read a sample file, validating every record against the schema."""
    samples = []
    with open(path, encoding="utf-8") as handle:
        for recno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", record=recno) from exc
            if not isinstance(record, dict):
                raise SchemaError("record is not an object", record=recno)
            samples.append(_record_to_sample(record, recno, tagset))
    return samples


def read_pages(path) -> list:
    """Read raw summary pages: JSON lines with ``title`` and ``text``."""
    pages = []
    with open(path, encoding="utf-8") as handle:
        for recno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", record=recno) from exc
            for key in ("title", "text"):
                if key not in record or not isinstance(record.get(key), str):
                    raise SchemaError("missing or non-string field", record=recno, field=key)
            pages.append((record["title"], record["text"]))
    return pages
