"""End-to-end pipeline: normalize, tag, mine, detect, generate, filter,
report.

Detection (pattern matching and subject removal) runs over summary pages,
always skipping each page's first sentence, which is reserved for the
antecedent. Generation (masked replacement, back-translation, agreement
change) runs over the detected samples. Everything then passes through the
agreement filter before being written.

With stub providers the whole pipeline is deterministic: outputs are
canonically ordered and the manifest carries a content hash of the inputs,
so identical runs produce identical bytes. Stage wall times are written to
a separate timings file for exactly that reason.
"""

from __future__ import annotations

import hashlib
import json
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import augment, corpus, morph, patterns, providers, scoring, subject
from .errors import AzpError, ProtocolError, ValidationError
from .normalize import normalize_text
from .tagset import DEFAULT_TAGSET, VERB_TAGS

DETECT_METHODS = ("onp", "rsm")
GENERATE_METHODS = ("mcm", "bt", "csa")
ALL_METHODS = DETECT_METHODS + GENERATE_METHODS

SAMPLES_FILENAME = "samples.azp"
STATS_FILENAME = "stats.txt"
MANIFEST_FILENAME = "manifest.json"
TIMINGS_FILENAME = "timings.json"


@dataclass
class PipelineConfig:
    gold: str
    pages: str
    out: str
    methods: tuple = ALL_METHODS
    lexicon: Optional[str] = None
    tagger: Optional[str] = None
    lm: Optional[str] = None
    translator: Optional[str] = None
    k: int = 5
    window: int = 2
    top_k: int = 5
    pivot_lang: str = "en"
    corpus_id: str = "wiki"
    lenient: bool = False


class StageError(AzpError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


def _file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _spec_digest(spec: Optional[str]) -> Optional[str]:
    if spec is None:
        return None
    if spec.startswith("stub:"):
        return "stub:" + _file_digest(spec[len("stub:"):])
    return spec


def config_hash(cfg: PipelineConfig) -> str:
    """Content hash of everything that can influence the outputs.

    Input files enter by digest, not by path, and the output location is
    excluded, so re-running the same inputs elsewhere hashes identically.
    """
    view = {
        "gold": _file_digest(cfg.gold),
        "pages": _file_digest(cfg.pages),
        "lexicon": _file_digest(cfg.lexicon) if cfg.lexicon else "builtin",
        "tagger": _spec_digest(cfg.tagger),
        "lm": _spec_digest(cfg.lm),
        "translator": _spec_digest(cfg.translator),
        "methods": list(cfg.methods),
        "k": cfg.k,
        "window": cfg.window,
        "top_k": cfg.top_k,
        "pivot_lang": cfg.pivot_lang,
        "corpus_id": cfg.corpus_id,
        "lenient": cfg.lenient,
    }
    blob = json.dumps(view, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def validate_config(cfg: PipelineConfig) -> None:
    for name in ("gold", "pages"):
        path = getattr(cfg, name)
        if not path or not Path(path).is_file():
            raise ValidationError(f"{name} file not found: {path!r}")
    if cfg.lexicon and not Path(cfg.lexicon).is_file():
        raise ValidationError(f"lexicon file not found: {cfg.lexicon!r}")
    if cfg.k < 1:
        raise ValidationError(f"k must be >= 1, got {cfg.k}")
    if cfg.window < 1:
        raise ValidationError(f"window must be >= 1, got {cfg.window}")
    if cfg.top_k < 1:
        raise ValidationError(f"top_k must be >= 1, got {cfg.top_k}")
    unknown = sorted(set(cfg.methods) - set(ALL_METHODS))
    if unknown or not cfg.methods:
        raise ValidationError(f"methods must be a non-empty subset of {ALL_METHODS}, got {cfg.methods}")
    if not cfg.tagger:
        raise ValidationError("a tagger endpoint is required to tag summary pages")
    if "mcm" in cfg.methods and not cfg.lm:
        raise ValidationError("method mcm requires a masked-LM endpoint (--lm)")
    if "bt" in cfg.methods and not cfg.translator:
        raise ValidationError("method bt requires a translation endpoint (--translator)")


def _open_providers(cfg: PipelineConfig) -> dict:
    opened = {}
    try:
        opened["tag"] = providers.open_tag_provider(cfg.tagger)
        if cfg.lm:
            opened["mask"] = providers.open_mask_provider(cfg.lm)
        if cfg.translator:
            opened["translate"] = providers.open_translate_provider(cfg.translator)
    except OSError as exc:
        raise ValidationError(f"cannot open provider: {exc}") from exc
    return opened


def build_pages(raw_pages, tag_provider, tagset=DEFAULT_TAGSET) -> list:
    """Normalize, segment, tokenize and tag raw (title, text) pages."""
    pages = []
    for title, text in raw_pages:
        sentences = []
        for raw_sentence in corpus.split_sentences(normalize_text(text)):
            surfaces = corpus.tokenize(raw_sentence)
            if not surfaces:
                continue
            resp = providers.tag(providers.TagRequest(tokens=tuple(surfaces)), tag_provider)
            for tag in resp.tags:
                if tag not in tagset:
                    raise ProtocolError(f"tagger produced unknown tag {tag!r}")
            sentences.append(corpus.make_sentence(zip(surfaces, resp.tags)))
        if sentences:
            pages.append(corpus.SummaryPage(title=normalize_text(title), sentences=sentences))
    return pages


def governing_verb(sentence: corpus.Sentence, gap: int) -> Optional[int]:
    """Nearest verb before the gap, else nearest after; None if no verb."""
    for i in range(min(gap, len(sentence.tokens)) - 1, -1, -1):
        if sentence.tokens[i].pos in VERB_TAGS:
            return i
    for i in range(gap, len(sentence.tokens)):
        if sentence.tokens[i].pos in VERB_TAGS:
            return i
    return None


def detect_samples(pages, mined_patterns, lex, methods=DETECT_METHODS, corpus_id="wiki") -> list:
    """Run pattern matching and/or subject removal over summary pages.

    The first sentence of each page never contributes an AZP sentence;
    pages whose title cannot be located in their first sentence are
    dropped wholesale.
    """
    samples = []
    for page in pages:
        for index in range(1, len(page.sentences)):
            sentence = page.sentences[index]
            if "onp" in methods and mined_patterns:
                for gap in patterns.match_patterns(mined_patterns, sentence):
                    verb = governing_verb(sentence, gap)
                    if verb is None:
                        continue
                    sample = subject.assemble_sample(
                        page, index, gap, verb, "onp", lex, corpus_id=corpus_id
                    )
                    if sample is not None:
                        samples.append(sample)
            if "rsm" in methods:
                for verb in range(len(sentence.tokens)):
                    if sentence.tokens[verb].pos not in VERB_TAGS:
                        continue
                    span = subject.find_subject(sentence, verb, lex)
                    if span is None:
                        continue
                    removed = subject.remove_subject(sentence, span)
                    sample = subject.assemble_sample(
                        page, index, span[0], verb, "rsm", lex,
                        azp_sentence=removed, corpus_id=corpus_id,
                    )
                    if sample is not None:
                        samples.append(sample)
    return samples


def generate_samples(detected, cfg: PipelineConfig, opened: dict, lex, counts: dict) -> list:
    generated = []
    if "mcm" in cfg.methods:
        for sample in detected:
            generated.extend(augment.mcm_augment(sample, opened["mask"], cfg.top_k, lex))
        counts["mcm"] = len(generated)
    if "bt" in cfg.methods:
        before = len(generated)
        dropped = 0
        for sample in detected:
            variant = augment.bt_augment(
                sample, opened["translate"], lex,
                tagger=opened.get("tag"), pivot_lang=cfg.pivot_lang,
            )
            if variant is None:
                dropped += 1
            else:
                generated.append(variant)
        counts["bt"] = len(generated) - before
        counts["bt_dropped"] = dropped
    if "csa" in cfg.methods:
        before = len(generated)
        for sample in detected:
            generated.extend(augment.csa_augment_all(sample, lex))
        counts["csa"] = len(generated) - before
    return generated


_METHOD_ORDER = {method: i for i, method in enumerate(corpus.METHODS)}


def canonical_order(samples) -> list:
    return sorted(samples, key=lambda s: (_METHOD_ORDER[s.method], s.source, s.gap_index, s.id))


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute all stages and write samples, stats, manifest and timings
    into ``cfg.out``. Returns the manifest.

    A stage failure still writes the partial manifest (with the failing
    stage recorded) before the error propagates.
    """
    validate_config(cfg)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    opened = _open_providers(cfg)
    lex = morph.load_lexicon(cfg.lexicon) if cfg.lexicon else morph.default_lexicon()

    manifest = {
        "config_hash": config_hash(cfg),
        "methods": list(cfg.methods),
        "stages": {},
        "provider_calls": {},
        "rejections": {},
        "outputs": {},
    }
    timings = {}
    state: dict = {}

    def stage(name, fn):
        started = time.perf_counter()
        try:
            fn()
        except Exception as exc:
            manifest["aborted_stage"] = name
            _write_manifest(out_dir, manifest, timings, opened)
            raise StageError(name, exc) from exc
        timings[name] = round(time.perf_counter() - started, 6)

    def do_normalize():
        raw = corpus.read_pages(cfg.pages)
        state["raw_pages"] = [(title, normalize_text(text)) for title, text in raw]
        manifest["stages"]["normalize"] = {"pages": len(raw)}

    def do_tag():
        state["pages"] = build_pages(state["raw_pages"], opened["tag"])
        manifest["stages"]["tag"] = {
            "pages": len(state["pages"]),
            "sentences": sum(len(p.sentences) for p in state["pages"]),
        }

    def do_mine():
        docs = corpus.parse_tagged(Path(cfg.gold).read_text(encoding="utf-8"))
        sentences = [s for _, doc in docs for s in doc]
        windows = patterns.extract_windows(sentences, window=cfg.window)
        stats = patterns.score_patterns(windows, patterns.unigram_counts(sentences))
        state["patterns"] = patterns.select_top(stats, k=cfg.k)
        patterns.write_patterns(
            [st for st in stats if st.pattern in set(state["patterns"])],
            out_dir / "patterns.tsv",
        )
        manifest["stages"]["mine"] = {
            "windows": sum(windows.values()),
            "distinct": len(windows),
            "selected": len(state["patterns"]),
        }
        manifest["outputs"]["patterns"] = "patterns.tsv"

    def do_detect():
        enabled = tuple(m for m in DETECT_METHODS if m in cfg.methods)
        mined = state["patterns"] if "onp" in enabled else []
        state["detected"] = detect_samples(
            state["pages"], mined, lex, methods=enabled, corpus_id=cfg.corpus_id
        )
        by_method = Counter(s.method for s in state["detected"])
        manifest["stages"]["detect"] = {m: by_method.get(m, 0) for m in DETECT_METHODS}

    def do_generate():
        counts = {m: 0 for m in GENERATE_METHODS}
        state["generated"] = generate_samples(state["detected"], cfg, opened, lex, counts)
        manifest["stages"]["generate"] = counts

    def do_filter():
        candidates = state["detected"] + state["generated"]
        kept, rejected = morph.filter_samples(candidates, lex, strict=not cfg.lenient)
        state["kept"] = kept
        manifest["stages"]["filter"] = {"kept": len(kept), "rejected": len(rejected)}
        manifest["rejections"] = dict(sorted(Counter(r for _, r in rejected).items()))

    def do_write():
        ordered = canonical_order(state["kept"])
        corpus.write_samples(ordered, out_dir / SAMPLES_FILENAME)
        report = scoring.stats_report(ordered)
        (out_dir / STATS_FILENAME).write_text(report.render() + "\n", encoding="utf-8")
        manifest["outputs"]["samples"] = SAMPLES_FILENAME
        manifest["outputs"]["stats"] = STATS_FILENAME

    stage("normalize", do_normalize)
    stage("tag", do_tag)
    if "onp" in cfg.methods:
        stage("mine", do_mine)
    else:
        state["patterns"] = []
    stage("detect", do_detect)
    stage("generate", do_generate)
    stage("filter", do_filter)
    stage("write", do_write)

    _write_manifest(out_dir, manifest, timings, opened)
    return manifest


def _write_manifest(out_dir: Path, manifest: dict, timings: dict, opened: dict) -> None:
    manifest["provider_calls"] = {name: provider.calls for name, provider in sorted(opened.items())}
    (out_dir / MANIFEST_FILENAME).write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    # Wall times vary run to run; they live outside the manifest so that
    # identical runs stay byte-identical.
    (out_dir / TIMINGS_FILENAME).write_text(
        json.dumps(timings, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
