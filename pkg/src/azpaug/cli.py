"""Command-line entry points.

Subcommands mirror the pipeline stages (preprocess, mine-patterns, detect,
augment, filter, stats, score) plus ``run`` for the whole thing. Exit
codes: 0 success, 1 validation problem, 2 runtime failure.

Provider endpoints are ``http(s)://HOST`` URLs or ``stub:PATH`` fixture
files, settable per subcommand flag, via a JSON config file (``run
--config``), or through the AZP_LM_URL / AZP_MT_URL / AZP_TAG_URL
environment variables. Explicit flags win over environment over config.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import augment as augment_mod
from . import corpus, morph, patterns, pipeline, providers, scoring
from .errors import AzpError, ValidationError
from .normalize import normalize_text


def _load_lexicon(path):
    return morph.load_lexicon(path) if path else morph.default_lexicon()


def _parse_methods(value: str, allowed) -> tuple:
    methods = tuple(m.strip() for m in value.split(",") if m.strip())
    unknown = sorted(set(methods) - set(allowed))
    if unknown or not methods:
        raise ValidationError(f"methods must be a non-empty subset of {allowed}, got {value!r}")
    return methods


@click.group()
def cli():
    """Build and score Arabic zero-pronoun training samples."""


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def preprocess(in_path, out_path):
    """Normalize a text file (alif folding, diacritic removal)."""
    text = Path(in_path).read_text(encoding="utf-8")
    Path(out_path).write_text(normalize_text(text), encoding="utf-8")


@cli.command("mine-patterns")
@click.option("--gold", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=5, show_default=True)
@click.option("--window", default=2, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def mine_patterns(gold, k, window, out_path):
    """Mine the top-k POS windows around gold gaps."""
    docs = corpus.parse_tagged(Path(gold).read_text(encoding="utf-8"))
    sentences = [s for _, doc in docs for s in doc]
    windows = patterns.extract_windows(sentences, window=window)
    stats = patterns.score_patterns(windows, patterns.unigram_counts(sentences))
    top = set(patterns.select_top(stats, k=k))
    patterns.write_patterns([st for st in stats if st.pattern in top], out_path)
    click.echo(f"mined {len(top)} patterns from {sum(windows.values())} windows")


@cli.command()
@click.option("--pages", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--patterns", "patterns_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--methods", default="onp,rsm", show_default=True)
@click.option("--tagger", envvar=providers.ENV_TAG_URL, required=True)
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus-id", default="wiki", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def detect(pages, patterns_path, methods, tagger, lexicon, corpus_id, out_path):
    """Detect AZP samples on summary pages (pattern match, subject removal)."""
    methods = _parse_methods(methods, pipeline.DETECT_METHODS)
    if "onp" in methods and not patterns_path:
        raise ValidationError("method onp requires --patterns")
    mined = patterns.read_patterns(patterns_path) if patterns_path else []
    lex = _load_lexicon(lexicon)
    tag_provider = providers.open_tag_provider(tagger)
    built = pipeline.build_pages(corpus.read_pages(pages), tag_provider)
    samples = pipeline.detect_samples(built, mined, lex, methods=methods, corpus_id=corpus_id)
    count = corpus.write_samples(pipeline.canonical_order(samples), out_path)
    click.echo(f"detected {count} samples on {len(built)} pages")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--methods", default="mcm,bt,csa", show_default=True)
@click.option("--lm", envvar=providers.ENV_LM_URL)
@click.option("--translator", envvar=providers.ENV_MT_URL)
@click.option("--tagger", envvar=providers.ENV_TAG_URL)
@click.option("--top-k", default=5, show_default=True)
@click.option("--pivot-lang", default="en", show_default=True)
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def augment(in_path, methods, lm, translator, tagger, top_k, pivot_lang, lexicon, out_path):
    """Generate new candidate samples from existing ones."""
    methods = _parse_methods(methods, pipeline.GENERATE_METHODS)
    if "mcm" in methods and not lm:
        raise ValidationError("method mcm requires --lm")
    if "bt" in methods and not translator:
        raise ValidationError("method bt requires --translator")
    if top_k < 1:
        raise ValidationError(f"top_k must be >= 1, got {top_k}")
    lex = _load_lexicon(lexicon)
    samples = corpus.read_samples(in_path)
    generated = []
    if "mcm" in methods:
        mask_provider = providers.open_mask_provider(lm)
        for sample in samples:
            generated.extend(augment_mod.mcm_augment(sample, mask_provider, top_k, lex))
    if "bt" in methods:
        translate_provider = providers.open_translate_provider(translator)
        tag_provider = providers.open_tag_provider(tagger) if tagger else None
        for sample in samples:
            variant = augment_mod.bt_augment(
                sample, translate_provider, lex, tagger=tag_provider, pivot_lang=pivot_lang
            )
            if variant is not None:
                generated.append(variant)
    if "csa" in methods:
        for sample in samples:
            generated.extend(augment_mod.csa_augment_all(sample, lex))
    count = corpus.write_samples(pipeline.canonical_order(generated), out_path)
    click.echo(f"generated {count} samples from {len(samples)} inputs")


@cli.command("filter")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--rejected", "rejected_path", type=click.Path(dir_okay=False))
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False))
@click.option("--lenient", is_flag=True, help="Treat unknown features as wildcards.")
def filter_cmd(in_path, out_path, rejected_path, lexicon, lenient):
    """Keep only samples whose verb and antecedent agree."""
    lex = _load_lexicon(lexicon)
    samples = corpus.read_samples(in_path)
    kept, rejected = morph.filter_samples(samples, lex, strict=not lenient)
    corpus.write_samples(kept, out_path)
    if rejected_path:
        with open(rejected_path, "w", encoding="utf-8") as handle:
            for sample, reason in rejected:
                handle.write(json.dumps({"id": sample.id, "reason": reason}, ensure_ascii=False))
                handle.write("\n")
    click.echo(f"kept {len(kept)}, rejected {len(rejected)}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
def stats(in_path):
    """Per-method sample counts."""
    report = scoring.stats_report(corpus.read_samples(in_path))
    click.echo(report.render())


@cli.command()
@click.option("--task", type=click.Choice(["identification", "resolution"]), required=True)
@click.option("--gold", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--baseline-f1", type=float)
def score(task, gold, pred, baseline_f1):
    """Precision/recall/F1 of a prediction file against gold."""
    if task == "identification":
        report = scoring.score_identification(
            scoring.read_identification_file(gold),
            scoring.read_identification_file(pred),
            baseline_f1=baseline_f1,
        )
    else:
        report = scoring.score_resolution(
            scoring.read_resolution_gold(gold),
            scoring.read_resolution_pred(pred),
            baseline_f1=baseline_f1,
        )
    click.echo(report.render())


_RUN_KEYS = (
    "gold", "pages", "out", "methods", "lexicon", "tagger", "lm", "translator",
    "k", "window", "top_k", "pivot_lang", "corpus_id", "lenient",
)


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--gold", type=click.Path())
@click.option("--pages", type=click.Path())
@click.option("--out", type=click.Path())
@click.option("--methods")
@click.option("--lexicon", type=click.Path())
@click.option("--tagger", envvar=providers.ENV_TAG_URL)
@click.option("--lm", envvar=providers.ENV_LM_URL)
@click.option("--translator", envvar=providers.ENV_MT_URL)
@click.option("--k", type=int)
@click.option("--window", type=int)
@click.option("--top-k", type=int)
@click.option("--pivot-lang")
@click.option("--corpus-id")
@click.option("--lenient", is_flag=True, default=None)
def run(config_path, **flags):
    """Run the full pipeline; flags override config-file values."""
    settings: dict = {}
    if config_path:
        with open(config_path, encoding="utf-8") as handle:
            try:
                loaded = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config file is not valid JSON: {exc}") from exc
        unknown = sorted(set(loaded) - set(_RUN_KEYS))
        if unknown:
            raise ValidationError(f"unknown config keys: {unknown}")
        settings.update(loaded)
    for key, value in flags.items():
        if value is not None:
            settings[key] = value
    for required in ("gold", "pages", "out"):
        if not settings.get(required):
            raise ValidationError(f"missing required setting {required!r}")
    if isinstance(settings.get("methods"), str):
        settings["methods"] = _parse_methods(settings["methods"], pipeline.ALL_METHODS)
    elif isinstance(settings.get("methods"), list):
        settings["methods"] = _parse_methods(",".join(settings["methods"]), pipeline.ALL_METHODS)
    cfg = pipeline.PipelineConfig(**settings)
    manifest = pipeline.run_pipeline(cfg)
    filtered = manifest["stages"]["filter"]
    click.echo(
        f"pipeline done: kept {filtered['kept']}, rejected {filtered['rejected']} "
        f"(manifest: {Path(cfg.out) / pipeline.MANIFEST_FILENAME})"
    )


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 130
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        return 1
    except pipeline.StageError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1 if isinstance(exc.cause, ValidationError) else 2
    except (AzpError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
