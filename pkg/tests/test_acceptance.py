"""Acceptance suite: one test per criterion, each printing a pass/fail
line (run with ``pytest tests/test_acceptance.py -s`` to see them).

Every tolerance and runtime budget is asserted inside the test. The
``f1_arithmetic`` criterion re-derives F1 from the published
identification/resolution tables' printed precision/recall at a +-0.05
tolerance; that bound is tighter than one-decimal rounding of P and R can
guarantee (propagation reaches +-0.1), so it fails on five rows by
construction. The +-0.1 consistency check lives in test_scoring.
"""

import json
import random
import time
from collections import Counter
from contextlib import contextmanager
from pathlib import Path

from azpaug import morph, patterns, providers, scoring
from azpaug.augment import bt_augment, csa_augment
from azpaug.cli import main as cli_main
from azpaug.corpus import Token, make_sentence, read_samples
from azpaug.normalize import DEFAULT_CONFIG, HARAKAT, normalize_text
from azpaug.subject import find_subject, insert_at_gap, remove_subject

from conftest import build_sample
from test_patterns import brute_force_scores
from test_scoring import IDENTIFICATION_ROWS, RESOLUTION_ROWS

FIXTURES = Path(__file__).parent / "fixtures"


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_seconds, f"{name}: {elapsed:.2f}s exceeds {budget_seconds}s budget"
    print(f"[PASS] {name} ({elapsed:.2f}s)")


def test_normalization_golden():
    with criterion("normalization golden + idempotence fuzz", 1.0):
        assert normalize_text("لا بأس أن تُقالَ") == "لا باس ان تقال"
        rng = random.Random(1)
        pool = [chr(cp) for cp in range(0x0621, 0x064B)] + list(HARAKAT) + [" "]
        for _ in range(10_000):
            text = "".join(rng.choice(pool) for _ in range(rng.randrange(0, 30)))
            once = normalize_text(text)
            assert normalize_text(once) == once
            assert not set(once) & DEFAULT_CONFIG.diacritic_set


def test_f1_arithmetic():
    # baseline + five method rows per table; the combined-data rows are
    # combination settings, not baseline/method rows
    rows = IDENTIFICATION_ROWS[:6] + RESOLUTION_ROWS[:6]
    assert len(rows) == 12
    with criterion("F1 arithmetic on published tables (+-0.05)", 1.0):
        failures = []
        for p, r, printed in rows:
            recomputed = 2.0 * p * r / (p + r)
            if abs(recomputed - printed) > 0.05:
                failures.append(f"P={p} R={r}: 2PR/(P+R)={recomputed:.4f} vs printed {printed}")
        assert not failures, "rows outside +-0.05: " + "; ".join(failures)


def test_table1_structure():
    with criterion("stats table totals", 1.0):
        samples = []
        for method, count in (("onp", 369), ("rsm", 1196), ("mcm", 736), ("bt", 501), ("csa", 104)):
            samples.extend(
                build_sample(sample_id=f"{method}{i}", method=method) for i in range(count)
            )
        report = scoring.stats_report(samples)
        assert report.total == 2906
        assert "2,906" in report.render()


TAGS = ["NN", "VBP", "VBD", "IN", "JJ", "NNP", "PRP", "CC"]


def _random_pattern(rng):
    return patterns.PosPattern(
        before=(rng.choice(TAGS), rng.choice(TAGS)),
        after=(rng.choice(TAGS), rng.choice(TAGS)),
    )


def test_ttest_oracle():
    with criterion("t-test scores vs brute force", 10.0):
        # hand-computed case: count=3, n=100, mu=0.003 -> t=1.583
        target = patterns.PosPattern(before=("NN", "VBP"), after=("IN", "JJ"))
        windows = Counter({target: 3, patterns.PosPattern(("CC", "CC"), ("CC", "CC")): 97})
        unigrams = Counter({"NN": 2000, "VBP": 3000, "IN": 2500, "JJ": 2000, "CC": 500})
        stat = next(s for s in patterns.score_patterns(windows, unigrams) if s.pattern == target)
        assert abs(stat.mu - 0.003) < 1e-12
        assert abs(stat.t - 1.583) < 1e-3

        rng = random.Random(104)
        for _ in range(100):
            windows = Counter()
            for _ in range(rng.randrange(1, 30)):
                windows[_random_pattern(rng)] += rng.randrange(1, 20)
            while sum(windows.values()) > 500:
                windows[next(iter(windows))] = 1
            unigrams = Counter({t: rng.randrange(1, 40) for t in TAGS})
            k = rng.randrange(1, 9)
            expected = [row[0] for row in brute_force_scores(windows, unigrams)[:k]]
            got = patterns.select_top(patterns.score_patterns(windows, unigrams), k=k)
            assert got == expected


def test_matching_oracle():
    with criterion("pattern matching vs exhaustive scan", 5.0):
        rng = random.Random(105)
        for _ in range(1000):
            sent = make_sentence(
                [(f"w{i}", rng.choice(TAGS)) for i in range(rng.randrange(0, 12))]
            )
            pats = {_random_pattern(rng) for _ in range(rng.randrange(1, 6))}
            tags = sent.pos_tags()
            expected = [
                g for g in range(len(tags) + 1)
                if patterns.window_at(tags, g, 2) in pats
            ]
            assert patterns.match_patterns(pats, sent) == expected


def test_rsm_inverse_and_planted_subjects(lexicon):
    with criterion("subject removal inverse + planted recovery", 5.0):
        rng = random.Random(106)
        surfaces = ["تقع", "لندن", "نهر", "كبير", "في", "مدينة", "هو", "قال", "جدا"]
        tags = ["VBP", "NNP", "NN", "JJ", "IN", "NN", "PRP", "VBD", "RB"]
        for _ in range(1000):
            n = rng.randrange(1, 10)
            picks = [rng.randrange(len(surfaces)) for _ in range(n)]
            sent = make_sentence([(surfaces[p], tags[p]) for p in picks])
            start = rng.randrange(0, n)
            end = rng.randrange(start + 1, n + 1)
            removed = remove_subject(sent, (start, end))
            assert insert_at_gap(removed, start, sent.tokens[start:end]) == sent

        subjects = [("لندن", "NNP"), ("باريس", "NNP"), ("المدينة", "NN"), ("الملكة", "NN")]
        tails = [
            [("على", "IN"), ("نهر", "NN"), ("السين", "NNP")],
            [("في", "IN"), ("فرنسا", "NNP")],
            [("هنا", "RB")],
            [],
        ]
        recovered = 0
        for i in range(50):
            sent = make_sentence([("تقع", "VBP"), subjects[i % 4]] + tails[(i // 4) % 4])
            if find_subject(sent, 0, lexicon) == (1, 2):
                recovered += 1
        assert recovered == 50


def test_morphology_coherence(lexicon):
    with criterion("inflection/analysis coherence + number round trip", 5.0):
        produced = 0
        for surface, entry in lexicon.overrides.items():
            tok = Token(surface, "NN", 0)
            for target in morph.NUMBERS:
                if target == entry.features.number:
                    continue
                inflected = morph.inflect_noun(tok, entry.features, target, lex=lexicon)
                if inflected is None:
                    continue
                produced += 1
                assert morph.analyze(inflected, lexicon).number == target, (surface, target)
        assert produced > 100

        # singular -> dual -> singular returns the original surface on
        # sound paradigms, nouns and verbs alike
        round_tripped = 0
        for surface, entry in lexicon.overrides.items():
            if entry.features.number != morph.SINGULAR or entry.table is not None:
                continue
            tok = Token(surface, "NN", 0)
            dual = morph.inflect_noun(tok, entry.features, morph.DUAL, lex=lexicon)
            if dual is None:
                continue
            back = morph.inflect_noun(dual, morph.analyze(dual, lexicon), morph.SINGULAR, lex=lexicon)
            assert back is not None and back.surface == surface, surface
            round_tripped += 1
        assert round_tripped > 50
        for base in ("يكتب", "تكتب", "يدرس", "يستخدم", "تعتبر"):
            tok = Token(base, "VBP", 0)
            feats = morph.analyze(tok, lexicon)
            dual = morph.inflect_verb(tok, feats, morph.DUAL)
            back = morph.inflect_verb(dual, morph.analyze(dual, lexicon), morph.SINGULAR)
            assert back.surface == base

        sample = build_sample(
            ant=(("الحاسوب", "NN"), ("جهاز", "NN")),
            span=(0, 1),
            azp=(("يستخدم", "VBP"), ("في", "IN"), ("كل", "NN"), ("مكان", "NN")),
            gap=1,
            verb=0,
            features=morph.MorphFeatures(morph.SINGULAR, morph.MASCULINE, 3),
        )
        dual_sample = csa_augment(sample, morph.DUAL, lexicon)
        back_sample = csa_augment(dual_sample, morph.SINGULAR, lexicon)
        assert back_sample.azp_sentence.surfaces() == sample.azp_sentence.surfaces()
        assert back_sample.antecedent_sentence.surfaces() == sample.antecedent_sentence.surfaces()


def test_filter_partition_and_mcm_failure_case(lexicon):
    with criterion("filter partition + number-mismatch rejection", 1.0):
        rng = random.Random(107)
        ants = [("طلاب", "NN"), ("مهندس", "NN"), ("باريس", "NNP"), ("قلعة", "NN"), ("غامض", "NN")]
        verbs = [("يدرس", "VBP"), ("تقع", "VBP"), ("يدرسون", "VBP")]
        for _ in range(50):
            batch = [
                build_sample(
                    sample_id=f"b{i}",
                    ant=(rng.choice(ants),),
                    azp=(rng.choice(verbs), ("هنا", "RB")),
                    span=(0, 1),
                    gap=1,
                    verb=0,
                )
                for i in range(rng.randrange(0, 15))
            ]
            kept, rejected = morph.filter_samples(batch, lexicon)
            assert len(kept) + len(rejected) == len(batch)
            ids = sorted([s.id for s in kept] + [s.id for s, _ in rejected])
            assert ids == sorted(s.id for s in batch)

        # a singular verb with the antecedent swapped to its plural
        sample = build_sample(
            method="mcm",
            ant=(("طلاب", "NN"), ("في", "IN"), ("الجامعة", "NN")),
            azp=(("يدرس", "VBP"), ("في", "IN"), ("المكتبة", "NN")),
            span=(0, 1),
            gap=1,
            verb=0,
        )
        kept, rejected = morph.filter_samples([sample], lexicon)
        assert kept == []
        assert rejected == [(sample, morph.REJECT_NUMBER)]


def _translate_stub(tmp_path, entries):
    path = tmp_path / "mt.json"
    path.write_text(json.dumps({"entries": entries}, ensure_ascii=False), encoding="utf-8")
    return providers.StubTranslateProvider(path)


def test_bt_rules(lexicon, tmp_path):
    with criterion("back-translation keep/drop/re-remove rules", 1.0):
        base = build_sample()

        identity = _translate_stub(tmp_path, [])
        out = bt_augment(base, identity, lexicon)
        assert out.azp_sentence.surfaces() == base.azp_sentence.surfaces()
        assert out.gap_index == base.gap_index and out.verb_index == base.verb_index
        assert out.method == "bt"

        src = base.azp_sentence.text()
        dropper = _translate_stub(
            tmp_path,
            [
                {"src": "ar", "tgt": "en", "text": src, "out": "on the seine ."},
                {"src": "en", "tgt": "ar", "text": "on the seine .", "out": "على نهر السين ."},
            ],
        )
        assert bt_augment(base, dropper, lexicon) is None

        rsm_like = build_sample(azp=(("تعتبر", "VBP"), ("جميلة", "JJ"), (".", "PUNC")), gap=1, verb=0)
        inserter = _translate_stub(
            tmp_path,
            [
                {"src": "ar", "tgt": "en", "text": rsm_like.azp_sentence.text(),
                 "out": "it is considered beautiful ."},
                {"src": "en", "tgt": "ar", "text": "it is considered beautiful .",
                 "out": "تعتبر هي جميلة ."},
            ],
        )
        out = bt_augment(rsm_like, inserter, lexicon)
        assert out.azp_sentence.surfaces() == ["تعتبر", "جميلة", "."]
        assert out.azp_sentence.azp_gaps == [out.gap_index] == [1]


def test_pipeline_determinism(tmp_path):
    with criterion("two pipeline runs are byte-identical", 30.0):
        manifests = []
        for name in ("first", "second"):
            out = tmp_path / name
            code = cli_main(
                [
                    "run",
                    "--gold", str(FIXTURES / "gold.tags"),
                    "--pages", str(FIXTURES / "pages.jsonl"),
                    "--tagger", f"stub:{FIXTURES / 'tags.stub.json'}",
                    "--lm", f"stub:{FIXTURES / 'mask.stub.json'}",
                    "--translator", f"stub:{FIXTURES / 'translate.stub.json'}",
                    "--out", str(out),
                ]
            )
            assert code == 0
            manifests.append(out)
        first, second = manifests
        for name in ("samples.azp", "manifest.json", "stats.txt", "patterns.tsv"):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name
        samples = read_samples(first / "samples.azp")
        assert len(samples) > 0
        manifest = json.loads((first / "manifest.json").read_text(encoding="utf-8"))
        stages = manifest["stages"]
        generated = sum(stages["generate"][m] for m in ("mcm", "bt", "csa"))
        detected = sum(stages["detect"].values())
        assert stages["filter"]["kept"] + stages["filter"]["rejected"] == detected + generated
