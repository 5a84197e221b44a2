import random

import pytest

from azpaug import morph
from azpaug.corpus import Token
from azpaug.errors import ValidationError

from conftest import build_sample


def N(surface, pos="NN"):
    return Token(surface=surface, pos=pos, index=0)


def V(surface, pos="VBP"):
    return Token(surface=surface, pos=pos, index=0)


class TestAnalyze:
    def test_verb_plural_masculine(self, lexicon):
        feats = morph.analyze(V("يكتبون"), lexicon)
        assert (feats.number, feats.gender, feats.person) == (morph.PLURAL, morph.MASCULINE, 3)

    def test_noun_taa_marbuta(self, lexicon):
        feats = morph.analyze(N("مهندسة"), lexicon)
        assert (feats.number, feats.gender) == (morph.SINGULAR, morph.FEMININE)

    def test_unmatched_token_is_unknown(self, lexicon):
        feats = morph.analyze(N("كمبيوترxyz"), lexicon)
        assert feats == morph.MorphFeatures()

    def test_non_nominal_non_verb_is_unknown(self, lexicon):
        assert morph.analyze(Token("كبيرة", "JJ", 0), lexicon) == morph.MorphFeatures()

    def test_definite_article_stripped_for_lookup(self, lexicon):
        feats = morph.analyze(N("الطلاب"), lexicon)
        assert feats.number == morph.PLURAL

    def test_lexicon_override_beats_rules(self, lexicon):
        # عمان ends in the dual suffix but is a singular city name
        feats = morph.analyze(N("عمان", pos="NNP"), lexicon)
        assert feats.number == morph.SINGULAR

    def test_analyze_normalizes_first(self, lexicon):
        feats = morph.analyze(N("أحمد", pos="NNP"), lexicon)
        assert (feats.number, feats.gender) == (morph.SINGULAR, morph.MASCULINE)

    def test_deterministic_and_total(self, lexicon):
        rng = random.Random(11)
        letters = [chr(cp) for cp in range(0x0621, 0x064B)]
        for _ in range(300):
            surface = "".join(rng.choice(letters) for _ in range(rng.randrange(1, 8)))
            pos = rng.choice(["NN", "VBP", "NNP", "JJ", "PRP"])
            first = morph.analyze(Token(surface, pos, 0), lexicon)
            assert morph.analyze(Token(surface, pos, 0), lexicon) == first


class TestInflectVerb:
    def test_imperfect_masculine_to_dual(self, lexicon):
        feats = morph.analyze(V("يكتب"), lexicon)
        assert morph.inflect_verb(V("يكتب"), feats, morph.DUAL).surface == "يكتبان"

    def test_imperfect_feminine_to_plural(self, lexicon):
        feats = morph.analyze(V("تكتب"), lexicon)
        assert morph.inflect_verb(V("تكتب"), feats, morph.PLURAL).surface == "يكتبن"

    def test_identity_when_target_equals_current(self, lexicon):
        tok = V("يكتب")
        feats = morph.analyze(tok, lexicon)
        assert morph.inflect_verb(tok, feats, morph.SINGULAR) is tok

    def test_perfect_suffixes(self, lexicon):
        feats = morph.MorphFeatures(morph.SINGULAR, morph.MASCULINE, 3)
        assert morph.inflect_verb(V("كتب", pos="VBD"), feats, morph.DUAL).surface == "كتبا"
        assert morph.inflect_verb(V("كتب", pos="VBD"), feats, morph.PLURAL).surface == "كتبوا"

    def test_unknown_features_unavailable(self, lexicon):
        assert morph.inflect_verb(V("كتب", pos="VBD"), morph.MorphFeatures(), morph.DUAL) is None

    def test_non_verb_tag_is_contract_error(self, lexicon):
        with pytest.raises(ValidationError):
            morph.inflect_verb(N("مهندس"), morph.MorphFeatures(), morph.DUAL)

    def test_bad_target_rejected(self, lexicon):
        with pytest.raises(ValidationError):
            morph.inflect_verb(V("يكتب"), morph.MorphFeatures(), "triple")


class TestInflectNoun:
    def test_sound_masculine_plural(self, lexicon):
        feats = morph.analyze(N("مهندس"), lexicon)
        assert morph.inflect_noun(N("مهندس"), feats, morph.PLURAL, lex=lexicon).surface == "مهندسون"

    def test_sound_feminine_dual(self, lexicon):
        feats = morph.analyze(N("معلمة"), lexicon)
        assert morph.inflect_noun(N("معلمة"), feats, morph.DUAL, lex=lexicon).surface == "معلمتان"

    def test_proper_noun_not_in_table_unavailable(self, lexicon):
        feats = morph.analyze(N("فيصل", pos="NNP"), lexicon)
        assert morph.inflect_noun(N("فيصل", pos="NNP"), feats, morph.DUAL, lex=lexicon) is None

    def test_broken_plural_via_table(self, lexicon):
        feats = morph.analyze(N("طالب"), lexicon)
        assert morph.inflect_noun(N("طالب"), feats, morph.PLURAL, lex=lexicon).surface == "طلاب"

    def test_table_missing_target_unavailable(self, lexicon):
        feats = morph.analyze(N("بلد"), lexicon)
        assert morph.inflect_noun(N("بلد"), feats, morph.DUAL, lex=lexicon) is None

    def test_article_restored_on_inflected_form(self, lexicon):
        feats = morph.analyze(N("الحاسوب"), lexicon)
        out = morph.inflect_noun(N("الحاسوب"), feats, morph.PLURAL, lex=lexicon)
        assert out.surface == "الحواسيب"

    def test_feminine_without_taa_marbuta_unavailable(self, lexicon):
        feats = morph.analyze(N("شمس"), lexicon)
        assert morph.inflect_noun(N("شمس"), feats, morph.DUAL, lex=lexicon) is None


class TestAgrees:
    def test_identical(self):
        feats = morph.MorphFeatures(morph.SINGULAR, morph.MASCULINE, 3)
        assert morph.agrees(feats, feats)

    def test_number_mismatch(self):
        a = morph.MorphFeatures(morph.PLURAL, morph.MASCULINE, 3)
        b = morph.MorphFeatures(morph.SINGULAR, morph.MASCULINE, 3)
        assert not morph.agrees(a, b)

    def test_unknown_fails_strict(self):
        a = morph.MorphFeatures(morph.SINGULAR, morph.UNKNOWN, 3)
        b = morph.MorphFeatures(morph.SINGULAR, morph.MASCULINE, 3)
        assert not morph.agrees(a, b)

    def test_unknown_wildcard_in_lenient(self):
        a = morph.MorphFeatures(morph.SINGULAR, morph.UNKNOWN, 3)
        b = morph.MorphFeatures(morph.SINGULAR, morph.MASCULINE, 3)
        assert morph.agrees(a, b, strict=False)
        c = morph.MorphFeatures(morph.PLURAL, morph.UNKNOWN, 3)
        assert not morph.agrees(c, b, strict=False)


class TestFilter:
    def test_student_to_students_rejected(self, lexicon):
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
        assert rejected[0][1] == morph.REJECT_NUMBER

    def test_matching_gold_sample_kept(self, lexicon, paris_sample):
        kept, rejected = morph.filter_samples([paris_sample], lexicon)
        assert kept == [paris_sample] and rejected == []

    def test_gender_mismatch_reason(self, lexicon):
        sample = build_sample(
            ant=(("مهندس", "NN"),),
            azp=(("تدرس", "VBP"), ("هنا", "RB")),
            span=(0, 1),
            gap=1,
            verb=0,
        )
        _, rejected = morph.filter_samples([sample], lexicon)
        assert rejected[0][1] == morph.REJECT_GENDER

    def test_unanalyzable_reason(self, lexicon):
        sample = build_sample(
            ant=(("كذاكذا", "NN"),),
            azp=(("يدرس", "VBP"), ("هنا", "RB")),
            span=(0, 1),
            gap=1,
            verb=0,
        )
        _, rejected = morph.filter_samples([sample], lexicon)
        assert rejected[0][1] == morph.REJECT_UNANALYZABLE

    def test_partition_on_random_batches(self, lexicon):
        rng = random.Random(8)
        ants = [("طلاب", "NN"), ("مهندس", "NN"), ("باريس", "NNP"), ("قلعة", "NN"), ("غريبه", "NN")]
        verbs = [("يدرس", "VBP"), ("تقع", "VBP"), ("يدرسون", "VBP")]
        for _ in range(30):
            batch = [
                build_sample(
                    sample_id=f"b{i}",
                    ant=(rng.choice(ants),),
                    azp=(rng.choice(verbs), ("هنا", "RB")),
                    span=(0, 1),
                    gap=1,
                    verb=0,
                )
                for i in range(rng.randrange(0, 12))
            ]
            kept, rejected = morph.filter_samples(batch, lexicon)
            assert len(kept) + len(rejected) == len(batch)
            ids = sorted([s.id for s in kept] + [s.id for s, _ in rejected])
            assert ids == sorted(s.id for s in batch)

    def test_lenient_keeps_unknowns(self, lexicon):
        sample = build_sample(
            ant=(("كذاكذا", "NN"),),
            azp=(("يدرس", "VBP"), ("هنا", "RB")),
            span=(0, 1),
            gap=1,
            verb=0,
        )
        kept, _ = morph.filter_samples([sample], lexicon, strict=False)
        assert kept == [sample]


class TestLexiconLoading:
    def test_duplicate_surface_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("هو\tsingular\tmasculine\t3\nهو\tsingular\tmasculine\t3\n", encoding="utf-8")
        with pytest.raises(ValidationError) as exc:
            morph.load_lexicon(path)
        assert "duplicate" in str(exc.value)

    def test_bad_number_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("هو\ttwice\tmasculine\t3\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            morph.load_lexicon(path)

    def test_bad_table_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("بلد\tsingular\tmasculine\t3\tquad=بلدان\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            morph.load_lexicon(path)

    def test_unavailable_marker(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("بلد\tsingular\tmasculine\t3\tdual=-;plural=بلدان\n", encoding="utf-8")
        lex = morph.load_lexicon(path)
        assert lex.overrides["بلد"].table == {"dual": None, "plural": "بلدان"}


class TestCoherence:
    def test_inflection_analysis_coherence_over_lexicon(self, lexicon):
        produced = 0
        for surface, entry in lexicon.overrides.items():
            tok = N(surface)
            for target in morph.NUMBERS:
                if target == entry.features.number:
                    continue
                inflected = morph.inflect_noun(tok, entry.features, target, lex=lexicon)
                if inflected is None:
                    continue
                produced += 1
                assert morph.analyze(inflected, lexicon).number == target, (
                    surface, target, inflected.surface
                )
        assert produced > 100

    def test_verb_paradigm_coherence(self, lexicon):
        bases = ["يكتب", "تكتب", "يدرس", "تدرس", "يستخدم", "تعتبر"]
        for base in bases:
            tok = V(base)
            feats = morph.analyze(tok, lexicon)
            for target in morph.NUMBERS:
                inflected = morph.inflect_verb(tok, feats, target)
                assert inflected is not None
                assert morph.analyze(inflected, lexicon).number == target

    def test_short_stem_verbs_refuse_ambiguous_forms(self, lexicon):
        # يقعن would re-analyze as singular, so the plural of تقع is not emitted
        tok = V("تقع")
        feats = morph.analyze(tok, lexicon)
        assert morph.inflect_verb(tok, feats, morph.PLURAL) is None
        assert morph.inflect_verb(tok, feats, morph.SINGULAR) is tok
