import pytest

from azpaug import morph
from azpaug.corpus import AzpSample, make_sentence


@pytest.fixture(scope="session")
def lexicon():
    return morph.default_lexicon()


def build_sample(
    *,
    sample_id="s1",
    method="gold",
    ant=(("باريس", "NNP"), ("هي", "PRP"), ("عاصمة", "NN"), ("فرنسا", "NNP"), (".", "PUNC")),
    azp=(("تقع", "VBP"), ("على", "IN"), ("نهر", "NN"), ("السين", "NNP"), (".", "PUNC")),
    gap=1,
    verb=0,
    span=(0, 1),
    features=morph.MorphFeatures(number=morph.SINGULAR, gender=morph.FEMININE, person=3),
    source=("wiki", "باريس", 1),
):
    """A valid two-sentence sample; defaults describe the Paris page."""
    return AzpSample(
        id=sample_id,
        method=method,
        antecedent_sentence=make_sentence(ant),
        azp_sentence=make_sentence(azp, gaps=[gap]),
        gap_index=gap,
        verb_index=verb,
        antecedent_span=span,
        features=features,
        source=source,
    )


@pytest.fixture
def paris_sample():
    return build_sample()
