import random

import pytest

from azpaug.errors import ValidationError
from azpaug.normalize import (
    DEFAULT_CONFIG,
    HARAKAT,
    NormalizationConfig,
    TATWEEL,
    normalize_text,
)

GOLDEN_IN = "لا بأس أن تُقالَ"
GOLDEN_OUT = "لا باس ان تقال"


def test_golden_example():
    assert normalize_text(GOLDEN_IN) == GOLDEN_OUT


def test_empty():
    assert normalize_text("") == ""


def test_alif_madda():
    assert normalize_text("آداب") == "اداب"


def test_latin_passthrough():
    assert normalize_text("hello, World! 123") == "hello, World! 123"


def test_idempotent_on_golden():
    once = normalize_text(GOLDEN_IN)
    assert normalize_text(once) == once


def _random_arabic(rng, length):
    pool = (
        [chr(cp) for cp in range(0x0621, 0x064B)]  # letters incl. alif variants
        + list(HARAKAT) * 2
        + [" ", "آ", "أ", "إ"]
    )
    return "".join(rng.choice(pool) for _ in range(length))


def test_idempotence_and_charset_fuzz():
    rng = random.Random(99)
    for _ in range(500):
        text = _random_arabic(rng, rng.randrange(0, 40))
        out = normalize_text(text)
        assert normalize_text(out) == out
        assert not set(out) & DEFAULT_CONFIG.diacritic_set
        assert not set(out) & set(DEFAULT_CONFIG.alif_map)
        assert len(out) <= len(text)


def test_extended_config_strips_tatweel():
    cfg = NormalizationConfig(diacritic_set=HARAKAT | {TATWEEL})
    assert normalize_text("قـــال", cfg) == "قال"


def test_config_rejects_empty_diacritics():
    with pytest.raises(ValidationError):
        NormalizationConfig(diacritic_set=frozenset())


def test_config_rejects_non_marks():
    with pytest.raises(ValidationError) as exc:
        NormalizationConfig(diacritic_set=frozenset({"x"}))
    assert "U+0078" in str(exc.value)
