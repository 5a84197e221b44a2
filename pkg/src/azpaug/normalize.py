"""Arabic text normalization: alif unification and diacritic removal.

Two deterministic steps, applied before any tagging or matching:

- the hamza/madda alif variants (أ إ آ) are folded to the bare alif (ا);
- the eight harakat (U+064B..U+0652: tanwin forms, fatha, damma, kasra,
  shadda, sukun) are stripped.

Everything else passes through unchanged, so non-Arabic text is a no-op.
Superscript alef (U+0670) and tatweel (U+0640) are kept by default but can
be added to ``diacritic_set`` by callers that need them gone.
"""

import unicodedata
from dataclasses import dataclass, field

from .errors import ValidationError

ALIF = "ا"
ALIF_HAMZA_ABOVE = "أ"
ALIF_HAMZA_BELOW = "إ"
ALIF_MADDA = "آ"
TATWEEL = "ـ"
SUPERSCRIPT_ALEF = "ٰ"

DEFAULT_ALIF_MAP = {
    ALIF_HAMZA_ABOVE: ALIF,
    ALIF_HAMZA_BELOW: ALIF,
    ALIF_MADDA: ALIF,
}

# fathatan, dammatan, kasratan, fatha, damma, kasra, shadda, sukun
HARAKAT = frozenset(chr(cp) for cp in range(0x064B, 0x0653))


def _is_arabic_mark(ch: str) -> bool:
    # Tatweel is not a combining mark but is an accepted, documented extension.
    if ch == TATWEEL:
        return True
    return "؀" <= ch <= "ۿ" and unicodedata.category(ch) == "Mn"


@dataclass(frozen=True)
class NormalizationConfig:
    """Character-level rewrite rules for the normalizer."""

    alif_map: dict = field(default_factory=lambda: dict(DEFAULT_ALIF_MAP))
    diacritic_set: frozenset = HARAKAT

    def __post_init__(self):
        if not self.diacritic_set:
            raise ValidationError("diacritic_set must be non-empty")
        bad = sorted(ch for ch in self.diacritic_set if not _is_arabic_mark(ch))
        if bad:
            points = ", ".join(f"U+{ord(ch):04X}" for ch in bad)
            raise ValidationError(f"diacritic_set entries are not Arabic combining marks: {points}")
        table = {ord(ch): None for ch in self.diacritic_set}
        table.update((ord(src), dst) for src, dst in self.alif_map.items())
        object.__setattr__(self, "_table", table)


DEFAULT_CONFIG = NormalizationConfig()


def normalize_text(text: str, cfg: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Apply alif folding and diacritic removal to ``text``.

    Total on valid unicode and idempotent; only deletes or 1:1-replaces
    code points, so the output is never longer than the input.
    """
    return text.translate(cfg._table)
