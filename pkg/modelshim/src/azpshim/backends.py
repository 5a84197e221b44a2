"""Model backends behind the three wire endpoints.

- masked prediction: a transformers masked-LM (any model id, multilingual
  BERT in production use) with an offline constructor for a small
  randomly-initialized, seeded model used in tests;
- translation: a lexicon word-map backend (identity when source equals
  target); any heavier translation service can be put behind the same
  endpoint instead;
- tagging: a table-plus-suffix-heuristics Arabic tagger.

All backends are loaded once and read-only afterwards.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

_AR_DIACRITICS = re.compile(r"[ً-ْ]")
_ALIF_VARIANTS = str.maketrans({"أ": "ا", "إ": "ا", "آ": "ا"})


def _normalize(text: str) -> str:
    return _AR_DIACRITICS.sub("", text).translate(_ALIF_VARIANTS)


class BackendError(Exception):
    """A backend failed on a single request."""


@dataclass(frozen=True)
class Candidate:
    token: str
    score: float


class MaskedLMBackend:
    """Top-k single-token predictions from a masked language model.

    Multi-subword words are handled by masking the first subword and
    merging each predicted piece back with the word's remaining original
    subwords, so candidates are always full surface forms. Scores are the
    model's token probabilities renormalized over the returned list.
    """

    def __init__(self, model, tokenizer, device: str = "cpu", sampling: bool = False):
        self.model = model.to(device).eval()
        self.tokenizer = tokenizer
        self.device = device
        self.sampling = sampling

    @classmethod
    def from_model_id(cls, model_id: str, device: str = "cpu", sampling: bool = False):
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForMaskedLM.from_pretrained(model_id)
        return cls(model, tokenizer, device=device, sampling=sampling)

    def predict(self, tokens: List[str], mask_index: int, top_k: int) -> List[Candidate]:
        import torch

        pieces_per_word = [self.tokenizer.tokenize(word) or [self.tokenizer.unk_token] for word in tokens]
        target_pieces = pieces_per_word[mask_index]
        flat: List[str] = []
        mask_pos = None
        for i, pieces in enumerate(pieces_per_word):
            if i == mask_index:
                mask_pos = len(flat) + 1  # +1 for the leading [CLS]
                flat.append(self.tokenizer.mask_token)
                flat.extend(pieces[1:])
            else:
                flat.extend(pieces)
        ids = self.tokenizer.convert_tokens_to_ids(
            [self.tokenizer.cls_token] + flat + [self.tokenizer.sep_token]
        )
        with torch.no_grad():
            logits = self.model(torch.tensor([ids], device=self.device)).logits[0, mask_pos]
        probs = torch.softmax(logits, dim=-1)

        if self.sampling:
            order = torch.multinomial(probs, num_samples=min(len(probs), top_k + 16))
        else:
            order = torch.argsort(probs, descending=True, stable=True)

        special = set(self.tokenizer.all_special_tokens)
        picked: List[Tuple[str, float]] = []
        for token_id in order.tolist():
            piece = self.tokenizer.convert_ids_to_tokens(token_id)
            if piece in special or piece.startswith("##"):
                continue
            surface = self.tokenizer.convert_tokens_to_string([piece] + target_pieces[1:])
            surface = "".join(surface.split())
            if not surface:
                continue
            picked.append((surface, float(probs[token_id])))
            if len(picked) == top_k:
                break
        total = sum(score for _, score in picked)
        if total <= 0:
            return []
        candidates = [Candidate(token=t, score=score / total) for t, score in picked]
        candidates.sort(key=lambda c: -c.score)
        return candidates


TINY_DEFAULT_VOCAB = [
    "باريس", "لندن", "مدينة", "عاصمة", "فرنسا", "نهر", "السين", "تقع",
    "على", "في", "هي", "جميلة", "طالب", "طلاب", "معلم", "مهندس", "كبير",
    ".", "،",
]


def build_tiny_masked_lm(vocab: Optional[List[str]] = None, seed: int = 7,
                         sampling: bool = False) -> MaskedLMBackend:
    """A small randomly-initialized BERT over an in-memory vocabulary.

    Fully offline: the tokenizer is built from the word list and the
    weights from a seeded initialization, so identical seeds give identical
    predictions. Useful for tests and wire-level work; real runs use
    from_model_id.
    """
    import torch
    from transformers import BertConfig, BertForMaskedLM, BertTokenizer

    words = list(dict.fromkeys(vocab or TINY_DEFAULT_VOCAB))
    specials = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    mapping = {token: i for i, token in enumerate(specials + words)}
    tokenizer = BertTokenizer(vocab=mapping, do_lower_case=False)
    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=len(mapping),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    return MaskedLMBackend(BertForMaskedLM(config), tokenizer, sampling=sampling)


class LexiconTranslateBackend:
    """Word-by-word translation from direction-keyed maps.

    Map file: ``{"maps": {"ar-en": {"word": "word", ...}, ...}}``. Unknown
    words pass through; identical source and target language is identity.
    """

    def __init__(self, path=None):
        self.maps = {}
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            self.maps = {key: dict(value) for key, value in data.get("maps", {}).items()}

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        if source_lang == target_lang:
            return text
        mapping = self.maps.get(f"{source_lang}-{target_lang}", {})
        return " ".join(mapping.get(word, word) for word in text.split())


class RuleTagBackend:
    """Arabic POS tagging from a surface table plus affix heuristics."""

    def __init__(self, path=None, default: str = "NN"):
        self.table = {}
        self.default = default
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            self.table = {_normalize(k): v for k, v in data.get("tags", {}).items()}
            self.default = data.get("default", default)

    def _heuristic(self, surface: str) -> str:
        if all(unicodedata.category(ch).startswith("P") for ch in surface):
            return "PUNC"
        if surface.isdigit():
            return "CD"
        if len(surface) >= 3 and surface[0] in ("ي", "ت") and not surface.startswith("ال"):
            return "VBP"
        return self.default

    def tag(self, tokens: List[str]) -> List[str]:
        out = []
        for token in tokens:
            surface = _normalize(token)
            out.append(self.table.get(surface) or self._heuristic(surface))
        return out
