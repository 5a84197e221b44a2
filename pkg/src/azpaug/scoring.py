"""Precision/recall/F1 scoring for identification and resolution outputs,
plus per-method dataset statistics.

All scores are percents with one decimal, rounded half-up, so rendered
reports are byte-stable. F1 is the harmonic mean of the unrounded percent
values, rounded last.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional

from .corpus import METHODS
from .errors import SchemaError, ValidationError


def round_percent(value: float) -> float:
    """Round to one decimal, half away from zero, via the shortest repr."""
    return float(Decimal(str(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def f1_from_percent(precision: float, recall: float) -> float:
    """Harmonic mean of two percents, rounded to one decimal."""
    if precision + recall == 0:
        return 0.0
    return round_percent(2.0 * precision * recall / (precision + recall))


@dataclass(frozen=True)
class ScoreReport:
    precision: float
    recall: float
    f1: float
    diff: Optional[float] = None

    def render(self) -> str:
        lines = [
            f"precision: {self.precision:.1f}",
            f"recall: {self.recall:.1f}",
            f"f1: {self.f1:.1f}",
        ]
        if self.diff is not None:
            lines.append(f"diff: {self.diff:+.1f}")
        return "\n".join(lines)


def _report(tp: int, pred_total: int, gold_total: int, baseline_f1: Optional[float]) -> ScoreReport:
    precision = 100.0 * tp / pred_total if pred_total else 0.0
    recall = 100.0 * tp / gold_total if gold_total else 0.0
    f1 = f1_from_percent(precision, recall)
    diff = None if baseline_f1 is None else round_percent(f1 - baseline_f1)
    return ScoreReport(
        precision=round_percent(precision),
        recall=round_percent(recall),
        f1=f1,
        diff=diff,
    )


def _as_set(items, name: str) -> set:
    out = set(items)
    if isinstance(items, (list, tuple)) and len(items) != len(out):
        raise ValidationError(f"{name} contains duplicate entries; inputs must be sets")
    return out


def score_identification(gold, pred, baseline_f1: Optional[float] = None) -> ScoreReport:
    """Set-based P/R/F1 over (doc, sentence, gap) locations."""
    gold_set = _as_set(gold, "gold")
    pred_set = _as_set(pred, "pred")
    tp = len(gold_set & pred_set)
    return _report(tp, len(pred_set), len(gold_set), baseline_f1)


def score_resolution(gold: dict, pred: dict, baseline_f1: Optional[float] = None) -> ScoreReport:
    """P/R/F1 where a prediction is correct iff its span exactly equals one
    of the gold antecedent spans for that AZP."""
    unknown = sorted(set(pred) - set(gold))
    if unknown:
        raise ValidationError(f"predicted AZPs missing from the gold universe: {unknown[:3]}")
    correct = sum(1 for azp, span in pred.items() if span in gold[azp])
    return _report(correct, len(pred), len(gold), baseline_f1)


# ---------------------------------------------------------------------------
# Dataset statistics (per-method counts)


@dataclass(frozen=True)
class StatsReport:
    counts: tuple  # ((method, count), ...) in canonical method order
    total: int

    def render(self) -> str:
        rows = [(method, f"{count:,}") for method, count in self.counts]
        rows.append(("total", f"{self.total:,}"))
        name_width = max(len(name) for name, _ in rows)
        value_width = max(len(value) for _, value in rows)
        return "\n".join(f"{name:<{name_width}}  {value:>{value_width}}" for name, value in rows)


def stats_report(samples) -> StatsReport:
    """Count samples per method tag; total is the sum (== the input size)."""
    counter = Counter(s.method for s in samples)
    unknown = sorted(set(counter) - set(METHODS))
    if unknown:
        raise ValidationError(f"unknown method tags: {unknown}")
    counts = tuple((m, counter[m]) for m in METHODS if m in counter)
    return StatsReport(counts=counts, total=sum(counter.values()))


# ---------------------------------------------------------------------------
# Prediction-file ingestion (record format shared with the sample files,
# restricted to location/span fields)


def _load_records(path):
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
            yield recno, record


def _location(record: dict, recno: int) -> tuple:
    for key, kind in (("doc", str), ("sentence", int), ("gap", int)):
        if key not in record or not isinstance(record[key], kind) or isinstance(record[key], bool):
            raise SchemaError("missing or mistyped field", record=recno, field=key)
    return (record["doc"], record["sentence"], record["gap"])


def read_identification_file(path) -> set:
    """Locations as a set; duplicates are a schema error."""
    locations = set()
    for recno, record in _load_records(path):
        loc = _location(record, recno)
        if loc in locations:
            raise SchemaError(f"duplicate location {loc}", record=recno)
        locations.add(loc)
    return locations


def _span(value, recno: int, field: str) -> tuple:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaError("expected a [start, end] span", record=recno, field=field)
    return (value[0], value[1])


def read_resolution_gold(path) -> dict:
    """AZP location -> set of acceptable antecedent spans."""
    gold: dict = {}
    for recno, record in _load_records(path):
        loc = _location(record, recno)
        if "spans" not in record or not isinstance(record["spans"], list) or not record["spans"]:
            raise SchemaError("missing or empty field", record=recno, field="spans")
        spans = {_span(v, recno, "spans") for v in record["spans"]}
        gold.setdefault(loc, set()).update(spans)
    return gold


def read_resolution_pred(path) -> dict:
    """AZP location -> the single predicted antecedent span."""
    pred: dict = {}
    for recno, record in _load_records(path):
        loc = _location(record, recno)
        if loc in pred:
            raise SchemaError(f"duplicate prediction for {loc}", record=recno)
        if "span" not in record:
            raise SchemaError("missing field", record=recno, field="span")
        pred[loc] = _span(record["span"], recno, "span")
    return pred
