"""Exact-match evaluation of extracted pairs.

A predicted pair counts only when attribute and value both match a gold
pair after normalization and per-record deduplication. Scores are micro
precision/recall/F1: true-positive and candidate counts are summed over
the whole corpus before division. Besides the joint score, the attribute
and value projections are scored separately, and the joint score is
broken down by record cardinality (single vs. multiple gold pairs).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Mapping

from .records import AVPair, Cardinality, ProductRecord, dedup_pairs


@dataclass(frozen=True)
class PRF:
    """Micro precision/recall/F1 with the counts they came from."""

    precision: float
    recall: float
    f1: float
    tp: int
    n_pred: int
    n_gold: int

    def as_dict(self) -> dict[str, float | int]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "n_pred": self.n_pred,
            "n_gold": self.n_gold,
        }


def prf(tp: int, n_pred: int, n_gold: int) -> PRF:
    """Build a PRF from counts; undefined ratios are reported as 0."""
    if tp < 0 or n_pred < 0 or n_gold < 0:
        raise ValueError("counts must be non-negative")
    if tp > n_pred or tp > n_gold:
        raise ValueError(f"tp={tp} exceeds n_pred={n_pred} or n_gold={n_gold}")
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PRF(precision, recall, f1, tp, n_pred, n_gold)


def match_joint(gold: AbstractSet[AVPair], pred: AbstractSet[AVPair]) -> int:
    """True positives under joint matching: both fields must match."""
    return len(gold & pred)


class PairField(enum.Enum):
    ATTRIBUTE = "attribute"
    VALUE = "value"


def match_projected(
    gold: AbstractSet[AVPair], pred: AbstractSet[AVPair], field: PairField
) -> tuple[int, int, int]:
    """(tp, n_pred, n_gold) after projecting both sides to one field.

    Projections are sets: a record predicting the same attribute twice with
    different values contributes it once.
    """
    if field is PairField.ATTRIBUTE:
        g = {p.attribute for p in gold}
        q = {p.attribute for p in pred}
    else:
        g = {p.value for p in gold}
        q = {p.value for p in pred}
    return len(g & q), len(q), len(g)


class _Counts:
    __slots__ = ("tp", "n_pred", "n_gold")

    def __init__(self) -> None:
        self.tp = 0
        self.n_pred = 0
        self.n_gold = 0

    def add(self, tp: int, n_pred: int, n_gold: int) -> None:
        self.tp += tp
        self.n_pred += n_pred
        self.n_gold += n_gold

    def prf(self) -> PRF:
        return prf(self.tp, self.n_pred, self.n_gold)


@dataclass(frozen=True)
class EvalReport:
    joint: PRF
    attribute: PRF
    value: PRF
    by_cardinality: Mapping[Cardinality, PRF]
    record_count: int

    def as_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "joint": self.joint.as_dict(),
            "attribute": self.attribute.as_dict(),
            "value": self.value.as_dict(),
            "by_cardinality": {
                card.value: score.as_dict() for card, score in self.by_cardinality.items()
            },
        }


def evaluate(
    gold_records: Iterable[ProductRecord],
    predictions: Mapping[str, list[AVPair]],
    *,
    lowercase: bool = True,
    strict_ids: bool = False,
) -> EvalReport:
    """Score predictions against gold records, micro-aggregated.

    ``predictions`` maps record ids to predicted pairs. Ids that do not
    exist among the gold records are an error; gold records without a
    prediction entry score as empty predictions unless ``strict_ids``.
    """
    records = list(gold_records)
    gold_ids = [r.id for r in records]
    id_set = set(gold_ids)
    if len(id_set) < len(gold_ids):
        dupes = sorted({i for i in gold_ids if gold_ids.count(i) > 1})
        raise ValueError(f"duplicate gold record ids: {dupes}")
    unknown = sorted(set(predictions) - id_set)
    if unknown:
        raise ValueError(f"prediction ids not present in gold records: {unknown}")
    if strict_ids:
        missing = sorted(id_set - set(predictions))
        if missing:
            raise ValueError(f"gold records without predictions (strict mode): {missing}")

    joint = _Counts()
    attribute = _Counts()
    value = _Counts()
    by_card = {Cardinality.SINGLE: _Counts(), Cardinality.MULTI: _Counts()}

    for record in records:
        gold = set(dedup_pairs(record.pairs, lowercase=lowercase))
        if not gold:
            raise ValueError(f"gold record {record.id!r} has no pairs")
        pred = set(dedup_pairs(predictions.get(record.id, []), lowercase=lowercase))

        card = Cardinality.SINGLE if len(gold) == 1 else Cardinality.MULTI
        tp = match_joint(gold, pred)
        joint.add(tp, len(pred), len(gold))
        by_card[card].add(tp, len(pred), len(gold))
        attribute.add(*match_projected(gold, pred, PairField.ATTRIBUTE))
        value.add(*match_projected(gold, pred, PairField.VALUE))

    return EvalReport(
        joint=joint.prf(),
        attribute=attribute.prf(),
        value=value.prf(),
        by_cardinality={card: counts.prf() for card, counts in by_card.items()},
        record_count=len(records),
    )
