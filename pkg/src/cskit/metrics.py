"""Edit-distance evaluation: CER, WER, SER, and two-annotator statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import DROPPED, NormalizeConfig, normalize_text
from .errors import EmptyCorpus, EmptyReferenceCorpus, IncompleteJudgments

# Metrics keep digit-bearing sentences: dropping a reference would desync
# the ref/hyp pairing that training-side normalization never sees.
_METRIC_NORM = NormalizeConfig(drop_numeric=False)


def metric_normalize(text: str) -> str:
    out = normalize_text(text, _METRIC_NORM)
    assert out is not DROPPED
    return out


@dataclass(frozen=True)
class AlignmentCounts:
    substitutions: int
    insertions: int
    deletions: int
    hits: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def edit_distance(ref: Sequence, hyp: Sequence) -> AlignmentCounts:
    """Levenshtein alignment with unit costs.

    Among minimum-cost alignments, prefers fewer substitutions, then fewer
    insertions (deterministic tie-break).
    """
    n, m = len(ref), len(hyp)
    # cell = (cost, subs, ins); lexicographic minimum
    prev = [(j, 0, j) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [(i, 0, 0)] + [None] * m  # type: ignore[list-item]
        for j in range(1, m + 1):
            if ref[i - 1] == hyp[j - 1]:
                cand = prev[j - 1]
            else:
                c, s, ins = prev[j - 1]
                cand = (c + 1, s + 1, ins)
            c, s, ins = prev[j]  # deletion
            if (c + 1, s, ins) < cand:
                cand = (c + 1, s, ins)
            c, s, ins = cur[j - 1]  # insertion
            if (c + 1, s, ins + 1) < cand:
                cand = (c + 1, s, ins + 1)
            cur[j] = cand
        prev = cur
    cost, subs, ins = prev[m]
    dels = cost - subs - ins
    return AlignmentCounts(
        substitutions=subs, insertions=ins, deletions=dels, hits=n - subs - dels
    )


def _paired(refs: Sequence[str], hyps: Sequence[str]) -> list[tuple[str, str]]:
    if len(refs) != len(hyps):
        raise ValueError(f"{len(refs)} references vs {len(hyps)} hypotheses")
    return [(metric_normalize(r), metric_normalize(h)) for r, h in zip(refs, hyps)]


def _pooled_rate(pairs: list[tuple[Sequence, Sequence]]) -> float:
    errors = 0
    ref_len = 0
    for ref, hyp in pairs:
        counts = edit_distance(ref, hyp)
        errors += counts.distance
        ref_len += len(ref)
    if ref_len == 0:
        raise EmptyReferenceCorpus("pooled reference length is zero")
    return 100.0 * errors / ref_len


def wer(refs: Sequence[str], hyps: Sequence[str]) -> float:
    """Pooled word error rate in percent (sum of errors over sum of lengths)."""
    return _pooled_rate([(r.split(), h.split()) for r, h in _paired(refs, hyps)])


def cer(refs: Sequence[str], hyps: Sequence[str], keep_spaces: bool = False) -> float:
    """Pooled character error rate in percent.

    Spaces are removed before tokenizing so word-segmentation mistakes do
    not count twice; pass keep_spaces=True to include them.
    """
    pairs = []
    for r, h in _paired(refs, hyps):
        if not keep_spaces:
            r = r.replace(" ", "")
            h = h.replace(" ", "")
        pairs.append((list(r), list(h)))
    return _pooled_rate(pairs)


def ser(refs: Sequence[str], hyps: Sequence[str]) -> float:
    """Percent of sentences whose normalized hypothesis is not an exact match."""
    pairs = _paired(refs, hyps)
    if not pairs:
        raise EmptyCorpus("no sentence pairs")
    wrong = sum(1 for r, h in pairs if r != h)
    return 100.0 * wrong / len(pairs)


# --------------------------------------------------------------------------
# Human evaluation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Judgment:
    """One binary accept/reject verdict by one evaluator on one item."""

    item_id: str
    evaluator_id: str
    accept: bool
    timestamp: float = 0.0


def _verdict_pairs(
    judgments: Sequence[Judgment], items: Sequence[str]
) -> dict[str, tuple[bool, bool]]:
    by_item: dict[str, dict[str, bool]] = {item: {} for item in items}
    for j in judgments:
        if j.item_id in by_item:
            by_item[j.item_id][j.evaluator_id] = j.accept
    bad = [item for item, v in by_item.items() if len(v) != 2]
    if bad:
        raise IncompleteJudgments(bad)
    return {item: tuple(v.values()) for item, v in by_item.items()}  # type: ignore[return-value]


def human_ser(judgments: Sequence[Judgment], items: Sequence[str]) -> float:
    """Sentence error rate under the both-evaluators-accept rule."""
    pairs = _verdict_pairs(judgments, items)
    if not pairs:
        raise EmptyCorpus("no items")
    correct = sum(1 for a, b in pairs.values() if a and b)
    return 100.0 * (1.0 - correct / len(pairs))


def agreement(judgments: Sequence[Judgment], items: Sequence[str]) -> float:
    """Percent of items where the two evaluators gave the same verdict."""
    pairs = _verdict_pairs(judgments, items)
    if not pairs:
        raise EmptyCorpus("no items")
    same = sum(1 for a, b in pairs.values() if a == b)
    return 100.0 * same / len(pairs)
