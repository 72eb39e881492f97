"""Naive self-training: pseudo-label unlabeled audio, merge, retrain.

The transcriber and the retrainable target are small interfaces so the
round orchestration stays independent of what produces transcripts
(oracle, greedy decoder, LM-fused decoder) and of what gets retrained
(the n-gram LM or the mixer).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Protocol, Sequence

import numpy as np

from .corpus import Utterance
from .errors import DuplicateId, TranscriberFailure
from .lm import KNConfig, NGramModel, perplexity, train_lm
from .mixer import Example, MixerParams, MixerTrainConfig, train_mixer

logger = logging.getLogger(__name__)


class Transcriber(Protocol):
    def transcribe(self, utterance: Utterance) -> tuple[str, float]:
        """Returns (text, confidence); confidence is a log-probability <= 0."""
        ...


@dataclass(frozen=True)
class OracleTranscriber:
    """Ground-truth lookup used by tests and controlled experiments."""

    truth: dict[str, str]
    confidence: float = -0.1

    def transcribe(self, utterance: Utterance) -> tuple[str, float]:
        if utterance.id not in self.truth:
            raise TranscriberFailure(f"no ground truth for {utterance.id}")
        return self.truth[utterance.id], self.confidence


@dataclass(frozen=True)
class SelfTrainConfig:
    confidence_threshold: float = -math.inf  # keep everything, the naive default
    retrain_mode: str = "from_scratch"  # or "fine_tune"

    def __post_init__(self):
        if self.confidence_threshold > 0:
            raise ValueError("confidences are log-probabilities <= 0")
        if self.retrain_mode not in ("from_scratch", "fine_tune"):
            raise ValueError(f"unknown retrain_mode {self.retrain_mode!r}")


@dataclass
class PseudoLabelResult:
    manifest: list[Utterance]
    kept: int = 0
    dropped_low_confidence: int = 0
    dropped_empty: int = 0
    failed: int = 0
    dropped_ids: list[str] = field(default_factory=list)


def pseudo_label(
    transcriber: Transcriber,
    unlabeled: Sequence[Utterance],
    config: SelfTrainConfig = SelfTrainConfig(),
) -> PseudoLabelResult:
    """Transcribe unlabeled utterances into provenance-flagged train entries.

    Entries under the confidence threshold or with empty transcripts are
    dropped; per-item transcriber failures are logged and skipped.
    """
    for utt in unlabeled:
        if utt.split != "unlabeled":
            raise ValueError(f"{utt.id} has split {utt.split!r}, expected 'unlabeled'")
    result = PseudoLabelResult(manifest=[])
    for utt in unlabeled:
        try:
            text, confidence = transcriber.transcribe(utt)
        except TranscriberFailure as exc:
            logger.warning("transcriber failed on %s: %s", utt.id, exc)
            result.failed += 1
            result.dropped_ids.append(utt.id)
            continue
        if confidence < config.confidence_threshold:
            result.dropped_low_confidence += 1
            result.dropped_ids.append(utt.id)
            continue
        if not text.strip():
            result.dropped_empty += 1
            result.dropped_ids.append(utt.id)
            continue
        result.manifest.append(replace(utt, text=text, split="train", pseudo=True))
        result.kept += 1
    return result


def merge_manifests(
    labeled: Sequence[Utterance], pseudo: Sequence[Utterance]
) -> list[Utterance]:
    """Concatenation preserving provenance; id sets must be disjoint."""
    overlap = {u.id for u in labeled} & {u.id for u in pseudo}
    if overlap:
        raise DuplicateId(f"ids present in both manifests: {sorted(overlap)}")
    return list(labeled) + list(pseudo)


# --------------------------------------------------------------------------
# Retrainable targets
# --------------------------------------------------------------------------

class RetrainableTarget(Protocol):
    metric_name: str

    def retrain(self, manifest: Sequence[Utterance], mode: str):
        ...

    def dev_metric(self, artifact) -> float:
        ...


@dataclass
class LmTarget:
    """Re-estimates the n-gram model on the merged transcripts."""

    dev_corpus: Sequence[str]
    kn_config: KNConfig = KNConfig()
    metric_name: str = "dev_perplexity"

    def retrain(self, manifest: Sequence[Utterance], mode: str) -> NGramModel:
        # counting is cheap; both modes re-estimate from scratch
        corpus = [u.text for u in manifest if u.text]
        return train_lm(corpus, self.kn_config)

    def dev_metric(self, artifact: NGramModel) -> float:
        return perplexity(artifact, self.dev_corpus)


@dataclass
class MixerTarget:
    """Retrains the mixer on featurized manifests.

    featurize maps an utterance to a (features, target) example; the
    current parameters seed fine-tuning.
    """

    featurize: Callable[[Utterance], Example]
    dev_examples: Sequence[Example]
    vocab: "object"
    train_config: MixerTrainConfig = MixerTrainConfig()
    current: MixerParams | None = None
    metric_name: str = "dev_ctc_loss"

    def retrain(self, manifest: Sequence[Utterance], mode: str) -> MixerParams:
        examples = [self.featurize(u) for u in manifest]
        init = self.current if mode == "fine_tune" else None
        params, _ = train_mixer(
            examples, self.dev_examples, self.vocab, self.train_config, init=init
        )
        return params

    def dev_metric(self, artifact: MixerParams) -> float:
        from .mixer import _mean_loss  # evaluation helper shared with training

        return _mean_loss(artifact, self.dev_examples)


# --------------------------------------------------------------------------
# One round
# --------------------------------------------------------------------------

@dataclass
class SelfTrainReport:
    target: str
    retrain_mode: str
    labeled: int
    unlabeled: int
    pseudo_kept: int
    dropped_low_confidence: int
    dropped_empty: int
    failed: int
    merged: int
    dropped_ids: list[str]
    metric_name: str
    metric_before: float
    metric_after: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def selftrain_round(
    labeled: Sequence[Utterance],
    unlabeled: Sequence[Utterance],
    transcriber: Transcriber,
    target: RetrainableTarget,
    config: SelfTrainConfig = SelfTrainConfig(),
    target_name: str = "lm",
):
    """pseudo-label -> merge -> retrain; returns (artifact, report).

    The labeled manifest is never mutated; the baseline metric comes from
    retraining on it alone, the final metric from the merged set.
    """
    baseline = target.retrain(labeled, config.retrain_mode)
    metric_before = target.dev_metric(baseline)

    labeling = pseudo_label(transcriber, unlabeled, config)
    merged = merge_manifests(labeled, labeling.manifest)
    artifact = target.retrain(merged, config.retrain_mode)
    metric_after = target.dev_metric(artifact)

    report = SelfTrainReport(
        target=target_name,
        retrain_mode=config.retrain_mode,
        labeled=len(labeled),
        unlabeled=len(unlabeled),
        pseudo_kept=labeling.kept,
        dropped_low_confidence=labeling.dropped_low_confidence,
        dropped_empty=labeling.dropped_empty,
        failed=labeling.failed,
        merged=len(merged),
        dropped_ids=labeling.dropped_ids,
        metric_name=target.metric_name,
        metric_before=metric_before,
        metric_after=metric_after,
    )
    return artifact, report


# --------------------------------------------------------------------------
# Decoder-backed transcriber
# --------------------------------------------------------------------------

def _frame_confidence(frames: np.ndarray) -> float:
    """Mean per-frame maximum log-probability (the greedy path's average)."""
    if frames.shape[0] == 0:
        return -math.inf
    return float(np.mean(np.max(frames, axis=1)))


@dataclass
class PosteriorgramTranscriber:
    """Decodes posteriorgrams stored as <dir>/<id>.pgrm."""

    pgram_dir: str | Path
    vocab: "object"
    decode: Callable[[np.ndarray], str]

    def transcribe(self, utterance: Utterance) -> tuple[str, float]:
        from .corpus import read_posteriorgram

        path = Path(self.pgram_dir) / f"{utterance.id}.pgrm"
        if not path.exists():
            raise TranscriberFailure(f"no posteriorgram at {path}")
        pgram = read_posteriorgram(path, expected_vocab=self.vocab)
        return self.decode(pgram.frames), _frame_confidence(pgram.frames)


@dataclass
class MixerTranscriber:
    """Fuses the source posteriorgrams of an utterance through the current
    mixer and greedy-decodes the union-vocabulary result."""

    dirs: Sequence[str | Path]
    vocabs: Sequence
    union: "object"  # UnionVocabMap
    params: MixerParams

    def transcribe(self, utterance: Utterance) -> tuple[str, float]:
        from .corpus import read_posteriorgram
        from .ctc import greedy_decode
        from .mixer import assemble_features, mixer_forward

        pgrams = []
        for directory, vocab in zip(self.dirs, self.vocabs):
            path = Path(directory) / f"{utterance.id}.pgrm"
            if not path.exists():
                raise TranscriberFailure(f"no posteriorgram at {path}")
            pgrams.append(read_posteriorgram(path, expected_vocab=vocab))
        fused = mixer_forward(self.params, assemble_features(pgrams))
        return greedy_decode(fused.frames, self.union.union), _frame_confidence(fused.frames)
