import json
import math

import numpy as np
import pytest

from cskit.corpus import Utterance
from cskit.errors import DuplicateId, TranscriberFailure
from cskit.lm import KNConfig, perplexity, train_lm
from cskit.selftrain import (
    LmTarget,
    MixerTarget,
    OracleTranscriber,
    SelfTrainConfig,
    merge_manifests,
    pseudo_label,
    selftrain_round,
)


def unlabeled(i):
    return Utterance(f"u{i}", None, 1.0, "", "unlabeled")


def labeled(i, text):
    return Utterance(f"l{i}", None, 1.0, text, "train")


class FixedConfidence:
    """Transcriber with scripted per-item text and confidence."""

    def __init__(self, table):
        self.table = table

    def transcribe(self, utt):
        if utt.id not in self.table:
            raise TranscriberFailure(utt.id)
        return self.table[utt.id]


class TestPseudoLabel:
    def test_oracle_keeps_everything(self):
        truth = {f"u{i}": f"text {i} x" for i in range(5)}
        result = pseudo_label(OracleTranscriber(truth), [unlabeled(i) for i in range(5)])
        assert result.kept == 5
        assert [u.text for u in result.manifest] == [truth[f"u{i}"] for i in range(5)]
        assert all(u.split == "train" and u.pseudo for u in result.manifest)

    def test_threshold_zero_drops_all(self):
        truth = {f"u{i}": f"t{i}" for i in range(4)}
        cfg = SelfTrainConfig(confidence_threshold=0.0)
        result = pseudo_label(OracleTranscriber(truth), [unlabeled(i) for i in range(4)], cfg)
        assert result.manifest == []
        assert result.dropped_low_confidence == 4

    def test_median_threshold_keeps_half(self):
        table = {f"u{i}": (f"w{i}", -float(i + 1)) for i in range(8)}  # -1 .. -8
        cfg = SelfTrainConfig(confidence_threshold=-4.5)
        result = pseudo_label(FixedConfidence(table), [unlabeled(i) for i in range(8)], cfg)
        assert result.kept == 4
        assert result.dropped_low_confidence == 4

    def test_empty_transcripts_dropped(self):
        table = {"u0": ("", -1.0), "u1": ("ok", -1.0)}
        result = pseudo_label(FixedConfidence(table), [unlabeled(0), unlabeled(1)])
        assert result.kept == 1 and result.dropped_empty == 1

    def test_failures_skipped_and_counted(self):
        table = {"u1": ("ok", -1.0)}
        result = pseudo_label(FixedConfidence(table), [unlabeled(0), unlabeled(1)])
        assert result.failed == 1 and result.kept == 1
        assert "u0" in result.dropped_ids

    def test_rejects_non_unlabeled(self):
        with pytest.raises(ValueError):
            pseudo_label(OracleTranscriber({}), [labeled(0, "x")])

    def test_deterministic(self):
        truth = {f"u{i}": f"t {i}" for i in range(6)}
        a = pseudo_label(OracleTranscriber(truth), [unlabeled(i) for i in range(6)])
        b = pseudo_label(OracleTranscriber(truth), [unlabeled(i) for i in range(6)])
        assert a.manifest == b.manifest


class TestMerge:
    def test_sizes_add(self):
        lab = [labeled(i, "x") for i in range(100)]
        pse = pseudo_label(
            OracleTranscriber({f"u{i}": "y" for i in range(80)}),
            [unlabeled(i) for i in range(80)],
        ).manifest
        merged = merge_manifests(lab, pse)
        assert len(merged) == 180
        assert sum(1 for u in merged if u.pseudo) == 80

    def test_duplicate_rejected(self):
        with pytest.raises(DuplicateId):
            merge_manifests([labeled(0, "x")], [Utterance("l0", None, 1.0, "y", "train", pseudo=True)])

    def test_empty_pseudo(self):
        lab = [labeled(i, "x") for i in range(3)]
        assert merge_manifests(lab, []) == lab

    def test_labeled_not_mutated(self):
        lab = [labeled(0, "x")]
        snapshot = list(lab)
        merge_manifests(lab, [Utterance("p0", None, 1.0, "y", "train", pseudo=True)])
        assert lab == snapshot


def topic_sentences(words, n, seed):
    import random

    rng = random.Random(seed)
    return [" ".join(rng.choices(words, k=rng.randint(3, 6))) for _ in range(n)]


class TestRound:
    def test_lm_round_improves_dev_perplexity(self):
        topic_a = ["alpha", "beta", "gamma", "delta"]
        topic_b = ["red", "green", "blue", "cyan"]
        lab = [labeled(i, s) for i, s in enumerate(topic_sentences(topic_a, 30, 0))]
        dev = topic_sentences(topic_b, 20, 1)
        unl_texts = topic_sentences(topic_b, 40, 2)
        unl = [unlabeled(i) for i in range(40)]
        truth = {f"u{i}": t for i, t in enumerate(unl_texts)}

        target = LmTarget(dev_corpus=dev, kn_config=KNConfig(order=2))
        model, report = selftrain_round(
            lab, unl, OracleTranscriber(truth), target, SelfTrainConfig(), target_name="lm"
        )
        assert report.metric_after <= report.metric_before
        assert report.pseudo_kept == 40
        assert report.merged == 70
        assert report.metric_name == "dev_perplexity"

    def test_empty_unlabeled_equals_plain_retrain(self):
        lab = [labeled(i, s) for i, s in enumerate(["a b c", "b c d", "c d a"])]
        target = LmTarget(dev_corpus=["a b"], kn_config=KNConfig(order=2))
        model, report = selftrain_round(lab, [], OracleTranscriber({}), target)
        plain = train_lm([u.text for u in lab], KNConfig(order=2))
        assert perplexity(model, ["a b", "c d"]) == perplexity(plain, ["a b", "c d"])
        assert report.merged == report.labeled == 3

    def test_report_counts_reconcile(self):
        table = {
            "u0": ("fine", -1.0),
            "u1": ("", -1.0),          # empty -> dropped
            "u2": ("low", -9.0),       # under threshold
            # u3 missing -> failure
        }
        unl = [unlabeled(i) for i in range(4)]
        lab = [labeled(0, "seed text here")]
        target = LmTarget(dev_corpus=["seed text"], kn_config=KNConfig(order=1))
        _, report = selftrain_round(
            lab, unl, FixedConfidence(table), target,
            SelfTrainConfig(confidence_threshold=-5.0),
        )
        assert report.unlabeled == 4
        assert report.pseudo_kept == 1
        assert report.dropped_empty == 1
        assert report.dropped_low_confidence == 1
        assert report.failed == 1
        assert report.pseudo_kept + report.dropped_empty + report.dropped_low_confidence + report.failed == report.unlabeled
        assert report.merged == report.labeled + report.pseudo_kept
        rec = json.loads(report.to_json())
        assert rec["metric_name"] == "dev_perplexity"

    def test_mixer_modes_both_produce_artifacts(self):
        from cskit.mixer import MixerTrainConfig
        from cskit.synth import generate_examples, union_map

        um = union_map()
        train_ex = generate_examples(6, seed=50, min_len=3, max_len=5)
        dev_ex = generate_examples(2, seed=51, min_len=3, max_len=5)

        by_id = {}
        lab, unl, truth = [], [], {}
        for i, ex in enumerate(train_ex[:3]):
            u = labeled(i, ex.text)
            lab.append(u)
            by_id[u.id] = ex
        for i, ex in enumerate(train_ex[3:]):
            u = unlabeled(i)
            unl.append(u)
            by_id[u.id] = ex
            truth[u.id] = ex.text

        def featurize(utt):
            ex = by_id[utt.id]
            from cskit.corpus import encode_transcript

            return ex.features, encode_transcript(utt.text, um.union)

        cfg = MixerTrainConfig(hidden_size=4, max_epochs=2, seed=0)
        reports = {}
        for mode in ("from_scratch", "fine_tune"):
            target = MixerTarget(
                featurize=featurize,
                dev_examples=[(e.features, e.target) for e in dev_ex],
                vocab=um.union,
                train_config=cfg,
                current=None,
            )
            params, report = selftrain_round(
                lab, unl, OracleTranscriber(truth), target,
                SelfTrainConfig(retrain_mode=mode), target_name="mixer",
            )
            assert math.isfinite(report.metric_after)
            reports[mode] = report
        assert reports["from_scratch"].retrain_mode == "from_scratch"
        assert reports["fine_tune"].retrain_mode == "fine_tune"
