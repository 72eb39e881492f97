#!/usr/bin/env python3
"""Self-training demo on the language model.

Labeled text covers one topic; unlabeled audio (here: oracle transcripts)
covers the dev topic. One pseudo-labeling round pulls the dev-topic text
into LM training and the dev perplexity drops.

    python scripts/selftrain_lm_demo.py --unlabeled 80
"""

import argparse
import random

from cskit.corpus import Utterance
from cskit.lm import KNConfig
from cskit.selftrain import (
    LmTarget,
    OracleTranscriber,
    SelfTrainConfig,
    selftrain_round,
)


def sentences(topic_words, n, seed):
    rng = random.Random(seed)
    return [" ".join(rng.choices(topic_words, k=rng.randint(3, 7))) for _ in range(n)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--labeled", type=int, default=40)
    parser.add_argument("--unlabeled", type=int, default=80)
    parser.add_argument("--order", type=int, default=3)
    parser.add_argument("--threshold", type=float, default=float("-inf"))
    args = parser.parse_args()

    topic_a = [f"alpha{i}" for i in range(10)]
    topic_b = [f"beta{i}" for i in range(10)]

    labeled = [
        Utterance(f"l{i}", None, 1.0, s, "train")
        for i, s in enumerate(sentences(topic_a, args.labeled, 1))
    ]
    dev = sentences(topic_b, 30, 2)
    unl_texts = sentences(topic_b, args.unlabeled, 3)
    unlabeled = [Utterance(f"u{i}", None, 1.0, "", "unlabeled") for i in range(args.unlabeled)]
    truth = {f"u{i}": t for i, t in enumerate(unl_texts)}

    target = LmTarget(dev_corpus=dev, kn_config=KNConfig(order=args.order))
    _, report = selftrain_round(
        labeled, unlabeled, OracleTranscriber(truth), target,
        SelfTrainConfig(confidence_threshold=args.threshold), target_name="lm",
    )
    print(report.to_json())
    print(f"dev perplexity {report.metric_before:.2f} -> {report.metric_after:.2f}")


if __name__ == "__main__":
    main()
