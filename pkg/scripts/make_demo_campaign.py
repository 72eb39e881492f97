#!/usr/bin/env python3
"""Build a small demo evaluation campaign with audible tone WAVs.

Creates <out>/audio/*.wav, a campaign directory, and prints the serve
command. Point the browser UI at the served API afterwards.

    python scripts/make_demo_campaign.py --out demo
    cskit evalsvc serve --campaign demo/campaign --port 8723
"""

import argparse
from pathlib import Path

import numpy as np

from cskit.evalsvc import Campaign, EvalItem
from cskit.segmenter import write_wav

RATE = 16000

TRANSCRIPTS = [
    "ok <fr>d'accord</fr> yes",
    "<en>so lucky</en> to be here",
    "plain sentence without switching",
    "bonjour <fr>tout le monde</fr>",
    "short one",
    "mixed <en>words</en> and <fr>mots</fr>",
]


def tone(freq, seconds=2.0, amplitude=0.4):
    t = np.arange(int(seconds * RATE)) / RATE
    fade = np.minimum(1.0, np.minimum(t, t[::-1]) * 20)
    return amplitude * np.sin(2 * np.pi * freq * t) * fade


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo")
    parser.add_argument("--evaluators", nargs="*", default=["eva", "evb", "evc"])
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    root = Path(args.out)
    audio_dir = root / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    items = []
    for k, transcript in enumerate(TRANSCRIPTS):
        wav = audio_dir / f"item{k}.wav"
        write_wav(wav, tone(220 + 60 * k), RATE)
        items.append(EvalItem(f"item{k}", str(wav), transcript))

    campaign = Campaign.create(root / "campaign", items, args.evaluators, args.seed)
    print(f"campaign with {len(campaign.items)} items at {campaign.directory}")
    print(f"serve it:  cskit evalsvc serve --campaign {campaign.directory} --port 8723")


if __name__ == "__main__":
    main()
