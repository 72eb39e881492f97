"""Synthetic two-alphabet code-switching task.

Two artificial "languages" share nothing: A writes a-e, B writes f-j.
Each has a frozen rule-based acoustic model emitting per-frame
probabilities over its own vocabulary: 90% mass on the true symbol when
it belongs to the model's alphabet, exactly uniform otherwise (a foreign
symbol is noise to that model). Utterances mix both alphabets, so neither
source alone can transcribe them, while their concatenated posteriorgrams
contain everything a mixer needs.

Every symbol occupies two symbol frames plus one separator frame where
both models put 90% on blank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Posteriorgram, Vocabulary, encode_transcript
from .ctc import greedy_decode
from .metrics import cer
from .mixer import UnionVocabMap, assemble_features, build_union

LANG_A = "abcde"
LANG_B = "fghij"

VOCAB_A = Vocabulary.from_characters(LANG_A)
VOCAB_B = Vocabulary.from_characters(LANG_B)

FRAMES_PER_SYMBOL = 3  # two symbol frames + one blank separator


@dataclass(frozen=True)
class SynthExample:
    text: str
    source_pgrams: tuple[Posteriorgram, Posteriorgram]
    features: np.ndarray
    target: list[int]


def union_map() -> UnionVocabMap:
    return build_union([VOCAB_A, VOCAB_B])


def _emission(vocab: Vocabulary, char: str | None) -> np.ndarray:
    """One frame from a frozen source model; char None means silence."""
    v = len(vocab)
    if char is None:
        row = np.full(v, 0.1 / (v - 1))
        row[0] = 0.9
    elif char in vocab:
        row = np.full(v, 0.1 / (v - 1))
        row[vocab.index(char)] = 0.9
    else:
        row = np.full(v, 1.0 / v)
    return row


def render_sources(text: str) -> tuple[Posteriorgram, Posteriorgram]:
    """Posteriorgrams both frozen models emit for one utterance."""
    pgrams = []
    for vocab in (VOCAB_A, VOCAB_B):
        frames = []
        for ch in text:
            frames.append(_emission(vocab, ch))
            frames.append(_emission(vocab, ch))
            frames.append(_emission(vocab, None))
        frames = np.log(np.array(frames).reshape(-1, len(vocab)))
        pgrams.append(Posteriorgram(vocab=vocab, frames=frames, frame_rate_hz=100.0))
    return tuple(pgrams)


def sample_text(rng: np.random.Generator, min_len=5, max_len=15, switch_prob=0.3) -> str:
    length = int(rng.integers(min_len, max_len + 1))
    lang = [LANG_A, LANG_B][int(rng.integers(0, 2))]
    chars = []
    for _ in range(length):
        if rng.random() < switch_prob:
            lang = LANG_B if lang is LANG_A else LANG_A
        chars.append(lang[int(rng.integers(0, len(lang)))])
    return "".join(chars)


def generate_examples(
    n: int, seed: int, min_len=5, max_len=15, switch_prob=0.3
) -> list[SynthExample]:
    rng = np.random.default_rng(seed)
    um = union_map()
    examples = []
    for _ in range(n):
        text = sample_text(rng, min_len, max_len, switch_prob)
        pgrams = render_sources(text)
        examples.append(SynthExample(
            text=text,
            source_pgrams=pgrams,
            features=assemble_features(pgrams),
            target=encode_transcript(text, um.union),
        ))
    return examples


def source_alone_cer(examples: list[SynthExample], source: int) -> float:
    """CER of greedy-decoding one frozen source against the mixed references."""
    vocab = (VOCAB_A, VOCAB_B)[source]
    refs = [ex.text for ex in examples]
    hyps = [greedy_decode(ex.source_pgrams[source].frames, vocab) for ex in examples]
    return cer(refs, hyps)


def mixer_cer(examples: list[SynthExample], decode) -> float:
    """CER of an arbitrary features -> text decoder on the examples."""
    refs = [ex.text for ex in examples]
    hyps = [decode(ex.features) for ex in examples]
    return cer(refs, hyps)
