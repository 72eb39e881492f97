"""CTC loss, greedy decoding, and prefix beam search with LM shallow fusion.

The loss is an exact forward-backward over the blank-augmented target in
log space. The returned gradient is taken with respect to pre-softmax
frame scores (the renormalization-aware direction), which is both what a
finite-difference probe on normalized rows measures and what a neural
layer feeding the loss needs.

Beam search keeps two bookkeeping tracks per prefix: summed path
probability (what hypotheses are ranked by) and best-single-alignment
probability (what pruning ranks by). Pruning on the best alignment makes
a width-1 beam coincide with greedy decoding exactly, while a saturating
beam recovers the true maximum-a-posteriori label sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import Vocabulary
from .errors import BlankInTarget, NoSpaceSymbol, VocabOverflow
from .lm import BOS, EOS, NGramModel, score_word

NEG_INF = -np.inf


# --------------------------------------------------------------------------
# Loss
# --------------------------------------------------------------------------

def _expand_target(target: Sequence[int]) -> np.ndarray:
    expanded = np.zeros(2 * len(target) + 1, dtype=np.int64)
    expanded[1::2] = target
    return expanded


def _check_target(target: Sequence[int], vocab_size: int) -> None:
    for t in target:
        if t == 0:
            raise BlankInTarget("target contains the blank id 0")
        if not 0 <= t < vocab_size:
            raise VocabOverflow(f"target id {t} outside vocabulary of size {vocab_size}")


def ctc_loss(logprobs: np.ndarray, target: Sequence[int]) -> tuple[float, np.ndarray]:
    """Negative log-likelihood of the target under all CTC alignments.

    logprobs: (T, V) natural-log probabilities, rows normalized, blank at 0.
    Returns (loss, grad) where grad[t, k] = p[t, k] - occupancy[t, k]; when
    no alignment fits in T frames the loss is +inf and the grad is zero.
    """
    logprobs = np.asarray(logprobs, dtype=np.float64)
    T, V = logprobs.shape
    _check_target(target, V)

    if T == 0:
        return (0.0 if len(target) == 0 else math.inf), np.zeros((0, V))

    labels = _expand_target(target)
    S = len(labels)
    # skip transition s-2 -> s allowed only onto a non-blank differing
    # from the non-blank two states back
    skip_ok = np.zeros(S, dtype=bool)
    if S > 2:
        skip_ok[2:] = (labels[2:] != 0) & (labels[2:] != labels[:-2])

    emit = logprobs[:, labels]  # (T, S)

    alpha = np.full((T, S), NEG_INF)
    alpha[0, 0] = emit[0, 0]
    if S > 1:
        alpha[0, 1] = emit[0, 1]
    for t in range(1, T):
        prev = alpha[t - 1]
        move = np.full(S, NEG_INF)
        move[1:] = prev[:-1]
        skip = np.full(S, NEG_INF)
        skip[2:] = np.where(skip_ok[2:], prev[:-2], NEG_INF)
        alpha[t] = emit[t] + np.logaddexp(np.logaddexp(prev, move), skip)

    logz = alpha[T - 1, S - 1]
    if S > 1:
        logz = np.logaddexp(logz, alpha[T - 1, S - 2])
    if logz == NEG_INF:
        return math.inf, np.zeros((T, V))

    # beta[t, s] excludes the emission at t
    beta = np.full((T, S), NEG_INF)
    beta[T - 1, S - 1] = 0.0
    if S > 1:
        beta[T - 1, S - 2] = 0.0
    for t in range(T - 2, -1, -1):
        nxt = beta[t + 1] + emit[t + 1]
        move = np.full(S, NEG_INF)
        move[:-1] = nxt[1:]
        skip = np.full(S, NEG_INF)
        if S > 2:
            skip[:-2] = np.where(skip_ok[2:], nxt[2:], NEG_INF)
        beta[t] = np.logaddexp(np.logaddexp(nxt, move), skip)

    with np.errstate(invalid="ignore"):
        gamma = np.exp(alpha + beta - logz)
    occupancy = np.zeros((T, V))
    for s in range(S):
        occupancy[:, labels[s]] += gamma[:, s]
    grad = np.exp(logprobs) - occupancy
    return float(-logz), grad


def min_frames_for(target: Sequence[int]) -> int:
    """Smallest T that admits an alignment (repeats need a separating blank)."""
    repeats = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + repeats


# --------------------------------------------------------------------------
# Greedy decoding
# --------------------------------------------------------------------------

def collapse_ids(path: Sequence[int], blank: int = 0) -> list[int]:
    out: list[int] = []
    prev = None
    for p in path:
        if p != prev and p != blank:
            out.append(p)
        prev = p
    return out


def greedy_decode(logprobs: np.ndarray, vocab: Vocabulary) -> str:
    """Per-frame argmax, collapse repeats, drop blanks."""
    logprobs = np.asarray(logprobs)
    if logprobs.shape[0] == 0:
        return ""
    path = np.argmax(logprobs, axis=1)
    return "".join(vocab.symbols[i] for i in collapse_ids(path))


# --------------------------------------------------------------------------
# Prefix beam search
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecoderConfig:
    beam_width: int = 100
    token_min_logp: float = -5.0
    lm_weight: float = 0.5  # alpha
    word_bonus: float = 1.5  # beta, per completed word
    n_best: int = 1
    use_bos: bool = False  # condition the first word on <s>
    use_eos: bool = False  # score </s> after the final word

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if not 1 <= self.n_best <= self.beam_width:
            raise ValueError("need 1 <= n_best <= beam_width")


@dataclass(frozen=True)
class Hypothesis:
    text: str
    acoustic_logp: float
    lm_logp: float
    combined_score: float


class _Beam:
    __slots__ = ("s_b", "s_nb", "v_b", "v_nb", "words", "partial", "lm_logp", "n_words")

    def __init__(self, words: tuple[str, ...], partial: str, lm_logp: float, n_words: int):
        self.s_b = NEG_INF  # log sum over paths ending in blank
        self.s_nb = NEG_INF  # log sum over paths ending in the last symbol
        self.v_b = NEG_INF  # best single such path
        self.v_nb = NEG_INF
        self.words = words
        self.partial = partial
        self.lm_logp = lm_logp
        self.n_words = n_words

    def sum_score(self) -> float:
        return np.logaddexp(self.s_b, self.s_nb)

    def best_score(self) -> float:
        return max(self.v_b, self.v_nb)


def _lm_context(words: tuple[str, ...], use_bos: bool) -> tuple[str, ...]:
    return (BOS, *words) if use_bos else words


def prefix_beam_search(
    logprobs: np.ndarray,
    vocab: Vocabulary,
    config: DecoderConfig = DecoderConfig(),
    lm: Optional[NGramModel] = None,
) -> list[Hypothesis]:
    """N-best CTC decoding with optional word-level LM shallow fusion.

    The LM contributes alpha * ln P(word | history) + beta each time a
    space completes a word, and once more for the trailing partial word
    at the end of the utterance. Ties break lexicographically on the
    prefix, so identical inputs always give identical output.
    """
    logprobs = np.asarray(logprobs, dtype=np.float64)
    T, V = logprobs.shape
    space_id = vocab.space_index
    if lm is not None and space_id is None:
        raise NoSpaceSymbol("LM fusion needs a space symbol in the vocabulary")
    alpha = config.lm_weight if lm is not None else 0.0
    beta = config.word_bonus if lm is not None else 0.0

    root = _Beam(words=(), partial="", lm_logp=0.0, n_words=0)
    root.s_b = 0.0
    root.v_b = 0.0
    beams: dict[tuple[int, ...], _Beam] = {(): root}

    for t in range(T):
        frame = logprobs[t]
        tokens = [c for c in range(1, V) if frame[c] >= config.token_min_logp]
        nxt: dict[tuple[int, ...], _Beam] = {}

        def successor(prefix: tuple[int, ...], parent: _Beam, c: int | None) -> _Beam:
            # c is the appended token; None means same prefix
            key = prefix if c is None else prefix + (c,)
            beam = nxt.get(key)
            if beam is not None:
                return beam
            if c is None:
                beam = _Beam(parent.words, parent.partial, parent.lm_logp, parent.n_words)
            elif c == space_id:
                words, partial = parent.words, parent.partial
                lm_logp, n_words = parent.lm_logp, parent.n_words
                if partial:
                    if lm is not None:
                        lm_logp += score_word(lm, partial, _lm_context(words, config.use_bos))
                    words += (partial,)
                    n_words += 1
                beam = _Beam(words, "", lm_logp, n_words)
            else:
                beam = _Beam(
                    parent.words, parent.partial + vocab.symbols[c],
                    parent.lm_logp, parent.n_words,
                )
            nxt[key] = beam
            return beam

        for prefix, beam in beams.items():
            tot_s = np.logaddexp(beam.s_b, beam.s_nb)
            tot_v = max(beam.v_b, beam.v_nb)
            last = prefix[-1] if prefix else None

            stay = successor(prefix, beam, None)
            lp_blank = frame[0]
            stay.s_b = np.logaddexp(stay.s_b, tot_s + lp_blank)
            stay.v_b = max(stay.v_b, tot_v + lp_blank)

            for c in tokens:
                lp = frame[c]
                if c == last:
                    # repeat merges into the run unless a blank intervened
                    stay.s_nb = np.logaddexp(stay.s_nb, beam.s_nb + lp)
                    stay.v_nb = max(stay.v_nb, beam.v_nb + lp)
                    ext = successor(prefix, beam, c)
                    ext.s_nb = np.logaddexp(ext.s_nb, beam.s_b + lp)
                    ext.v_nb = max(ext.v_nb, beam.v_b + lp)
                else:
                    ext = successor(prefix, beam, c)
                    ext.s_nb = np.logaddexp(ext.s_nb, tot_s + lp)
                    ext.v_nb = max(ext.v_nb, tot_v + lp)

        ranked = sorted(
            nxt.items(),
            key=lambda kv: (
                -(kv[1].best_score() + alpha * kv[1].lm_logp + beta * kv[1].n_words),
                kv[0],
            ),
        )
        beams = dict(ranked[: config.beam_width])

    scored: list[tuple[float, str, Hypothesis]] = []
    for prefix, beam in beams.items():
        acoustic = float(beam.sum_score())
        lm_total = beam.lm_logp
        n_words = beam.n_words
        words = beam.words
        if lm is not None and beam.partial:
            lm_total += score_word(lm, beam.partial, _lm_context(words, config.use_bos))
            words += (beam.partial,)
            n_words += 1
        if lm is not None and config.use_eos:
            lm_total += score_word(lm, EOS, _lm_context(words, config.use_bos))
        combined = acoustic + alpha * lm_total + beta * n_words
        text = "".join(vocab.symbols[i] for i in prefix)
        scored.append((combined, text, Hypothesis(text, acoustic, lm_total, combined)))

    scored.sort(key=lambda item: (-item[0], item[1]))
    return [hyp for _, _, hyp in scored[: config.n_best]]
