"""Few-shot code-switching fusion of frozen monolingual posteriorgrams.

A small bidirectional LSTM (two layers, then an affine projection with a
log-softmax) maps concatenated source posteriorgrams into one
union-vocabulary posteriorgram. The source models are inputs only: the
mixer reads their per-frame probabilities and nothing here ever touches
them. Forward, backward (full backpropagation through time) and the
Adam-style training loop are plain numpy.

Parameter vector layout (the serialization and gradient order):
for each layer in order, for each direction (forward, backward):
W (F_in x 4H), U (H x 4H), b (4H), each row-major; then the output
projection W_out (2H x V) and b_out (V). Gates within the 4H axis are
ordered input, forget, candidate, output.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import BLANK_SYMBOL, Posteriorgram, Vocabulary
from .ctc import ctc_loss
from .errors import Diverged, FrameCountMismatch, ShapeMismatch, VocabMismatch

# --------------------------------------------------------------------------
# Union vocabulary
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UnionVocabMap:
    union: Vocabulary
    index_maps: tuple[tuple[int, ...], ...]  # per source: source id -> union id


def build_union(vocabs: Sequence[Vocabulary]) -> UnionVocabMap:
    """Blank plus the code-point-sorted union of all non-blank symbols.

    Shared characters map to the same union index from every source;
    any permutation of the inputs yields the same union.
    """
    chars: set[str] = set()
    for v in vocabs:
        chars.update(v.symbols[1:])
    union = Vocabulary.from_characters(chars)
    maps = []
    for v in vocabs:
        maps.append(tuple(
            0 if s == BLANK_SYMBOL else union.index(s) for s in v.symbols
        ))
    return UnionVocabMap(union=union, index_maps=tuple(maps))


def assemble_features(
    posteriorgrams: Sequence[Posteriorgram],
    encoder_feats: np.ndarray | None = None,
    log_domain: bool = False,
) -> np.ndarray:
    """Horizontal concatenation of the source probabilities (T x sum(V_i)).

    Posteriorgrams are exponentiated into the probability domain unless
    log_domain is set; encoder features, when given, are appended as-is.
    Sources must agree on frame count and frame rate; resampling across
    mismatched encoder strides is not supported.
    """
    if not posteriorgrams:
        raise ValueError("need at least one posteriorgram")
    rates = {p.frame_rate_hz for p in posteriorgrams}
    if len(rates) != 1:
        raise FrameCountMismatch(f"sources disagree on frame rate: {sorted(rates)}")
    lengths = {p.num_frames for p in posteriorgrams}
    if encoder_feats is not None:
        lengths.add(int(np.asarray(encoder_feats).shape[0]))
    if len(lengths) != 1:
        raise FrameCountMismatch(f"inputs disagree on frame count: {sorted(lengths)}")
    parts = [p.frames if log_domain else np.exp(p.frames) for p in posteriorgrams]
    if encoder_feats is not None:
        parts.append(np.asarray(encoder_feats, dtype=np.float64))
    return np.concatenate(parts, axis=1)


# --------------------------------------------------------------------------
# Parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CellParams:
    w: np.ndarray  # (F_in, 4H)
    u: np.ndarray  # (H, 4H)
    b: np.ndarray  # (4H,)


@dataclass(frozen=True)
class MixerParams:
    input_size: int
    hidden_size: int
    vocab_size: int
    layers: tuple[tuple[CellParams, CellParams], ...]  # (forward, backward) per layer
    w_out: np.ndarray  # (2H, V)
    b_out: np.ndarray  # (V,)
    vocab: Vocabulary | None = None

    def cells(self) -> Iterable[CellParams]:
        for fwd, bwd in self.layers:
            yield fwd
            yield bwd

    def to_vector(self) -> np.ndarray:
        chunks = []
        for cell in self.cells():
            chunks.extend([cell.w.ravel(), cell.u.ravel(), cell.b])
        chunks.extend([self.w_out.ravel(), self.b_out])
        return np.concatenate(chunks)

    def with_vector(self, vec: np.ndarray) -> "MixerParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (param_count(self.input_size, self.hidden_size, self.vocab_size),):
            raise ShapeMismatch(f"expected {self.to_vector().size} parameters")
        pos = 0

        def take(shape):
            nonlocal pos
            n = int(np.prod(shape))
            out = vec[pos:pos + n].reshape(shape)
            pos += n
            return out

        h = self.hidden_size
        layers = []
        for fwd, _ in self.layers:
            f_in = fwd.w.shape[0]
            pair = []
            for _ in range(2):
                pair.append(CellParams(take((f_in, 4 * h)), take((h, 4 * h)), take((4 * h,))))
            layers.append(tuple(pair))
        w_out = take((2 * h, self.vocab_size))
        b_out = take((self.vocab_size,))
        return replace(self, layers=tuple(layers), w_out=w_out, b_out=b_out)


def param_count(input_size: int, hidden_size: int, vocab_size: int, num_layers: int = 2) -> int:
    h = hidden_size
    total = 0
    f_in = input_size
    for _ in range(num_layers):
        total += 2 * (f_in * 4 * h + h * 4 * h + 4 * h)
        f_in = 2 * h
    total += 2 * h * vocab_size + vocab_size
    return total


def init_mixer_params(
    input_size: int,
    hidden_size: int,
    vocab: Vocabulary,
    seed: int = 0,
    num_layers: int = 2,
) -> MixerParams:
    """Uniform init in +-1/sqrt(H), seeded."""
    rng = np.random.default_rng(seed)
    limit = 1.0 / np.sqrt(hidden_size)
    h = hidden_size

    def uni(*shape):
        return rng.uniform(-limit, limit, size=shape)

    layers = []
    f_in = input_size
    for _ in range(num_layers):
        pair = tuple(
            CellParams(w=uni(f_in, 4 * h), u=uni(h, 4 * h), b=uni(4 * h))
            for _ in range(2)
        )
        layers.append(pair)
        f_in = 2 * h
    return MixerParams(
        input_size=input_size,
        hidden_size=hidden_size,
        vocab_size=len(vocab),
        layers=tuple(layers),
        w_out=uni(2 * h, len(vocab)),
        b_out=uni(len(vocab)),
        vocab=vocab,
    )


# --------------------------------------------------------------------------
# Forward / backward
# --------------------------------------------------------------------------

def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _lstm_forward(cell: CellParams, x: np.ndarray):
    """Returns hidden states (T, H) and the cache for BPTT."""
    t_len = x.shape[0]
    h_dim = cell.u.shape[0]
    hs = np.zeros((t_len, h_dim))
    cache = []
    h_prev = np.zeros(h_dim)
    c_prev = np.zeros(h_dim)
    for t in range(t_len):
        z = x[t] @ cell.w + h_prev @ cell.u + cell.b
        i = _sigmoid(z[:h_dim])
        f = _sigmoid(z[h_dim:2 * h_dim])
        g = np.tanh(z[2 * h_dim:3 * h_dim])
        o = _sigmoid(z[3 * h_dim:])
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        cache.append((x[t], h_prev, c_prev, i, f, g, o, tc))
        hs[t] = h
        h_prev, c_prev = h, c
    return hs, cache


def _lstm_backward(cell: CellParams, cache, dh):
    """Gradients for one direction given d(loss)/d(hidden states)."""
    t_len = len(cache)
    h_dim = cell.u.shape[0]
    dw = np.zeros_like(cell.w)
    du = np.zeros_like(cell.u)
    db = np.zeros_like(cell.b)
    dx = np.zeros((t_len, cell.w.shape[0]))
    dh_rec = np.zeros(h_dim)
    dc_rec = np.zeros(h_dim)
    for t in range(t_len - 1, -1, -1):
        x_t, h_prev, c_prev, i, f, g, o, tc = cache[t]
        dh_tot = dh[t] + dh_rec
        do = dh_tot * tc
        dc = dh_tot * o * (1.0 - tc * tc) + dc_rec
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_rec = dc * f
        dz = np.concatenate([
            di * i * (1 - i),
            df * f * (1 - f),
            dg * (1 - g * g),
            do * o * (1 - o),
        ])
        dw += np.outer(x_t, dz)
        du += np.outer(h_prev, dz)
        db += dz
        dx[t] = dz @ cell.w.T
        dh_rec = dz @ cell.u.T
    return dw, du, db, dx


def _bidi_forward(layer: tuple[CellParams, CellParams], x: np.ndarray):
    fwd_cell, bwd_cell = layer
    h_fwd, cache_fwd = _lstm_forward(fwd_cell, x)
    h_bwd_rev, cache_bwd = _lstm_forward(bwd_cell, x[::-1])
    h_bwd = h_bwd_rev[::-1]
    return np.concatenate([h_fwd, h_bwd], axis=1), (cache_fwd, cache_bwd)


def _forward_all(params: MixerParams, features: np.ndarray):
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_size:
        raise ShapeMismatch(
            f"features must be T x {params.input_size}, got {x.shape}"
        )
    caches = []
    layer_inputs = []
    for layer in params.layers:
        layer_inputs.append(x)
        x, cache = _bidi_forward(layer, x)
        caches.append(cache)
    logits = x @ params.w_out + params.b_out
    if logits.size:
        peak = logits.max(axis=1, keepdims=True)
        logits = logits - (peak + np.log(np.sum(np.exp(logits - peak), axis=1, keepdims=True)))
    return logits, (layer_inputs, caches, x)


def mixer_forward(
    params: MixerParams, features: np.ndarray, frame_rate_hz: float = 100.0
) -> Posteriorgram:
    """Log-normalized union-vocabulary posteriorgram for a feature matrix."""
    if params.vocab is None:
        raise ValueError("params carry no vocabulary; attach one to decode")
    logprobs, _ = _forward_all(params, features)
    return Posteriorgram(vocab=params.vocab, frames=logprobs, frame_rate_hz=frame_rate_hz)


def mixer_backward(
    params: MixerParams, features: np.ndarray, target: Sequence[int]
) -> tuple[float, np.ndarray]:
    """CTC loss of the mixer output plus d(loss)/d(parameter vector).

    An infeasible target yields (+inf, zero gradient), mirroring the loss.
    """
    logprobs, (layer_inputs, caches, top_h) = _forward_all(params, features)
    loss, grad_logits = ctc_loss(logprobs, target)
    if not np.isfinite(loss):
        return loss, np.zeros(params.to_vector().shape)

    chunks_rev = []
    db_out = grad_logits.sum(axis=0)
    dw_out = top_h.T @ grad_logits
    dh = grad_logits @ params.w_out.T
    chunks_rev.extend([db_out, dw_out.ravel()])

    h_dim = params.hidden_size
    for layer, cache, _x in zip(params.layers[::-1], caches[::-1], layer_inputs[::-1]):
        fwd_cell, bwd_cell = layer
        cache_fwd, cache_bwd = cache
        dh_fwd = dh[:, :h_dim]
        dh_bwd = dh[:, h_dim:]
        dw_f, du_f, db_f, dx_f = _lstm_backward(fwd_cell, cache_fwd, dh_fwd)
        dw_b, du_b, db_b, dx_b_rev = _lstm_backward(bwd_cell, cache_bwd, dh_bwd[::-1])
        dx = dx_f + dx_b_rev[::-1]
        chunks_rev.extend([
            db_b, du_b.ravel(), dw_b.ravel(),
            db_f, du_f.ravel(), dw_f.ravel(),
        ])
        dh = dx
    return float(loss), np.concatenate(chunks_rev[::-1])


# --------------------------------------------------------------------------
# Training
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MixerTrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    grad_clip: float = 5.0
    batch_size: int = 8
    max_epochs: int = 30
    patience: int = 5
    hidden_size: int = 128
    seed: int = 0

    def __post_init__(self):
        for name in ("beta1", "beta2", "adam_eps", "grad_clip", "batch_size",
                     "max_epochs", "patience", "hidden_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    dev_loss: float


Example = tuple[np.ndarray, Sequence[int]]


def _mean_loss(params: MixerParams, data: Sequence[Example]) -> float:
    total = 0.0
    for features, target in data:
        logprobs, _ = _forward_all(params, features)
        loss, _ = ctc_loss(logprobs, target)
        total += loss
    return total / len(data)


def train_mixer(
    train_set: Sequence[Example],
    dev_set: Sequence[Example],
    vocab: Vocabulary,
    config: MixerTrainConfig = MixerTrainConfig(),
    init: MixerParams | None = None,
) -> tuple[MixerParams, list[EpochStats]]:
    """Mini-batch Adam with gradient-norm clipping and dev early stopping.

    Returns the parameters of the best dev epoch (epoch 0 is the
    untrained baseline) and the per-epoch loss history. Deterministic
    for a fixed seed.
    """
    if not train_set:
        raise ValueError("train_set is empty")
    if not dev_set:
        raise ValueError("dev_set is empty (early stopping needs one)")
    feat_dim = {f.shape[1] for f, _ in list(train_set) + list(dev_set)}
    if len(feat_dim) != 1:
        raise ShapeMismatch(f"inconsistent feature widths: {sorted(feat_dim)}")

    params = init if init is not None else init_mixer_params(
        input_size=feat_dim.pop(), hidden_size=config.hidden_size,
        vocab=vocab, seed=config.seed,
    )
    theta = params.to_vector()
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    step = 0
    rng = np.random.default_rng(config.seed)

    history = [EpochStats(0, _mean_loss(params, train_set), _mean_loss(params, dev_set))]
    if not np.isfinite(history[0].train_loss):
        raise Diverged(0)
    best = (history[0].dev_loss, theta.copy())
    stale = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_set))
        for start in range(0, len(order), config.batch_size):
            batch = [train_set[i] for i in order[start:start + config.batch_size]]
            grad = np.zeros_like(theta)
            current = params.with_vector(theta)
            for features, target in batch:
                loss, g = mixer_backward(current, features, target)
                if not np.isfinite(loss):
                    raise Diverged(epoch)
                grad += g
            grad /= len(batch)
            norm = float(np.linalg.norm(grad))
            if norm > config.grad_clip:
                grad *= config.grad_clip / norm
            step += 1
            m = config.beta1 * m + (1 - config.beta1) * grad
            v = config.beta2 * v + (1 - config.beta2) * grad * grad
            m_hat = m / (1 - config.beta1 ** step)
            v_hat = v / (1 - config.beta2 ** step)
            theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)

        # losses of the epoch-end model, evaluated in manifest order so the
        # history is independent of the shuffle
        current = params.with_vector(theta)
        dev_loss = _mean_loss(current, dev_set)
        history.append(EpochStats(epoch, _mean_loss(current, train_set), dev_loss))
        if not np.isfinite(dev_loss):
            raise Diverged(epoch)
        if dev_loss < best[0]:
            best = (dev_loss, theta.copy())
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break

    return params.with_vector(best[1]), history


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

_MAGIC = b"MIXR"
_VERSION = 1


def save_mixer(params: MixerParams, path: str | Path) -> None:
    """magic, u16 version, u32 F, u32 H, u32 V, then f32 LE parameters."""
    header = _MAGIC + struct.pack(
        "<HIII", _VERSION, params.input_size, params.hidden_size, params.vocab_size
    )
    Path(path).write_bytes(header + params.to_vector().astype("<f4").tobytes())


def load_mixer(path: str | Path, vocab: Vocabulary | None = None) -> MixerParams:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path}: not a mixer parameter file")
    version, f_dim, h_dim, v_dim = struct.unpack("<HIII", data[4:18])
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    if vocab is not None and len(vocab) != v_dim:
        raise VocabMismatch(f"file expects |V|={v_dim}, vocabulary has {len(vocab)}")
    expected = param_count(f_dim, h_dim, v_dim)
    vec = np.frombuffer(data[18:], dtype="<f4").astype(np.float64)
    if vec.size != expected:
        raise ValueError(f"{path}: expected {expected} parameters, found {vec.size}")
    skeleton = init_mixer_params(f_dim, h_dim, _dummy_vocab(v_dim) if vocab is None else vocab)
    params = skeleton.with_vector(vec)
    return replace(params, vocab=vocab)


def _dummy_vocab(size: int) -> Vocabulary:
    chars = [chr(ord("a") + i) for i in range(size - 1)]
    return Vocabulary.from_characters(chars)
