import math

import numpy as np
import pytest

from cskit.corpus import Posteriorgram, Vocabulary, make_posteriorgram
from cskit.ctc import ctc_loss
from cskit.errors import Diverged, FrameCountMismatch, ShapeMismatch
from cskit.mixer import (
    MixerParams,
    MixerTrainConfig,
    assemble_features,
    build_union,
    init_mixer_params,
    load_mixer,
    mixer_backward,
    mixer_forward,
    param_count,
    save_mixer,
    train_mixer,
)

VAB = Vocabulary.from_characters("ab")
VBC = Vocabulary.from_characters("bc")


def small_params(f=5, h=4, vocab=None, seed=0):
    vocab = vocab or Vocabulary.from_characters("abc")
    return init_mixer_params(f, h, vocab, seed=seed)


def rand_pgram(rng, vocab, t):
    return make_posteriorgram(vocab, rng.standard_normal((t, len(vocab))))


class TestUnion:
    def test_shared_symbol_maps_once(self):
        um = build_union([VAB, VBC])
        assert [s for s in um.union.symbols[1:]] == ["a", "b", "c"]
        b_from_first = um.index_maps[0][VAB.index("b")]
        b_from_second = um.index_maps[1][VBC.index("b")]
        assert b_from_first == b_from_second == um.union.index("b")

    def test_identical_vocabs(self):
        um = build_union([VAB, VAB])
        assert um.union == VAB
        assert um.index_maps[0] == tuple(range(len(VAB)))
        assert um.index_maps[0] == um.index_maps[1]

    def test_three_singletons(self):
        vs = [Vocabulary.from_characters(c) for c in "abc"]
        um = build_union(vs)
        assert len(um.union) == 4

    def test_permutation_invariant(self):
        assert build_union([VAB, VBC]).union == build_union([VBC, VAB]).union

    def test_blank_maps_to_blank(self):
        um = build_union([VAB, VBC])
        assert all(m[0] == 0 for m in um.index_maps)


class TestFeatures:
    def test_width_is_sum_of_vocab_sizes(self):
        rng = np.random.default_rng(0)
        vs = [Vocabulary.from_characters("ab"), Vocabulary.from_characters("abc"),
              Vocabulary.from_characters("abcd")]
        pgrams = [rand_pgram(rng, v, 6) for v in vs]
        feats = assemble_features(pgrams)
        assert feats.shape == (6, 3 + 4 + 5)

    def test_probability_domain(self):
        rng = np.random.default_rng(1)
        p = rand_pgram(rng, VAB, 4)
        feats = assemble_features([p])
        assert np.allclose(feats.sum(axis=1), 1.0)
        logfeats = assemble_features([p], log_domain=True)
        assert np.allclose(logfeats, p.frames)

    def test_frame_count_mismatch(self):
        rng = np.random.default_rng(2)
        with pytest.raises(FrameCountMismatch):
            assemble_features([rand_pgram(rng, VAB, 10), rand_pgram(rng, VBC, 11)])

    def test_encoder_feats_appended(self):
        rng = np.random.default_rng(3)
        p = rand_pgram(rng, VAB, 5)
        enc = rng.standard_normal((5, 8))
        feats = assemble_features([p], encoder_feats=enc)
        assert feats.shape == (5, 3 + 8)
        np.testing.assert_array_equal(feats[:, 3:], enc)

    def test_frame_rate_mismatch(self):
        rng = np.random.default_rng(4)
        a = rand_pgram(rng, VAB, 6)
        b = Posteriorgram(VBC, rand_pgram(rng, VBC, 6).frames, frame_rate_hz=50.0)
        with pytest.raises(FrameCountMismatch):
            assemble_features([a, b])


class TestForward:
    def test_zero_params_give_uniform(self):
        params = small_params()
        zeroed = params.with_vector(np.zeros(params.to_vector().shape))
        out = mixer_forward(zeroed, np.random.default_rng(0).random((7, 5)))
        assert np.allclose(out.frames, math.log(1.0 / 4))

    def test_output_shape_and_normalization(self):
        params = small_params()
        rng = np.random.default_rng(1)
        out = mixer_forward(params, rng.random((9, 5)))
        assert out.frames.shape == (9, 4)
        sums = np.log(np.sum(np.exp(out.frames), axis=1))
        assert np.max(np.abs(sums)) < 1e-6

    def test_bidirectional_context(self):
        params = small_params()
        rng = np.random.default_rng(2)
        x = rng.random((8, 5))
        y = x.copy()
        y[7] += 1.0  # perturb the last frame only
        a = mixer_forward(params, x).frames
        b = mixer_forward(params, y).frames
        assert not np.allclose(a[0], b[0])  # first frame sees the change

    def test_shape_mismatch(self):
        params = small_params(f=5)
        with pytest.raises(ShapeMismatch):
            mixer_forward(params, np.zeros((4, 6)))

    def test_param_count_formula(self):
        params = small_params(f=5, h=4)
        assert params.to_vector().size == param_count(5, 4, 4)

    def test_deterministic_init(self):
        a = small_params(seed=5).to_vector()
        b = small_params(seed=5).to_vector()
        assert np.array_equal(a, b)


class TestBackward:
    def test_zero_params_loss_matches_uniform_ctc(self):
        params = small_params()
        zeroed = params.with_vector(np.zeros(params.to_vector().shape))
        feats = np.random.default_rng(3).random((6, 5))
        target = [1, 2]
        loss, _ = mixer_backward(zeroed, feats, target)
        uniform = np.full((6, 4), math.log(1.0 / 4))
        expected, _ = ctc_loss(uniform, target)
        assert loss == pytest.approx(expected)

    def test_impossible_target(self):
        params = small_params()
        loss, grad = mixer_backward(params, np.zeros((1, 5)), [1, 1, 2])
        assert math.isinf(loss)
        assert np.all(grad == 0.0)

    def test_finite_difference_gradients(self):
        params = small_params(f=4, h=3, seed=7)
        rng = np.random.default_rng(7)
        feats = rng.random((6, 4))
        target = [1, 3, 2]
        loss, grad = mixer_backward(params, feats, target)
        assert math.isfinite(loss)

        theta = params.to_vector()
        eps = 1e-4
        picks = rng.choice(theta.size, size=50, replace=False)
        for idx in picks:
            plus = theta.copy()
            plus[idx] += eps
            minus = theta.copy()
            minus[idx] -= eps
            lp, _ = mixer_backward(params.with_vector(plus), feats, target)
            lm, _ = mixer_backward(params.with_vector(minus), feats, target)
            fd = (lp - lm) / (2 * eps)
            rel = abs(fd - grad[idx]) / max(abs(fd), abs(grad[idx]), 1e-4)
            assert rel <= 1e-3, f"param {idx}: fd={fd} analytic={grad[idx]}"


def identity_task(rng, vocab, n, t_per_symbol=3, length=3):
    """Features are noisy one-hot probabilities of the true symbols."""
    data = []
    v = len(vocab)
    for _ in range(n):
        target = list(rng.integers(1, v, size=length))
        frames = []
        for sym in target:
            for _ in range(t_per_symbol - 1):
                row = np.full(v, 0.05 / (v - 1))
                row[sym] = 0.95
                frames.append(row)
            blank = np.full(v, 0.05 / (v - 1))
            blank[0] = 0.95
            frames.append(blank)
        feats = np.array(frames)
        feats += rng.random(feats.shape) * 0.02
        data.append((feats, target))
    return data


class TestTraining:
    def test_loss_improves_on_identity_task(self):
        vocab = Vocabulary.from_characters("ab")
        rng = np.random.default_rng(0)
        train = identity_task(rng, vocab, 24)
        dev = identity_task(rng, vocab, 6)
        cfg = MixerTrainConfig(hidden_size=8, max_epochs=12, batch_size=6, seed=1)
        params, history = train_mixer(train, dev, vocab, cfg)
        best = min(h.dev_loss for h in history)
        assert best < history[0].dev_loss

    def test_zero_learning_rate_is_identity(self):
        vocab = Vocabulary.from_characters("ab")
        rng = np.random.default_rng(1)
        train = identity_task(rng, vocab, 8)
        cfg = MixerTrainConfig(hidden_size=4, max_epochs=7, learning_rate=0.0, seed=2)
        params, history = train_mixer(train, train, vocab, cfg)
        init = init_mixer_params(train[0][0].shape[1], 4, vocab, seed=2)
        assert np.array_equal(params.to_vector(), init.to_vector())
        assert len({h.train_loss for h in history[1:]}) == 1

    def test_same_seed_identical(self):
        vocab = Vocabulary.from_characters("ab")
        rng = np.random.default_rng(2)
        train = identity_task(rng, vocab, 10)
        dev = identity_task(rng, vocab, 4)
        cfg = MixerTrainConfig(hidden_size=4, max_epochs=3, seed=3)
        a, _ = train_mixer(train, dev, vocab, cfg)
        b, _ = train_mixer(train, dev, vocab, cfg)
        assert np.array_equal(a.to_vector(), b.to_vector())

    def test_impossible_target_diverges(self):
        vocab = Vocabulary.from_characters("ab")
        bad = [(np.zeros((1, 3)), [1, 1])]
        with pytest.raises(Diverged):
            train_mixer(bad, bad, vocab, MixerTrainConfig(hidden_size=4, max_epochs=1))


class TestDecoderIntegration:
    def test_forward_output_feeds_beam_search_unchanged(self):
        from cskit.ctc import DecoderConfig, greedy_decode, prefix_beam_search

        vocab = Vocabulary.from_characters("abc")
        params = small_params(f=5, h=4, vocab=vocab, seed=3)
        rng = np.random.default_rng(3)
        pgram = mixer_forward(params, rng.random((8, 5)))
        hyps = prefix_beam_search(pgram.frames, pgram.vocab, DecoderConfig(beam_width=4))
        assert isinstance(hyps[0].text, str)
        wide = prefix_beam_search(
            pgram.frames, pgram.vocab,
            DecoderConfig(beam_width=500, token_min_logp=-np.inf),
        )
        assert len(wide) == 1
        assert isinstance(greedy_decode(pgram.frames, pgram.vocab), str)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        vocab = Vocabulary.from_characters("abc")
        params = init_mixer_params(6, 5, vocab, seed=9)
        path = tmp_path / "m.bin"
        save_mixer(params, path)
        back = load_mixer(path, vocab=vocab)
        assert back.input_size == 6 and back.hidden_size == 5
        expected = params.to_vector().astype(np.float32).astype(np.float64)
        assert np.array_equal(back.to_vector(), expected)
        assert back.vocab == vocab

    def test_header(self, tmp_path):
        vocab = Vocabulary.from_characters("ab")
        params = init_mixer_params(4, 3, vocab, seed=0)
        path = tmp_path / "m.bin"
        save_mixer(params, path)
        data = path.read_bytes()
        assert data[:4] == b"MIXR"
        import struct

        version, f, h, v = struct.unpack("<HIII", data[4:18])
        assert (version, f, h, v) == (1, 4, 3, 3)
