import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cskit.errors import EmptyAudio
from cskit.segmenter import (
    Chunk,
    SegmenterConfig,
    frame_energies,
    read_wav,
    segment,
    segment_wav_to_manifest,
    write_wav,
)

RATE = 16000


def tone(duration_s, amplitude=0.5, freq=440.0):
    t = np.arange(int(duration_s * RATE)) / RATE
    return amplitude * np.sin(2 * np.pi * freq * t)


class TestFrameEnergies:
    def test_zero_floor(self):
        e = frame_energies(np.zeros(RATE), RATE, 30)
        assert np.all(e == -120.0)

    def test_full_scale(self):
        e = frame_energies(np.ones(RATE), RATE, 30)
        assert np.allclose(e, 0.0)

    def test_half_scale(self):
        e = frame_energies(np.full(RATE, 0.5), RATE, 30)
        assert np.allclose(e, 20 * np.log10(0.5))
        assert e[0] == pytest.approx(-6.02, abs=0.01)

    def test_partial_frame_discarded(self):
        frame = int(RATE * 0.03)
        e = frame_energies(np.ones(frame * 3 + 5), RATE, 30)
        assert len(e) == 3

    def test_empty_rejected(self):
        with pytest.raises(EmptyAudio):
            frame_energies(np.array([]), RATE, 30)


class TestSegment:
    def test_pure_silence(self):
        assert segment(np.zeros(5 * RATE), RATE) == []

    def test_single_tone(self):
        chunks = segment(np.full(5 * RATE, 0.5), RATE)
        assert len(chunks) == 1
        assert chunks[0].start_s == pytest.approx(0.0, abs=0.03)
        assert chunks[0].end_s == pytest.approx(5.0, abs=0.03)

    def test_tone_silence_tone(self):
        sig = np.concatenate([
            np.full(2 * RATE, 0.5),
            np.zeros(RATE),
            np.full(2 * RATE, 0.5),
        ])
        chunks = segment(sig, RATE)
        assert len(chunks) == 2
        assert chunks[0].start_s == pytest.approx(0.0, abs=0.03)
        assert chunks[0].end_s == pytest.approx(2.0, abs=0.03)
        assert chunks[1].start_s == pytest.approx(3.0, abs=0.03)
        assert chunks[1].end_s == pytest.approx(5.0, abs=0.03)

    def test_short_silence_bridged(self):
        # 60 ms dip < min_silence_ms keeps one chunk
        sig = np.concatenate([
            np.full(2 * RATE, 0.5),
            np.zeros(int(0.06 * RATE)),
            np.full(2 * RATE, 0.5),
        ])
        assert len(segment(sig, RATE)) == 1

    def test_short_blip_dropped(self):
        # a 300 ms blip alone cannot reach min_chunk_s
        sig = np.concatenate([np.zeros(2 * RATE), np.full(int(0.3 * RATE), 0.5), np.zeros(2 * RATE)])
        assert segment(sig, RATE) == []

    def test_long_chunk_split(self):
        cfg = SegmenterConfig(max_chunk_s=3.0, min_chunk_s=0.5)
        chunks = segment(np.full(8 * RATE, 0.5), RATE, cfg)
        assert len(chunks) >= 2
        for c in chunks:
            assert c.duration_s <= 3.0 + 1e-9

    def test_duration_band_and_order(self):
        rng = np.random.default_rng(0)
        sig = rng.standard_normal(10 * RATE) * (rng.random(10 * RATE) > 0.5)
        cfg = SegmenterConfig()
        chunks = segment(sig, RATE, cfg)
        for c in chunks:
            assert cfg.min_chunk_s - 1e-9 <= c.duration_s <= cfg.max_chunk_s + 1e-9
            assert 0 <= c.start_s < c.end_s <= 10.0 + 1e-9
        for a, b in zip(chunks, chunks[1:]):
            assert a.end_s <= b.start_s

    @given(st.floats(min_value=0.01, max_value=50.0))
    @settings(max_examples=20, deadline=None)
    def test_scaling_invariance(self, scale):
        sig = np.concatenate([
            tone(1.5), np.zeros(RATE), tone(1.5, amplitude=0.2),
        ])
        assert segment(sig, RATE) == segment(sig * scale, RATE)

    def test_determinism(self):
        rng = np.random.default_rng(7)
        sig = rng.standard_normal(6 * RATE)
        assert segment(sig, RATE) == segment(sig, RATE)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SegmenterConfig(min_chunk_s=5.0, max_chunk_s=2.0)


class TestWav:
    def test_roundtrip_and_manifest(self, tmp_path):
        path = tmp_path / "x.wav"
        sig = np.concatenate([np.full(2 * RATE, 0.5), np.zeros(RATE), np.full(2 * RATE, 0.5)])
        write_wav(path, sig, RATE)
        back, rate = read_wav(path)
        assert rate == RATE
        assert np.max(np.abs(back - sig)) < 1e-3

        utts = segment_wav_to_manifest(path)
        assert len(utts) == 2
        assert all(u.split == "unlabeled" and u.text == "" for u in utts)
        assert utts[0].id != utts[1].id

    def test_stereo_mixdown(self, tmp_path):
        import wave as wavemod

        path = tmp_path / "st.wav"
        left = (np.full(RATE, 0.4) * 32767).astype("<i2")
        right = (np.full(RATE, -0.4) * 32767).astype("<i2")
        inter = np.empty(2 * RATE, dtype="<i2")
        inter[0::2] = left
        inter[1::2] = right
        with wavemod.open(str(path), "wb") as wf:
            wf.setnchannels(2)
            wf.setsampwidth(2)
            wf.setframerate(RATE)
            wf.writeframes(inter.tobytes())
        mono, _ = read_wav(path)
        assert np.max(np.abs(mono)) < 1e-3
