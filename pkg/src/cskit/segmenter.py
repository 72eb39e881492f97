"""Energy-based voice-activity segmentation of long recordings.

Frames are classified speech/silence against a threshold relative to the
recording's peak frame energy; short dips inside speech are bridged, long
silences split, and the resulting chunks are forced into the configured
duration band (merging or dropping short ones, splitting long ones at
their quietest frame).
"""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Utterance
from .errors import EmptyAudio

ENERGY_FLOOR_DB = -120.0


@dataclass(frozen=True)
class SegmenterConfig:
    frame_ms: int = 30
    energy_threshold_db: float = -35.0  # relative to the peak frame
    min_silence_ms: int = 300
    min_chunk_s: float = 1.0
    max_chunk_s: float = 20.0
    hangover_frames: int = 3  # silence runs this short are bridged

    def __post_init__(self):
        if self.frame_ms <= 0 or self.min_silence_ms <= 0:
            raise ValueError("durations must be positive")
        if self.min_chunk_s <= 0 or self.min_chunk_s >= self.max_chunk_s:
            raise ValueError("need 0 < min_chunk_s < max_chunk_s")
        if self.hangover_frames < 0:
            raise ValueError("hangover_frames must be nonnegative")


@dataclass(frozen=True)
class Chunk:
    start_s: float
    end_s: float

    def __post_init__(self):
        if not 0 <= self.start_s < self.end_s:
            raise ValueError(f"bad chunk [{self.start_s}, {self.end_s}]")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


def frame_energies(
    samples: Sequence[float] | np.ndarray, sample_rate_hz: float, frame_ms: int = 30
) -> np.ndarray:
    """RMS energy in dB (re full scale) per complete frame.

    The trailing partial frame is discarded; silent frames are floored at
    -120 dB instead of -inf.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise EmptyAudio("no samples")
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    frame_len = int(round(sample_rate_hz * frame_ms / 1000.0))
    if frame_len <= 0:
        raise ValueError("frame shorter than one sample")
    n_frames = samples.size // frame_len
    if n_frames == 0:
        return np.empty(0, dtype=np.float64)
    frames = samples[: n_frames * frame_len].reshape(n_frames, frame_len)
    rms = np.sqrt(np.mean(frames * frames, axis=1))
    floor = 10.0 ** (ENERGY_FLOOR_DB / 20.0)
    return 20.0 * np.log10(np.maximum(rms, floor))


def _speech_mask(energies: np.ndarray, config: SegmenterConfig) -> np.ndarray:
    threshold = float(np.max(energies)) + config.energy_threshold_db
    # digital silence sits on the floor and is never speech, whatever the peak
    mask = (energies >= threshold) & (energies > ENERGY_FLOOR_DB)
    if config.hangover_frames > 0 and mask.any():
        active = np.flatnonzero(mask)
        for left, right in zip(active[:-1], active[1:]):
            if 0 < right - left - 1 <= config.hangover_frames:
                mask[left:right] = True
    return mask


def _split_oversized(start: int, end: int, energies: np.ndarray, max_frames: int) -> list[tuple[int, int]]:
    if end - start <= max_frames:
        return [(start, end)]
    # split at the quietest interior frame, keeping both halves nonempty
    interior = energies[start + 1 : end - 1]
    if interior.size == 0:
        cut = start + 1
    else:
        cut = start + 1 + int(np.argmin(interior))
    return _split_oversized(start, cut, energies, max_frames) + _split_oversized(
        cut, end, energies, max_frames
    )


def segment(
    samples: Sequence[float] | np.ndarray,
    sample_rate_hz: float,
    config: SegmenterConfig = SegmenterConfig(),
) -> list[Chunk]:
    """Chunk a recording into speech regions obeying the duration band."""
    energies = frame_energies(samples, sample_rate_hz, config.frame_ms)
    if energies.size == 0:
        return []
    frame_s = config.frame_ms / 1000.0
    duration_s = len(np.asarray(samples)) / sample_rate_hz

    mask = _speech_mask(energies, config)
    regions: list[tuple[int, int]] = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            regions.append((start, i))
            start = None
    if start is not None:
        regions.append((start, len(mask)))
    if not regions:
        return []

    # silences shorter than min_silence_ms do not split
    min_gap = max(1, int(math.ceil(config.min_silence_ms / config.frame_ms)))
    merged = [regions[0]]
    for s, e in regions[1:]:
        if s - merged[-1][1] < min_gap:
            merged[-1] = (merged[-1][0], e)
        else:
            merged.append((s, e))

    max_frames = max(1, int(config.max_chunk_s / frame_s))
    sized: list[tuple[int, int]] = []
    for s, e in merged:
        sized.extend(_split_oversized(s, e, energies, max_frames))

    # short chunks merge into the closer neighbor when the union stays
    # within max_chunk_s, otherwise they are dropped
    min_frames = int(math.ceil(config.min_chunk_s / frame_s))
    changed = True
    while changed:
        changed = False
        for i, (s, e) in enumerate(sized):
            if e - s >= min_frames:
                continue
            candidates = []
            if i > 0:
                gap = s - sized[i - 1][1]
                if e - sized[i - 1][0] <= max_frames:
                    candidates.append((gap, 0, i - 1))
            if i < len(sized) - 1:
                gap = sized[i + 1][0] - e
                if sized[i + 1][1] - s <= max_frames:
                    candidates.append((gap, 1, i + 1))
            if candidates:
                _, _, j = min(candidates)
                lo, hi = min(i, j), max(i, j)
                sized[lo:hi + 1] = [(sized[lo][0], sized[hi][1])]
            else:
                del sized[i]
            changed = True
            break

    chunks = []
    for s, e in sized:
        start_s = s * frame_s
        end_s = min(e * frame_s, duration_s)
        chunks.append(Chunk(start_s=start_s, end_s=end_s))
    return chunks


# --------------------------------------------------------------------------
# WAV plumbing
# --------------------------------------------------------------------------

def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Mono float64 samples in [-1, 1] plus the sample rate.

    16-bit PCM only; stereo is mixed down by averaging channels.
    """
    with wave.open(str(path), "rb") as wf:
        if wf.getsampwidth() != 2:
            raise ValueError(f"{path}: only 16-bit PCM WAV is supported")
        rate = wf.getframerate()
        channels = wf.getnchannels()
        raw = wf.readframes(wf.getnframes())
    data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if channels > 1:
        data = data.reshape(-1, channels).mean(axis=1)
    return data, rate


def write_wav(path: str | Path, samples: np.ndarray, sample_rate_hz: int) -> None:
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = (clipped * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate_hz)
        wf.writeframes(pcm.tobytes())


def segment_wav_to_manifest(
    wav_path: str | Path, config: SegmenterConfig = SegmenterConfig()
) -> list[Utterance]:
    """One unlabeled utterance per detected chunk."""
    samples, rate = read_wav(wav_path)
    stem = Path(wav_path).stem
    utterances = []
    for k, chunk in enumerate(segment(samples, rate, config)):
        utterances.append(
            Utterance(
                id=f"{stem}-{k:04d}",
                audio_path=str(wav_path),
                duration_s=round(chunk.duration_s, 3),
                text="",
                split="unlabeled",
            )
        )
    return utterances
