"""Text normalization, language tags, vocabularies and file formats.

The module owns the data types that the rest of the toolkit exchanges:
character vocabularies, per-frame log-probability matrices (posteriorgrams),
utterance manifests, and their on-disk formats.
"""

from __future__ import annotations

import io
import json
import math
import re
import struct
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .errors import (
    BadMagic,
    EmptyCorpus,
    MalformedTag,
    ManifestError,
    OutOfVocabulary,
    TruncatedFile,
    VocabMismatch,
)

# Reserved non-printing sentinel for the CTC blank; serialized as "<blank>".
BLANK_SYMBOL = "\x00"
BLANK_TOKEN = "<blank>"

SPLITS = ("train", "dev", "test", "unlabeled")
LANGS = ("tn", "fr", "en")


class _Dropped:
    """Singleton returned by normalize_text for digit-bearing sentences."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DROPPED"

    def __bool__(self) -> bool:
        return False


DROPPED = _Dropped()


# --------------------------------------------------------------------------
# Normalization
# --------------------------------------------------------------------------

# Arabic harakat and related combining marks stripped during cleanup.
_DIACRITIC_RANGES = ((0x064B, 0x0652), (0x0670, 0x0670), (0x0640, 0x0640))

_DIGIT_RE = re.compile(r"[0-9٠-٩۰-۹]")


@dataclass(frozen=True)
class NormalizeConfig:
    """Switches for the text cleanup pipeline.

    drop_numeric: return DROPPED for sentences containing any digit
    (Western, Arabic-Indic or Extended Arabic-Indic). lowercase applies
    to all cased scripts; Arabic script is unaffected.
    """

    drop_numeric: bool = True
    lowercase: bool = True
    strip_diacritics: bool = True
    strip_punctuation: bool = True


def _is_diacritic(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _DIACRITIC_RANGES)


def normalize_text(raw: str, config: NormalizeConfig = NormalizeConfig()) -> str | _Dropped:
    """Clean one sentence for LM training and CTC targets.

    Removes Arabic diacritics and tatweel, punctuation, symbols and
    control/format characters, collapses whitespace, and lowercases.
    Returns DROPPED when the sentence contains a digit and
    ``config.drop_numeric`` is set. Total function: never raises on
    decoded text, and idempotent on retained sentences.
    """
    if config.drop_numeric and _DIGIT_RE.search(raw):
        return DROPPED

    out: list[str] = []
    for ch in raw:
        if config.strip_diacritics and _is_diacritic(ch):
            continue
        cat = unicodedata.category(ch)
        if ch.isspace():
            out.append(" ")
            continue
        # P = punctuation, S = symbols, C = control/format (e.g. ZWNJ, RLM).
        if config.strip_punctuation and cat[0] in "PSC":
            continue
        out.append(ch)

    text = "".join(out)
    if config.lowercase:
        text = text.lower()
    return " ".join(text.split())


# --------------------------------------------------------------------------
# Code-switch tags
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TaggedSpan:
    """Maximal run of words in one language; tn spans carry no markup."""

    lang: str
    text: str


_TAG_RE = re.compile(r"</?(fr|en)>")


def parse_tags(tagged: str) -> list[TaggedSpan]:
    """Split a transcript into language spans.

    Stretches outside markup become tn spans with their whitespace intact,
    so concatenating the span texts reproduces the untagged sentence.
    Raises MalformedTag (with the UTF-8 byte offset) on nested, crossed,
    unclosed or unopened tags.
    """
    spans: list[TaggedSpan] = []
    open_lang: str | None = None
    buf_start = 0
    pos = 0

    def byte_offset(char_index: int) -> int:
        return len(tagged[:char_index].encode("utf-8"))

    for m in _TAG_RE.finditer(tagged):
        tag = m.group(0)
        lang = m.group(1)
        closing = tag.startswith("</")
        text = tagged[pos:m.start()]
        if closing:
            if open_lang is None:
                raise MalformedTag(f"closing {tag} without opener", byte_offset(m.start()))
            if open_lang != lang:
                raise MalformedTag(
                    f"closing {tag} crosses open <{open_lang}>", byte_offset(m.start())
                )
            if text:
                spans.append(TaggedSpan(open_lang, text))
            open_lang = None
        else:
            if open_lang is not None:
                raise MalformedTag(f"nested {tag} inside <{open_lang}>", byte_offset(m.start()))
            if text:
                spans.append(TaggedSpan("tn", text))
            open_lang = lang
        pos = m.end()

    if open_lang is not None:
        raise MalformedTag(f"<{open_lang}> never closed", byte_offset(len(tagged)))
    tail = tagged[pos:]
    if tail:
        spans.append(TaggedSpan("tn", tail))
    return spans


def render_tags(spans: Sequence[TaggedSpan]) -> str:
    """Inverse of parse_tags: re-wrap fr/en spans in their tags."""
    parts = []
    for span in spans:
        if span.lang == "tn":
            parts.append(span.text)
        else:
            parts.append(f"<{span.lang}>{span.text}</{span.lang}>")
    return "".join(parts)


def strip_tags(tagged: str) -> str:
    """Plain character stream of a tagged transcript."""
    return "".join(span.text for span in parse_tags(tagged))


# --------------------------------------------------------------------------
# Manifests
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Utterance:
    """One dataset row: a chunk of audio with its (possibly empty) transcript."""

    id: str
    audio_path: str | None
    duration_s: float
    text: str
    split: str
    pseudo: bool = False

    def __post_init__(self):
        if not self.id:
            raise ManifestError("utterance id must be nonempty")
        if self.split not in SPLITS:
            raise ManifestError(f"unknown split {self.split!r} for {self.id}")
        if self.duration_s < 0:
            raise ManifestError(f"negative duration for {self.id}")
        if self.split == "unlabeled" and self.text:
            raise ManifestError(f"unlabeled utterance {self.id} carries text")


def write_manifest(utterances: Iterable[Utterance], path: str | Path) -> None:
    """One JSON record per line; pseudo flag only written when set."""
    with open(path, "w", encoding="utf-8") as fh:
        for utt in utterances:
            rec = {
                "id": utt.id,
                "audio_path": utt.audio_path,
                "duration_s": utt.duration_s,
                "text": utt.text,
                "split": utt.split,
            }
            if utt.pseudo:
                rec["pseudo"] = True
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_manifest(path: str | Path) -> list[Utterance]:
    utterances = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{line_no}: not a JSON record ({exc})") from None
            try:
                utt = Utterance(
                    id=rec["id"],
                    audio_path=rec.get("audio_path"),
                    duration_s=float(rec.get("duration_s", 0.0)),
                    text=rec.get("text", ""),
                    split=rec["split"],
                    pseudo=bool(rec.get("pseudo", False)),
                )
            except KeyError as exc:
                raise ManifestError(f"{path}:{line_no}: missing field {exc}") from None
            if utt.id in seen:
                raise ManifestError(f"{path}:{line_no}: duplicate id {utt.id!r}")
            seen.add(utt.id)
            utterances.append(utt)
    return utterances


# --------------------------------------------------------------------------
# Corpus statistics
# --------------------------------------------------------------------------

def language_stats(manifest: Sequence[Utterance]) -> dict[str, float]:
    """Word-count percentages per language over a manifest.

    Words are whitespace-delimited within each tagged span. Percentages
    cover exactly {tn, fr, en} and sum to 100 within float error.
    """
    counts = {lang: 0 for lang in LANGS}
    for utt in manifest:
        if not utt.text:
            continue
        for span in parse_tags(utt.text):
            counts[span.lang] += len(span.text.split())
    total = sum(counts.values())
    if total == 0:
        raise EmptyCorpus("manifest contains no words")
    return {lang: 100.0 * n / total for lang, n in counts.items()}


@dataclass(frozen=True)
class CorpusStats:
    word_count: int
    unique_word_count: int


def corpus_stats(lines: Iterable[str]) -> CorpusStats:
    """Whitespace-token counts over a normalized one-sentence-per-line corpus."""
    total = 0
    seen: set[str] = set()
    for line in lines:
        words = line.split()
        total += len(words)
        seen.update(words)
    return CorpusStats(word_count=total, unique_word_count=len(seen))


# --------------------------------------------------------------------------
# Vocabulary
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    """Ordered character set with the blank sentinel fixed at index 0."""

    symbols: tuple[str, ...]
    _index: dict[str, int] = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.symbols or self.symbols[0] != BLANK_SYMBOL:
            raise ValueError("symbols[0] must be the blank sentinel")
        rest = self.symbols[1:]
        if any(len(s) != 1 for s in rest):
            raise ValueError("symbols must be single characters")
        if len(set(rest)) != len(rest):
            raise ValueError("duplicate symbols")
        if list(rest) != sorted(rest):
            raise ValueError("symbols must be sorted by code point")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @classmethod
    def from_characters(cls, chars: Iterable[str]) -> "Vocabulary":
        distinct = sorted(set(chars) - {BLANK_SYMBOL})
        if not distinct:
            raise EmptyCorpus("no characters to build a vocabulary from")
        return cls(symbols=(BLANK_SYMBOL, *distinct))

    @property
    def blank_index(self) -> int:
        return 0

    @property
    def space_index(self) -> int | None:
        return self._index.get(" ")

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def index(self, ch: str) -> int:
        return self._index[ch]

    def serialized_symbols(self) -> list[str]:
        return [BLANK_TOKEN if s == BLANK_SYMBOL else s for s in self.symbols]

    def to_text(self) -> str:
        return "\n".join(self.serialized_symbols())

    @classmethod
    def from_text(cls, text: str) -> "Vocabulary":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines = lines[:-1]
        if not lines or lines[0] != BLANK_TOKEN:
            raise ValueError(f"vocabulary listing must start with {BLANK_TOKEN}")
        symbols = [BLANK_SYMBOL] + lines[1:]
        return cls(symbols=tuple(symbols))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def build_vocab(corpora: Iterable[Iterable[str]]) -> Vocabulary:
    """Blank plus every distinct character across all corpora, sorted.

    Deterministic for any ordering of the inputs.
    """
    chars: set[str] = set()
    for corpus in corpora:
        for line in corpus:
            chars.update(line)
    if not chars:
        raise EmptyCorpus("no characters in any corpus")
    return Vocabulary.from_characters(chars)


def encode_transcript(text: str, vocab: Vocabulary) -> list[int]:
    """Character ids for a normalized transcript; never emits blank."""
    bad = [(ch, i) for i, ch in enumerate(text) if ch not in vocab]
    if bad:
        raise OutOfVocabulary(bad)
    return [vocab.index(ch) for ch in text]


def decode_ids(ids: Sequence[int], vocab: Vocabulary) -> str:
    """Inverse of encode_transcript (blank ids are not allowed)."""
    return "".join(vocab.symbols[i] for i in ids)


# --------------------------------------------------------------------------
# Posteriorgrams
# --------------------------------------------------------------------------

LOGNORM_TOL = 1e-4

_MAGIC = b"PGRM"
_VERSION = 1


@dataclass(frozen=True)
class Posteriorgram:
    """T x V matrix of per-frame natural-log probabilities over a vocabulary."""

    vocab: Vocabulary
    frames: np.ndarray
    frame_rate_hz: float

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2 or frames.shape[1] != len(self.vocab):
            raise ValueError(
                f"frames must be T x {len(self.vocab)}, got {frames.shape}"
            )
        if self.frame_rate_hz <= 0:
            raise ValueError("frame_rate_hz must be positive")
        if frames.shape[0]:
            norms = logsumexp_rows(frames)
            worst = float(np.max(np.abs(norms)))
            if worst > LOGNORM_TOL:
                raise ValueError(f"frames are not log-normalized (|logsumexp|={worst:.2e})")

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])


def logsumexp_rows(mat: np.ndarray) -> np.ndarray:
    """Row-wise log(sum(exp(.))) without leaving log space."""
    peak = np.max(mat, axis=1, keepdims=True)
    return (peak + np.log(np.sum(np.exp(mat - peak), axis=1, keepdims=True))).ravel()


def write_posteriorgram(pgram: Posteriorgram, dest: str | Path | BinaryIO) -> None:
    """Binary layout: magic, u16 version, u32 V, u32 T, f32 frame rate,
    u32 vocab blob length, UTF-8 vocab blob, then T*V little-endian f32
    log-probabilities in frame-major order.
    """
    blob = pgram.vocab.to_text().encode("utf-8")
    t, v = pgram.frames.shape
    header = _MAGIC + struct.pack("<HIIfI", _VERSION, v, t, pgram.frame_rate_hz, len(blob))
    payload = pgram.frames.astype("<f4").tobytes(order="C")
    if hasattr(dest, "write"):
        dest.write(header + blob + payload)  # type: ignore[union-attr]
    else:
        with open(dest, "wb") as fh:
            fh.write(header + blob + payload)


def read_posteriorgram(
    src: str | Path | bytes | BinaryIO,
    expected_vocab: Vocabulary | None = None,
) -> Posteriorgram:
    if isinstance(src, (str, Path)):
        data = Path(src).read_bytes()
    elif isinstance(src, bytes):
        data = src
    else:
        data = src.read()

    stream = io.BytesIO(data)

    def take(n: int, what: str) -> bytes:
        chunk = stream.read(n)
        if len(chunk) != n:
            raise TruncatedFile(f"stream ended inside {what}")
        return chunk

    magic = take(4, "magic")
    if magic != _MAGIC:
        raise BadMagic(f"expected {_MAGIC!r}, found {magic!r}")
    version, v, t, rate, blob_len = struct.unpack("<HIIfI", take(18, "header"))
    if version != _VERSION:
        raise BadMagic(f"unsupported version {version}")
    vocab = Vocabulary.from_text(take(blob_len, "vocabulary blob").decode("utf-8"))
    if len(vocab) != v:
        raise VocabMismatch(f"header says V={v} but blob holds {len(vocab)} symbols")
    if expected_vocab is not None and vocab != expected_vocab:
        raise VocabMismatch("stored vocabulary differs from the expected one")
    raw = take(4 * t * v, "frame payload")
    frames = np.frombuffer(raw, dtype="<f4").reshape(t, v).astype(np.float64)
    return Posteriorgram(vocab=vocab, frames=frames, frame_rate_hz=rate)


def make_posteriorgram(
    vocab: Vocabulary, frames: np.ndarray, frame_rate_hz: float = 100.0
) -> Posteriorgram:
    """Convenience constructor normalizing rows exactly before wrapping."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape[0]:
        frames = frames - logsumexp_rows(frames)[:, None]
    return Posteriorgram(vocab=vocab, frames=frames, frame_rate_hz=frame_rate_hz)


def as_storage_precision(pgram: Posteriorgram) -> Posteriorgram:
    """Round frames to the 32-bit precision used on disk, renormalizing not at all.

    Useful in tests asserting exact write/read equality.
    """
    return replace(pgram, frames=pgram.frames.astype(np.float32).astype(np.float64))


__all__ = [
    "BLANK_SYMBOL",
    "BLANK_TOKEN",
    "DROPPED",
    "LANGS",
    "SPLITS",
    "CorpusStats",
    "NormalizeConfig",
    "Posteriorgram",
    "TaggedSpan",
    "Utterance",
    "Vocabulary",
    "build_vocab",
    "corpus_stats",
    "decode_ids",
    "encode_transcript",
    "language_stats",
    "logsumexp_rows",
    "make_posteriorgram",
    "normalize_text",
    "parse_tags",
    "read_manifest",
    "read_posteriorgram",
    "render_tags",
    "strip_tags",
    "write_manifest",
    "write_posteriorgram",
    "as_storage_precision",
]
