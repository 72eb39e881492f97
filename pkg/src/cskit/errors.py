"""Exception hierarchy shared across the toolkit.

Every domain error derives from ToolkitError so the CLI can catch one type
and map it to exit code 1 while genuine bugs still propagate.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all domain errors raised by this package."""


# --- corpus ---------------------------------------------------------------

class MalformedTag(ToolkitError):
    """Language tags are unclosed, crossed, nested or mismatched."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class EmptyCorpus(ToolkitError):
    """No usable tokens/characters were found in the input corpus."""


class OutOfVocabulary(ToolkitError):
    """Transcript contains characters absent from the vocabulary."""

    def __init__(self, offending: list[tuple[str, int]]):
        detail = ", ".join(f"{ch!r} at {pos}" for ch, pos in offending)
        super().__init__(f"characters not in vocabulary: {detail}")
        self.offending = offending


class BadMagic(ToolkitError):
    """Binary stream does not start with the expected magic bytes."""


class TruncatedFile(ToolkitError):
    """Binary stream ended before the declared payload was complete."""


class VocabMismatch(ToolkitError):
    """Stored vocabulary differs from the caller-supplied expectation."""


class ManifestError(ToolkitError):
    """Manifest line is not a valid utterance record."""


# --- segmenter ------------------------------------------------------------

class EmptyAudio(ToolkitError):
    """Audio input contains no samples."""


# --- lm -------------------------------------------------------------------

class DegenerateCountsWarning(UserWarning):
    """Corpus has a single word type; model falls back to fixed discounts."""


class ArpaSyntax(ToolkitError):
    """ARPA text is malformed."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class CountMismatch(ToolkitError):
    """Declared n-gram counts disagree with the entries actually present."""


# --- ctc ------------------------------------------------------------------

class BlankInTarget(ToolkitError):
    """CTC target sequence contains the blank id."""


class VocabOverflow(ToolkitError):
    """CTC target id is outside the posteriorgram vocabulary."""


class NoSpaceSymbol(ToolkitError):
    """LM fusion requested but the vocabulary has no space symbol."""


# --- mixer ----------------------------------------------------------------

class FrameCountMismatch(ToolkitError):
    """Inputs to feature assembly disagree on the number of frames."""


class ShapeMismatch(ToolkitError):
    """Feature width does not match the mixer parameters."""


class Diverged(ToolkitError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


# --- metrics --------------------------------------------------------------

class EmptyReferenceCorpus(ToolkitError):
    """Pooled reference length is zero; error rates are undefined."""


class IncompleteJudgments(ToolkitError):
    """Items lack the two judgments required by the protocol."""

    def __init__(self, items: list[str]):
        super().__init__(f"items without exactly two judgments: {sorted(items)}")
        self.items = sorted(items)


# --- selftrain ------------------------------------------------------------

class DuplicateId(ToolkitError):
    """Two manifests share utterance ids and cannot be merged."""


class TranscriberFailure(ToolkitError):
    """The transcriber failed on one item."""


# --- evalsvc --------------------------------------------------------------

class TooFewEvaluators(ToolkitError):
    """A campaign needs at least two evaluators."""


class UnknownEvaluator(ToolkitError):
    """Evaluator id is not part of the campaign."""


class NotAssigned(ToolkitError):
    """The (item, evaluator) pair is not in the assignment."""


class AlreadyJudged(ToolkitError):
    """A conflicting judgment already exists for this (item, evaluator)."""
