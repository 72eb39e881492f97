"""Word-level n-gram language model with interpolated Kneser-Ney smoothing.

Counting, estimation, backoff scoring, perplexity, and ARPA text
serialization. Probabilities live in log10 internally (the ARPA
convention) and are converted to natural log at the scoring boundary.

Estimation uses one absolute discount per order. Lower orders are
estimated from continuation counts (number of distinct left contexts),
except for n-grams starting with <s>, which can never be preceded and
keep their raw counts. The unigram level interpolates into <unk>: the
discounted leftover mass of the unigram distribution is assigned to the
unknown token, so scoring is total over open vocabulary.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ArpaSyntax, CountMismatch, DegenerateCountsWarning, EmptyCorpus

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

LN10 = math.log(10.0)

Gram = tuple[str, ...]


# --------------------------------------------------------------------------
# Counting
# --------------------------------------------------------------------------

@dataclass
class NGramCounts:
    """Raw k-gram counts for k = 1..order over <s>-padded sentences."""

    order: int
    raw: dict[int, Counter]
    sentence_count: int

    def continuation(self, k: int) -> Counter:
        """Distinct-left-context counts for k-grams (needs raw (k+1)-grams)."""
        if k >= self.order:
            raise ValueError(f"no order-{k + 1} counts to derive continuations from")
        left: dict[Gram, set[str]] = {}
        for gram in self.raw[k + 1]:
            left.setdefault(gram[1:], set()).add(gram[0])
        return Counter({g: len(v) for g, v in left.items()})

    def word_types(self) -> set[str]:
        return {g[0] for g in self.raw[1]} - {BOS, EOS}


def count_ngrams(corpus: Iterable[str], order: int) -> NGramCounts:
    """Exact n-gram counts up to ``order``, one sentence per line.

    Sentences are padded with a single <s> and a terminal </s>; both
    markers are counted like ordinary tokens.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    raw: dict[int, Counter] = {k: Counter() for k in range(1, order + 1)}
    sentences = 0
    for line in corpus:
        tokens = [BOS, *line.split(), EOS]
        sentences += 1
        for k in range(1, order + 1):
            for i in range(len(tokens) - k + 1):
                raw[k][tuple(tokens[i:i + k])] += 1
    if sentences == 0:
        raise EmptyCorpus("no sentences to count")
    return NGramCounts(order=order, raw=raw, sentence_count=sentences)


# --------------------------------------------------------------------------
# Model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KNConfig:
    order: int = 4
    discount: float | None = None  # None: count-of-counts n1/(n1 + 2*n2) per order
    fallback_discount: float = 0.75  # used when n1 or n2 is zero
    min_count: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.discount is not None and not 0 < self.discount < 1:
            raise ValueError("discount must be in (0, 1)")
        if not 0 < self.fallback_discount < 1:
            raise ValueError("fallback_discount must be in (0, 1)")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


@dataclass(frozen=True)
class NGramModel:
    """Backoff tables: k-gram -> (log10 prob, log10 backoff weight or None)."""

    order: int
    tables: tuple[dict[Gram, tuple[float, float | None]], ...]
    vocab: frozenset[str] = field(compare=False)

    def table(self, k: int) -> dict[Gram, tuple[float, float | None]]:
        return self.tables[k - 1]


def _discount_for(values: Iterable[int], config: KNConfig) -> float:
    if config.discount is not None:
        return config.discount
    cc = Counter(values)
    n1, n2 = cc[1], cc[2]
    if n1 == 0 or n2 == 0:
        return config.fallback_discount
    return n1 / (n1 + 2.0 * n2)


def estimate_kn(counts: NGramCounts, config: KNConfig | None = None) -> NGramModel:
    """Interpolated Kneser-Ney estimate in ARPA backoff form.

    Stored probabilities already include the interpolated lower-order
    mass; the backoff weight of a context h is its leftover factor
    D * T(h) / total(h), which makes every context distribution sum to
    one over the full vocabulary including <unk>.
    """
    config = config or KNConfig()
    if config.order > counts.order:
        raise ValueError(f"counts only go up to order {counts.order}")
    order = config.order

    if len(counts.word_types()) <= 1:
        warnings.warn(
            "corpus has at most one word type; discounts fall back to the fixed constant",
            DegenerateCountsWarning,
            stacklevel=2,
        )

    # usage counts per order: raw at the top, continuation below except <s>-initial
    usage: dict[int, Counter] = {}
    for k in range(1, order + 1):
        if k == order:
            table = Counter(counts.raw[k])
            if config.min_count > 1 and k > 1:
                table = Counter({g: c for g, c in table.items() if c >= config.min_count})
        else:
            cont = counts.continuation(k)
            table = Counter()
            for gram, raw_count in counts.raw[k].items():
                table[gram] = raw_count if gram[0] == BOS else cont[gram]
        usage[k] = table

    discounts = {k: _discount_for(usage[k].values(), config) for k in range(1, order + 1)}

    probs: dict[int, dict[Gram, float]] = {k: {} for k in range(1, order + 1)}
    bows: dict[Gram, float] = {}

    # unigrams: leftover discount mass goes to <unk>
    uni = usage[1]
    total = sum(uni.values())
    d1 = discounts[1]
    leftover = d1 * len(uni) / total
    for gram, c in uni.items():
        probs[1][gram] = (c - d1) / total
    probs[1][(UNK,)] = probs[1].get((UNK,), 0.0) + leftover

    for k in range(2, order + 1):
        dk = discounts[k]
        by_context: dict[Gram, list[Gram]] = {}
        for gram in usage[k]:
            by_context.setdefault(gram[:-1], []).append(gram)
        for context, grams in by_context.items():
            ctx_total = sum(usage[k][g] for g in grams)
            gamma = dk * len(grams) / ctx_total
            for gram in grams:
                lower = probs[k - 1][gram[1:]]
                probs[k][gram] = (usage[k][gram] - dk) / ctx_total + gamma * lower
            # the context is always a stored (k-1)-gram; it carries the weight
            bows[context] = gamma

    tables: list[dict[Gram, tuple[float, float | None]]] = [dict() for _ in range(order)]
    for k in range(1, order + 1):
        for gram, p in probs[k].items():
            bow = math.log10(bows[gram]) if k < order and gram in bows else None
            tables[k - 1][gram] = (math.log10(p), bow)

    vocab = frozenset(g[0] for g in tables[0]) | {UNK, BOS, EOS}
    return NGramModel(order=order, tables=tuple(tables), vocab=vocab)


def score_word(model: NGramModel, word: str, context: Sequence[str] = ()) -> float:
    """Natural-log probability of ``word`` after ``context`` (backoff chain)."""
    return LN10 * log10_word(model, word, context)


def log10_word(model: NGramModel, word: str, context: Sequence[str] = ()) -> float:
    w = word if word in model.vocab else UNK
    ctx = tuple(t if t in model.vocab else UNK for t in context)
    if len(ctx) > model.order - 1:
        ctx = ctx[len(ctx) - (model.order - 1):]
    acc = 0.0
    while True:
        entry = model.table(len(ctx) + 1).get(ctx + (w,))
        if entry is not None:
            return acc + entry[0]
        if not ctx:
            return acc + model.table(1)[(UNK,)][0]
        bow_entry = model.table(len(ctx)).get(ctx)
        if bow_entry is not None and bow_entry[1] is not None:
            acc += bow_entry[1]
        ctx = ctx[1:]


def score_sentence(model: NGramModel, words: Sequence[str]) -> float:
    """Natural-log probability of the sentence including the terminal </s>."""
    total = 0.0
    context: tuple[str, ...] = (BOS,)
    for w in [*words, EOS]:
        total += score_word(model, w, context)
        context += (w,)
    return total


def perplexity(model: NGramModel, corpus: Iterable[str]) -> float:
    """exp(-mean log-likelihood); tokens count </s> but not <s>."""
    total = 0.0
    tokens = 0
    for line in corpus:
        words = line.split()
        total += score_sentence(model, words)
        tokens += len(words) + 1
    if tokens == 0:
        raise EmptyCorpus("no tokens to evaluate")
    return math.exp(-total / tokens)


def train_lm(corpus: Iterable[str], config: KNConfig | None = None) -> NGramModel:
    """Count + estimate in one step."""
    config = config or KNConfig()
    return estimate_kn(count_ngrams(corpus, config.order), config)


# --------------------------------------------------------------------------
# ARPA serialization
# --------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x + 0.0:.7f}"


def write_arpa(model: NGramModel, dest: str | Path | None = None) -> str:
    """Canonical ARPA text: sorted entries, tab-separated fields."""
    lines = ["\\data\\"]
    for k in range(1, model.order + 1):
        lines.append(f"ngram {k}={len(model.table(k))}")
    for k in range(1, model.order + 1):
        lines.append("")
        lines.append(f"\\{k}-grams:")
        for gram in sorted(model.table(k)):
            prob, bow = model.table(k)[gram]
            entry = f"{_fmt(prob)}\t{' '.join(gram)}"
            if bow is not None:
                entry += f"\t{_fmt(bow)}"
            lines.append(entry)
    lines.append("")
    lines.append("\\end\\")
    text = "\n".join(lines) + "\n"
    if dest is not None:
        Path(dest).write_text(text, encoding="utf-8")
    return text


def read_arpa(src: str | Path) -> NGramModel:
    """Parse ARPA text (path or literal text containing a \\data\\ header)."""
    if isinstance(src, Path) or "\\data\\" not in str(src):
        text = Path(src).read_text(encoding="utf-8")
    else:
        text = str(src)
    lines = text.split("\n")

    def syntax(line_no: int, reason: str) -> ArpaSyntax:
        return ArpaSyntax(line_no, reason)

    i = 0
    while i < len(lines) and lines[i].strip() == "":
        i += 1
    if i >= len(lines) or lines[i].strip() != "\\data\\":
        raise syntax(i + 1, "expected \\data\\ header")
    i += 1
    declared: dict[int, int] = {}
    while i < len(lines) and lines[i].strip():
        line = lines[i].strip()
        if not line.startswith("ngram "):
            raise syntax(i + 1, f"expected 'ngram k=count', got {line!r}")
        try:
            k_str, count_str = line[len("ngram "):].split("=")
            declared[int(k_str)] = int(count_str)
        except ValueError:
            raise syntax(i + 1, f"bad ngram declaration {line!r}") from None
        i += 1
    if not declared or sorted(declared) != list(range(1, max(declared) + 1)):
        raise syntax(i, "ngram declarations must cover orders 1..N")
    order = max(declared)

    tables: list[dict[Gram, tuple[float, float | None]]] = [dict() for _ in range(order)]
    saw_end = False
    expected_k = 1
    while i < len(lines):
        line = lines[i].strip()
        if line == "":
            i += 1
            continue
        if line == "\\end\\":
            saw_end = True
            i += 1
            break
        if line.endswith("-grams:") and line.startswith("\\"):
            try:
                k = int(line[1:-len("-grams:")])
            except ValueError:
                raise syntax(i + 1, f"bad section header {line!r}") from None
            if k != expected_k:
                raise syntax(i + 1, f"expected \\{expected_k}-grams: section")
            i += 1
            while i < len(lines) and lines[i].strip() not in ("",):
                row = lines[i].rstrip("\n")
                if row.startswith("\\"):
                    break
                parts = row.split("\t")
                if len(parts) not in (2, 3):
                    raise syntax(i + 1, "entries need 2 or 3 tab-separated fields")
                try:
                    prob = float(parts[0])
                    bow = float(parts[2]) if len(parts) == 3 else None
                except ValueError:
                    raise syntax(i + 1, "non-numeric probability or backoff") from None
                gram = tuple(parts[1].split(" "))
                if len(gram) != k or not all(gram):
                    raise syntax(i + 1, f"expected {k} tokens, got {parts[1]!r}")
                if gram in tables[k - 1]:
                    raise syntax(i + 1, f"duplicate {k}-gram {parts[1]!r}")
                tables[k - 1][gram] = (prob, bow)
                i += 1
            expected_k += 1
        else:
            raise syntax(i + 1, f"unexpected line {line!r}")
    if not saw_end:
        raise ArpaSyntax(len(lines), "missing \\end\\ terminator")
    if expected_k != order + 1:
        raise ArpaSyntax(len(lines), f"missing \\{expected_k}-grams: section")
    for k in range(1, order + 1):
        if len(tables[k - 1]) != declared[k]:
            raise CountMismatch(
                f"order {k}: declared {declared[k]} entries, found {len(tables[k - 1])}"
            )

    vocab = frozenset(g[0] for g in tables[0]) | {UNK, BOS, EOS}
    return NGramModel(order=order, tables=tuple(tables), vocab=vocab)
