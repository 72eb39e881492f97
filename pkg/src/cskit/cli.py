"""Single entry point multiplexing every toolkit operation.

Exit codes: 0 success, 1 domain error (printed with its error name),
2 usage error. Reporting commands take --format plain|records; records
mode emits line-delimited JSON for pipelines. CSKIT_CONFIG may point at
a JSON file with defaults for seed / log level / thread count.
"""

from __future__ import annotations

import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .corpus import (
    DROPPED,
    NormalizeConfig,
    Utterance,
    Vocabulary,
    build_vocab,
    corpus_stats,
    encode_transcript,
    language_stats,
    normalize_text,
    parse_tags,
    read_manifest,
    read_posteriorgram,
    strip_tags,
    write_manifest,
)
from .ctc import DecoderConfig, greedy_decode, prefix_beam_search
from .errors import ToolkitError
from .evalsvc import Campaign, items_from_manifest_and_hyps, serve
from .lm import KNConfig, perplexity, read_arpa, train_lm, write_arpa
from .metrics import cer as cer_fn
from .metrics import ser as ser_fn
from .metrics import wer as wer_fn
from .mixer import (
    MixerTrainConfig,
    assemble_features,
    build_union,
    load_mixer,
    mixer_forward,
    save_mixer,
    train_mixer,
)
from .segmenter import SegmenterConfig, segment_wav_to_manifest
from .selftrain import (
    LmTarget,
    MixerTarget,
    MixerTranscriber,
    PosteriorgramTranscriber,
    SelfTrainConfig,
    selftrain_round,
)

CONFIG_ENV = "CSKIT_CONFIG"


def _load_defaults() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path or not Path(path).exists():
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


@click.group()
@click.option("--seed", type=int, default=None, help="Seed for every seeded operation.")
@click.option("--log-level", default=None, help="Logging level (debug, info, warning).")
@click.option("--threads", type=int, default=None, help="Worker threads for batch decoding.")
@click.pass_context
def cli(ctx, seed, log_level, threads):
    """Code-switching ASR decoding and evaluation toolkit."""
    defaults = _load_defaults()
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed if seed is not None else defaults.get("seed", 0)
    ctx.obj["threads"] = threads if threads is not None else defaults.get("threads", 1)
    level = log_level or defaults.get("log_level", "warning")
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING))


# --------------------------------------------------------------------------
# corpus
# --------------------------------------------------------------------------

@cli.command()
@click.option("--in", "src", type=click.Path(exists=True), default=None, help="Input text (default stdin).")
@click.option("--out", type=click.Path(), default=None, help="Output file (default stdout).")
@click.option("--keep-numeric", is_flag=True, help="Keep digit-bearing sentences instead of dropping them.")
def normalize(src, out, keep_numeric):
    """Clean raw text: strip diacritics/punctuation, lowercase, drop digit sentences."""
    lines = Path(src).read_text(encoding="utf-8").splitlines() if src else sys.stdin.read().splitlines()
    config = NormalizeConfig(drop_numeric=not keep_numeric)
    cleaned = []
    for line in lines:
        result = normalize_text(line, config)
        if result is not DROPPED and result:
            cleaned.append(result)
    text = "\n".join(cleaned) + ("\n" if cleaned else "")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--in", "src", type=click.Path(exists=True), required=True)
@click.option("--format", "fmt", type=click.Choice(["plain", "records"]), default="plain")
def tags(src, fmt):
    """Parse code-switch tags; one span per output line."""
    for line in Path(src).read_text(encoding="utf-8").splitlines():
        spans = parse_tags(line)
        if fmt == "records":
            click.echo(json.dumps([{"lang": s.lang, "text": s.text} for s in spans], ensure_ascii=False))
        else:
            click.echo(" | ".join(f"{s.lang}:{s.text}" for s in spans))


@cli.command()
@click.option("--manifest", type=click.Path(exists=True), default=None, help="Tagged manifest for language stats.")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None, help="Text corpus for word counts.")
@click.option("--format", "fmt", type=click.Choice(["plain", "records"]), default="plain")
def stats(manifest, corpus_path, fmt):
    """Language-usage percentages of a manifest or word counts of a corpus."""
    if (manifest is None) == (corpus_path is None):
        raise click.UsageError("pass exactly one of --manifest / --corpus")
    if manifest:
        result = language_stats(read_manifest(manifest))
        if fmt == "records":
            click.echo(json.dumps(result))
        else:
            for lang in ("tn", "fr", "en"):
                click.echo(f"{lang} {result[lang]:.1f}%")
    else:
        lines = Path(corpus_path).read_text(encoding="utf-8").splitlines()
        cs = corpus_stats(lines)
        if fmt == "records":
            click.echo(json.dumps({"word_count": cs.word_count, "unique_word_count": cs.unique_word_count}))
        else:
            click.echo(f"words {cs.word_count}")
            click.echo(f"unique {cs.unique_word_count}")


@cli.command()
@click.option("--in", "wav", type=click.Path(exists=True), required=True, help="Input WAV (16-bit PCM).")
@click.option("--out", type=click.Path(), required=True, help="Output manifest.")
@click.option("--frame-ms", type=int, default=30, show_default=True)
@click.option("--threshold-db", type=float, default=-35.0, show_default=True)
@click.option("--min-silence-ms", type=int, default=300, show_default=True)
@click.option("--min-chunk-s", type=float, default=1.0, show_default=True)
@click.option("--max-chunk-s", type=float, default=20.0, show_default=True)
def segment(wav, out, frame_ms, threshold_db, min_silence_ms, min_chunk_s, max_chunk_s):
    """Voice-activity segmentation of a recording into chunk utterances."""
    config = SegmenterConfig(
        frame_ms=frame_ms,
        energy_threshold_db=threshold_db,
        min_silence_ms=min_silence_ms,
        min_chunk_s=min_chunk_s,
        max_chunk_s=max_chunk_s,
    )
    utterances = segment_wav_to_manifest(wav, config)
    write_manifest(utterances, out)
    click.echo(f"wrote {len(utterances)} chunks to {out}")


# --------------------------------------------------------------------------
# lm
# --------------------------------------------------------------------------

@cli.group()
def lm():
    """N-gram language model training and evaluation."""


@lm.command("train")
@click.option("--order", type=int, default=4, show_default=True)
@click.option("--in", "src", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--discount", type=float, default=None, help="Fixed discount (default: count-of-counts).")
def lm_train(order, src, out, discount):
    """Estimate an interpolated Kneser-Ney model, write ARPA."""
    corpus = [l for l in Path(src).read_text(encoding="utf-8").splitlines() if l.strip()]
    model = train_lm(corpus, KNConfig(order=order, discount=discount))
    write_arpa(model, out)
    click.echo(f"wrote order-{model.order} model to {out}")


@lm.command("ppl")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--in", "src", type=click.Path(exists=True), required=True)
@click.option("--format", "fmt", type=click.Choice(["plain", "records"]), default="plain")
def lm_ppl(model_path, src, fmt):
    """Perplexity of a text under an ARPA model."""
    model = read_arpa(Path(model_path))
    corpus = [l for l in Path(src).read_text(encoding="utf-8").splitlines() if l.strip()]
    value = perplexity(model, corpus)
    if fmt == "records":
        click.echo(json.dumps({"perplexity": value}))
    else:
        click.echo(f"PPL {value:.4f}")


# --------------------------------------------------------------------------
# decoding
# --------------------------------------------------------------------------

def _pgram_paths(source: str) -> list[Path]:
    path = Path(source)
    if path.is_dir():
        return sorted(path.glob("*.pgrm"))
    return [path]


def _decode_config(beam, alpha, beta, n_best=1) -> DecoderConfig:
    return DecoderConfig(beam_width=beam, lm_weight=alpha, word_bonus=beta, n_best=n_best)


@cli.command()
@click.option("--pgrm", required=True, help="Posteriorgram file or directory of *.pgrm.")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), required=True)
@click.option("--lm", "lm_path", type=click.Path(exists=True), default=None)
@click.option("--alpha", type=float, default=0.5, show_default=True, help="LM weight.")
@click.option("--beta", type=float, default=1.5, show_default=True, help="Word bonus.")
@click.option("--beam", type=int, default=100, show_default=True)
@click.option("--greedy", is_flag=True, help="Greedy decoding instead of beam search.")
@click.option("--out", type=click.Path(), required=True, help="Hypotheses file (id<TAB>text).")
@click.pass_context
def decode(ctx, pgrm, vocab_path, lm_path, alpha, beta, beam, greedy, out):
    """Decode posteriorgrams to text, optionally with LM shallow fusion."""
    vocab = Vocabulary.load(vocab_path)
    model = read_arpa(Path(lm_path)) if lm_path else None
    config = _decode_config(beam, alpha, beta)
    paths = _pgram_paths(pgrm)

    def run(path: Path) -> tuple[str, str]:
        pgram = read_posteriorgram(path, expected_vocab=vocab)
        if greedy:
            return path.stem, greedy_decode(pgram.frames, vocab)
        hyp = prefix_beam_search(pgram.frames, vocab, config, lm=model)[0]
        return path.stem, hyp.text

    workers = max(1, ctx.obj.get("threads", 1))
    if workers == 1:
        results = [run(p) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, paths))
    results.sort(key=lambda kv: kv[0])
    with open(out, "w", encoding="utf-8") as fh:
        for utt_id, text in results:
            fh.write(f"{utt_id}\t{text}\n")
    click.echo(f"decoded {len(results)} utterances to {out}")


# --------------------------------------------------------------------------
# mixer
# --------------------------------------------------------------------------

@cli.group()
def mixer():
    """Few-shot code-switching fusion of frozen source posteriorgrams."""


def _load_sources(dirs: list[str], utt_id: str, vocabs):
    pgrams = []
    for d, vocab in zip(dirs, vocabs):
        pgrams.append(read_posteriorgram(Path(d) / f"{utt_id}.pgrm", expected_vocab=vocab))
    return pgrams


def _source_vocabs(dirs: list[str]):
    vocabs = []
    for d in dirs:
        paths = sorted(Path(d).glob("*.pgrm"))
        if not paths:
            raise ToolkitError(f"no *.pgrm files in {d}")
        vocabs.append(read_posteriorgram(paths[0]).vocab)
    return vocabs


def _mixer_examples(manifest, dirs, vocabs, union):
    examples = []
    skipped = 0
    for utt in manifest:
        text = normalize_text(strip_tags(utt.text))
        if text is DROPPED or not text:
            skipped += 1
            continue
        pgrams = _load_sources(dirs, utt.id, vocabs)
        examples.append((assemble_features(pgrams), encode_transcript(text, union.union)))
    return examples, skipped


@mixer.command("train")
@click.option("--tn", required=True, help="Posteriorgram dir of the first source model.")
@click.option("--fr", required=True, help="Posteriorgram dir of the second source model.")
@click.option("--en", required=True, help="Posteriorgram dir of the third source model.")
@click.option("--manifest", type=click.Path(exists=True), required=True)
@click.option("--dev", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--hidden", type=int, default=128, show_default=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--batch-size", type=int, default=8, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.pass_context
def mixer_train(ctx, tn, fr, en, manifest, dev, out, hidden, epochs, batch_size, lr):
    """Train the mixer on code-switched data; source models stay frozen."""
    dirs = [tn, fr, en]
    vocabs = _source_vocabs(dirs)
    union = build_union(vocabs)
    train_ex, skipped_train = _mixer_examples(read_manifest(manifest), dirs, vocabs, union)
    dev_ex, skipped_dev = _mixer_examples(read_manifest(dev), dirs, vocabs, union)
    if skipped_train or skipped_dev:
        click.echo(f"skipped {skipped_train + skipped_dev} unusable transcripts", err=True)
    config = MixerTrainConfig(
        hidden_size=hidden, max_epochs=epochs, batch_size=batch_size,
        learning_rate=lr, seed=ctx.obj["seed"],
    )
    params, history = train_mixer(train_ex, dev_ex, union.union, config)
    save_mixer(params, out)
    best = min(h.dev_loss for h in history)
    click.echo(f"trained {len(history) - 1} epochs, best dev loss {best:.4f}, wrote {out}")


@mixer.command("decode")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--tn", required=True)
@click.option("--fr", required=True)
@click.option("--en", required=True)
@click.option("--manifest", type=click.Path(exists=True), required=True)
@click.option("--lm", "lm_path", type=click.Path(exists=True), default=None)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=1.5, show_default=True)
@click.option("--beam", type=int, default=100, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def mixer_decode(model_path, tn, fr, en, manifest, lm_path, alpha, beta, beam, out):
    """Fuse source posteriorgrams through the mixer and decode."""
    dirs = [tn, fr, en]
    vocabs = _source_vocabs(dirs)
    union = build_union(vocabs)
    params = load_mixer(model_path, vocab=union.union)
    model = read_arpa(Path(lm_path)) if lm_path else None
    config = _decode_config(beam, alpha, beta)
    with open(out, "w", encoding="utf-8") as fh:
        for utt in read_manifest(manifest):
            pgrams = _load_sources(dirs, utt.id, vocabs)
            fused = mixer_forward(params, assemble_features(pgrams),
                                  frame_rate_hz=pgrams[0].frame_rate_hz)
            if model is None:
                text = greedy_decode(fused.frames, union.union)
            else:
                text = prefix_beam_search(fused.frames, union.union, config, lm=model)[0].text
            fh.write(f"{utt.id}\t{text}\n")
    click.echo(f"wrote hypotheses to {out}")


# --------------------------------------------------------------------------
# scoring
# --------------------------------------------------------------------------

def _read_tsv(path: str) -> dict[str, str]:
    table = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ToolkitError(f"{path}:{line_no}: expected id<TAB>text")
        utt_id, text = line.split("\t", 1)
        table[utt_id] = text
    return table


@cli.command()
@click.option("--refs", type=click.Path(exists=True), required=True)
@click.option("--hyps", type=click.Path(exists=True), required=True)
@click.option("--metric", type=click.Choice(["wer", "cer", "ser"]), required=True)
@click.option("--format", "fmt", type=click.Choice(["plain", "records"]), default="plain")
def score(refs, hyps, metric, fmt):
    """WER/CER/SER of hypotheses against references (id<TAB>text files)."""
    ref_table = _read_tsv(refs)
    hyp_table = _read_tsv(hyps)
    if set(ref_table) != set(hyp_table):
        only_ref = sorted(set(ref_table) - set(hyp_table))[:5]
        only_hyp = sorted(set(hyp_table) - set(ref_table))[:5]
        raise ToolkitError(
            f"id sets differ; only in refs: {only_ref}, only in hyps: {only_hyp}"
        )
    ids = sorted(ref_table)
    pairs = ([ref_table[i] for i in ids], [hyp_table[i] for i in ids])
    value = {"wer": wer_fn, "cer": cer_fn, "ser": ser_fn}[metric](*pairs)
    if fmt == "records":
        click.echo(json.dumps({"metric": metric, "value": value, "utterances": len(ids)}))
    else:
        click.echo(f"{metric.upper()} {value:.2f}")


# --------------------------------------------------------------------------
# selftrain
# --------------------------------------------------------------------------

@cli.command()
@click.option("--labeled", type=click.Path(exists=True), required=True)
@click.option("--unlabeled", type=click.Path(exists=True), required=True)
@click.option("--target", type=click.Choice(["lm", "mixer"]), required=True)
@click.option("--mode", type=click.Choice(["scratch", "finetune"]), default="scratch", show_default=True)
@click.option("--threshold", type=float, default=-math.inf, help="Confidence threshold (default keep all).")
@click.option("--out", type=click.Path(), required=True)
@click.option("--report", "report_path", type=click.Path(), required=True)
@click.option("--dev", type=click.Path(exists=True), required=True,
              help="Dev corpus (lm target) or dev manifest (mixer target).")
@click.option("--pgrm", default=None, help="Posteriorgram dir for the lm transcriber.")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), default=None)
@click.option("--lm", "lm_path", type=click.Path(exists=True), default=None, help="Fusion LM for the transcriber.")
@click.option("--order", type=int, default=4, show_default=True)
@click.option("--tn", default=None, help="Source posteriorgram dir (mixer target).")
@click.option("--fr", default=None, help="Source posteriorgram dir (mixer target).")
@click.option("--en", default=None, help="Source posteriorgram dir (mixer target).")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None,
              help="Current mixer used for pseudo-labeling (mixer target).")
@click.option("--hidden", type=int, default=128, show_default=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.pass_context
def selftrain(ctx, labeled, unlabeled, target, mode, threshold, out, report_path, dev,
              pgrm, vocab_path, lm_path, order, tn, fr, en, model_path, hidden, epochs):
    """One pseudo-labeling round; retrains the chosen artifact."""
    st_config = SelfTrainConfig(
        confidence_threshold=threshold,
        retrain_mode="from_scratch" if mode == "scratch" else "fine_tune",
    )
    labeled_mf = read_manifest(labeled)
    unlabeled_mf = read_manifest(unlabeled)

    if target == "lm":
        if not pgrm or not vocab_path:
            raise click.UsageError("--target lm needs --pgrm and --vocab")
        vocab = Vocabulary.load(vocab_path)
        fusion = read_arpa(Path(lm_path)) if lm_path else None
        config = _decode_config(100, 0.5, 1.5)

        def decode_frames(frames):
            if fusion is None:
                return greedy_decode(frames, vocab)
            return prefix_beam_search(frames, vocab, config, lm=fusion)[0].text

        transcriber = PosteriorgramTranscriber(pgrm_dir=pgrm, vocab=vocab, decode=decode_frames)
        dev_corpus = [l for l in Path(dev).read_text(encoding="utf-8").splitlines() if l.strip()]
        lm_target = LmTarget(dev_corpus=dev_corpus, kn_config=KNConfig(order=order))
        artifact, report = selftrain_round(
            labeled_mf, unlabeled_mf, transcriber, lm_target, st_config, target_name=target,
        )
        write_arpa(artifact, out)
    else:
        if not (tn and fr and en and model_path):
            raise click.UsageError("--target mixer needs --tn/--fr/--en and --model")
        dirs = [tn, fr, en]
        vocabs = _source_vocabs(dirs)
        union = build_union(vocabs)
        current = load_mixer(model_path, vocab=union.union)
        dev_ex, _ = _mixer_examples(read_manifest(dev), dirs, vocabs, union)

        def featurize(utt):
            pgrams = _load_sources(dirs, utt.id, vocabs)
            text = normalize_text(strip_tags(utt.text))
            if text is DROPPED or not text:
                raise ToolkitError(f"{utt.id}: transcript unusable for training")
            return assemble_features(pgrams), encode_transcript(text, union.union)

        transcriber = MixerTranscriber(dirs=dirs, vocabs=vocabs, union=union, params=current)
        mixer_target = MixerTarget(
            featurize=featurize,
            dev_examples=dev_ex,
            vocab=union.union,
            train_config=MixerTrainConfig(hidden_size=hidden, max_epochs=epochs,
                                          seed=ctx.obj["seed"]),
            current=current,
        )
        artifact, report = selftrain_round(
            labeled_mf, unlabeled_mf, transcriber, mixer_target, st_config, target_name=target,
        )
        save_mixer(artifact, out)

    report.save(report_path)
    click.echo(
        f"kept {report.pseudo_kept}/{report.unlabeled} pseudo-labels; "
        f"{report.metric_name} {report.metric_before:.2f} -> {report.metric_after:.2f}"
    )


# --------------------------------------------------------------------------
# evalsvc
# --------------------------------------------------------------------------

@cli.group()
def evalsvc():
    """Two-annotator human evaluation service."""


@evalsvc.command("create")
@click.option("--items", "items_path", type=click.Path(exists=True), required=True, help="Manifest of test items.")
@click.option("--hyps", type=click.Path(exists=True), required=True, help="id<TAB>text transcripts to judge.")
@click.option("--evaluators", type=click.Path(exists=True), required=True, help="One evaluator id per line.")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def evalsvc_create(items_path, hyps, evaluators, seed, out):
    """Assign every item to two evaluators and persist the campaign."""
    manifest = read_manifest(items_path)
    hyp_table = _read_tsv(hyps)
    evaluator_ids = [l.strip() for l in Path(evaluators).read_text(encoding="utf-8").splitlines() if l.strip()]
    items = items_from_manifest_and_hyps(manifest, hyp_table)
    campaign = Campaign.create(out, items, evaluator_ids, seed)
    click.echo(f"campaign with {len(campaign.items)} items, {len(evaluator_ids)} evaluators at {out}")


@evalsvc.command("serve")
@click.option("--campaign", "campaign_dir", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, default=8723, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def evalsvc_serve(campaign_dir, port, host):
    """Serve the judgment API over HTTP (Ctrl-C to stop)."""
    campaign = Campaign.load(campaign_dir)
    httpd = serve(campaign, port=port, host=host)
    click.echo(f"serving campaign on http://{host}:{httpd.server_address[1]}")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        httpd.shutdown()


@evalsvc.command("report")
@click.option("--campaign", "campaign_dir", type=click.Path(exists=True), required=True)
@click.option("--format", "fmt", type=click.Choice(["plain", "records"]), default="plain")
def evalsvc_report(campaign_dir, fmt):
    """Human SER, agreement, and per-evaluator progress."""
    campaign = Campaign.load(campaign_dir)
    report = campaign.report()
    if fmt == "records":
        click.echo(campaign.report_json(), nl=False)
        return
    click.echo(f"items {report['completed_items']}/{report['total_items']} complete")
    if report["human_ser"] is None:
        click.echo("human SER: not available")
        click.echo("agreement: not available")
    else:
        click.echo(f"human SER {report['human_ser']:.1f}%")
        click.echo(f"agreement {report['agreement']:.1f}%")


# --------------------------------------------------------------------------
# vocab helper (plumbing shared by decode flows)
# --------------------------------------------------------------------------

@cli.command("build-vocab")
@click.option("--in", "sources", multiple=True, type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def build_vocab_cmd(sources, out):
    """Character vocabulary (blank first) from normalized corpora."""
    corpora = [Path(s).read_text(encoding="utf-8").splitlines() for s in sources]
    vocab = build_vocab(corpora)
    vocab.save(out)
    click.echo(f"wrote {len(vocab)} symbols to {out}")


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def dispatch(argv: list[str]) -> int:
    """Run one CLI invocation; returns the exit code instead of exiting."""
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except ToolkitError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        return 1
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
