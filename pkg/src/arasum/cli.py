"""Command-line surface for the pipeline.

Exit codes: 0 success, 2 config/usage error, 3 data error, 4 numerical
failure.  Every run writes a manifest JSON next to its outputs with
the effective configuration and its hash, so a run is reproducible
from the manifest alone.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import data as data_mod
from . import metrics as metrics_mod
from . import optim as optim_mod
from . import tokenizer as tok_mod
from .decode import BeamConfig, beam_search, transformer_scorer
from .errors import ArasumError, ConfigError, DataError, NonFiniteGradient
from .model import ModelConfig, load_checkpoint
from .noising import NoiseConfig
from .textnorm import NormRules, normalize_eval

VERSION = "0.1.0"


def _config_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, ensure_ascii=False).encode()
    return hashlib.sha256(blob).hexdigest()


def _write_manifest(out_dir, command, config, config_paths, seed, started):
    os.makedirs(out_dir, exist_ok=True)
    manifest = {
        "command": command,
        "config_paths": config_paths,
        "config": config,
        "config_hash": _config_hash(config),
        "seed": seed,
        "started": started,
        "ended": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "version": VERSION,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, ensure_ascii=False)


def _load_config(path, overrides):
    """Read the JSON config file and apply flag overrides per section."""
    cfg = {"model": {}, "train": {}, "noise": {}}
    if path:
        with open(path, encoding="utf-8") as f:
            loaded = json.load(f)
        for section in cfg:
            cfg[section].update(loaded.get(section, {}))
    for section, key, value in overrides:
        if value is not None:
            cfg[section][key] = value
    return cfg


def _read_lines(path):
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f]


def cmd_normalize(args):
    lines = _read_lines(args.input) if args.input else sys.stdin.read().splitlines()
    out = sys.stdout if not args.out else open(args.out, "w", encoding="utf-8")
    for line in lines:
        out.write(normalize_eval(line, NormRules()) + "\n")
    if args.out:
        out.close()
    return 0


def cmd_train_tokenizer(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    corpus = _read_lines(args.corpus)
    v = tok_mod.train_vocab(corpus, args.vocab_size, args.coverage)
    tok_mod.save_vocab(v, args.out)
    _write_manifest(os.path.dirname(os.path.abspath(args.out)), "train-tokenizer",
                    {"vocab_size": args.vocab_size, "coverage": args.coverage},
                    [args.corpus], None, started)
    return 0


def _build_configs(args, vocab_size):
    cfg = _load_config(args.config, [
        ("train", "seed", args.seed),
        ("train", "epochs", args.epochs),
        ("train", "total_steps", args.total_steps),
        ("train", "batch_size", args.batch_size),
        ("train", "peak_lr", args.peak_lr),
        ("train", "deterministic", True if args.deterministic else None),
        ("noise", "seed", args.seed),
    ])
    cfg["model"].setdefault("vocab_size", vocab_size)
    try:
        mcfg = ModelConfig(**cfg["model"])
        ncfg = NoiseConfig(**cfg["noise"])
    except TypeError as e:
        raise ConfigError(str(e))
    return cfg, mcfg, ncfg


def _train_cfg(cfg, finetune=False):
    try:
        if finetune:
            return optim_mod.finetune_defaults(**cfg["train"])
        return optim_mod.TrainConfig(**cfg["train"])
    except TypeError as e:
        raise ConfigError(str(e))


def cmd_pretrain(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    v = tok_mod.load_vocab(args.vocab)
    corpus = _read_lines(args.corpus)
    cfg, mcfg, ncfg = _build_configs(args, len(v))
    tcfg = _train_cfg(cfg)
    ckpt, _, _ = optim_mod.pretrain(corpus, v, mcfg, tcfg, ncfg, args.out,
                                    resume=args.resume)
    cfg["train"] = asdict(tcfg)
    _write_manifest(args.out, "pretrain", cfg, [args.config, args.corpus,
                    args.vocab], tcfg.seed, started)
    print(ckpt)
    return 0


def cmd_finetune(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    v = tok_mod.load_vocab(args.vocab)
    examples = list(data_mod.load_jsonl(args.data))
    pairs = [(ex.document, ex.summary) for ex in examples]
    cfg, mcfg, _ = _build_configs(args, len(v))
    tcfg = _train_cfg(cfg, finetune=True)
    ckpt, _, _ = optim_mod.finetune(pairs, v, mcfg, tcfg, args.out,
                                    init_checkpoint=args.init,
                                    resume=args.resume)
    cfg["train"] = asdict(tcfg)
    _write_manifest(args.out, "finetune", cfg, [args.config, args.data,
                    args.vocab], tcfg.seed, started)
    print(ckpt)
    return 0


def cmd_generate(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    v = tok_mod.load_vocab(args.vocab)
    mcfg, params, _, _, _ = load_checkpoint(args.checkpoint)
    bcfg = BeamConfig(beam_size=args.beam, max_length=args.max_length,
                      min_length=args.min_length,
                      length_penalty=args.length_penalty)
    examples = list(data_mod.load_jsonl(args.data))
    os.makedirs(os.path.dirname(os.path.abspath(args.out)) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as f:
        for ex in examples:
            src = tok_mod.encode(v, ex.document, kind="source")
            scorer = transformer_scorer(params, mcfg, src)
            hyp, score = beam_search(scorer, bcfg)
            text = tok_mod.decode(v, hyp)
            f.write(json.dumps({"id": ex.id, "hypothesis": text,
                                "score": score}, ensure_ascii=False) + "\n")
    _write_manifest(os.path.dirname(os.path.abspath(args.out)), "generate",
                    {"beam": args.beam, "max_length": args.max_length,
                     "min_length": args.min_length,
                     "length_penalty": args.length_penalty},
                    [args.checkpoint, args.data, args.vocab], None, started)
    return 0


def _load_texts(path, field):
    """Text file (one item per line) or generation/reference JSONL."""
    lines = _read_lines(path)
    if lines and lines[0].lstrip().startswith("{"):
        return [json.loads(l)[field] for l in lines if l.strip()]
    return lines


def cmd_evaluate(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    hyps = _load_texts(args.hyp, "hypothesis")
    refs = _load_texts(args.ref, "summary")
    _, means = metrics_mod.evaluate_run(hyps, refs)
    row = {k: 100.0 * v for k, v in means.items()}
    csv_line = (f"{args.dataset},{args.model},"
                f"{row['R1']:.1f},{row['R2']:.1f},{row['RL']:.1f}")
    print("dataset,model,R1,R2,RL")
    print(csv_line)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write("dataset,model,R1,R2,RL\n" + csv_line + "\n")
        with open(args.out + ".json", "w", encoding="utf-8") as f:
            json.dump({"dataset": args.dataset, "model": args.model,
                       "scores": row}, f, indent=2)
        _write_manifest(os.path.dirname(os.path.abspath(args.out)), "evaluate",
                        {"dataset": args.dataset, "model": args.model},
                        [args.hyp, args.ref], None, started)
    return 0


def cmd_stats(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    pairs = [(ex.document, ex.summary) for ex in data_mod.load_jsonl(args.data)]
    stats = metrics_mod.corpus_stats(pairs)
    table = {
        "avg_tokens": {"document": stats.avg_doc_tokens,
                       "summary": stats.avg_summary_tokens},
        "novel_ngrams_pct": {"unigrams": stats.novel_pct[1],
                             "bigrams": stats.novel_pct[2],
                             "trigrams": stats.novel_pct[3]},
    }
    print(f"avg #tokens  document {stats.avg_doc_tokens:.1f}  "
          f"summary {stats.avg_summary_tokens:.1f}")
    print(f"%novel n-grams  unigrams {stats.novel_pct[1]:.1f}  "
          f"bigrams {stats.novel_pct[2]:.1f}  trigrams {stats.novel_pct[3]:.1f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(table, f, indent=2)
        _write_manifest(os.path.dirname(os.path.abspath(args.out)), "stats",
                        table, [args.data], None, started)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="arasum")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("normalize", help="apply evaluation normalization")
    sp.add_argument("--input")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("train-tokenizer", help="learn a subword vocabulary")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--vocab-size", type=int, default=2000)
    sp.add_argument("--coverage", type=float, default=0.9999)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_train_tokenizer)

    def train_flags(sp):
        sp.add_argument("--config")
        sp.add_argument("--vocab", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--epochs", type=int)
        sp.add_argument("--total-steps", type=int)
        sp.add_argument("--batch-size", type=int)
        sp.add_argument("--peak-lr", type=float)
        sp.add_argument("--deterministic", action="store_true")
        sp.add_argument("--resume")

    sp = sub.add_parser("pretrain", help="denoising pretraining")
    sp.add_argument("--corpus", required=True)
    train_flags(sp)
    sp.set_defaults(fn=cmd_pretrain)

    sp = sub.add_parser("finetune", help="supervised summarization training")
    sp.add_argument("--data", required=True)
    sp.add_argument("--init")
    train_flags(sp)
    sp.set_defaults(fn=cmd_finetune)

    sp = sub.add_parser("generate", help="beam-search generation")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--vocab", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--beam", type=int, default=3)
    sp.add_argument("--max-length", type=int, default=64)
    sp.add_argument("--min-length", type=int, default=1)
    sp.add_argument("--length-penalty", type=float, default=0.0)
    sp.set_defaults(fn=cmd_generate)

    sp = sub.add_parser("evaluate", help="ROUGE scoring of a run")
    sp.add_argument("--hyp", required=True)
    sp.add_argument("--ref", required=True)
    sp.add_argument("--dataset", default="dataset")
    sp.add_argument("--model", default="model")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_evaluate)

    sp = sub.add_parser("stats", help="abstractiveness statistics")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NonFiniteGradient as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 4
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3
    except ArasumError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
