"""Adam, the warmup/decay schedule, gradient accumulation, and the
pretrain/finetune loops.

Defaults follow the published recipe: Adam with beta1 0.9, beta2 0.98,
epsilon 1e-6; learning rate warming up linearly for 6% of training to
the peak and decaying linearly to zero; two microbatches accumulated
per update; dropout 0.1 for the first 80% of pretraining epochs and 0
afterwards.  Finetuning defaults to 3 epochs at peak 5e-5 with linear
decay and no warmup.
"""

import csv
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyDataset, NonFiniteGradient, StepOutOfRange
from .model import (Batch, ModelConfig, init_params, load_checkpoint,
                    loss_and_grads, make_batch, save_checkpoint)
from .noising import NoiseConfig, example_rng, make_pretrain_pair
from .tokenizer import Vocabulary, encode


@dataclass
class TrainConfig:
    peak_lr: float = 6e-4
    warmup_frac: float = 0.06
    total_steps: int = 0          # 0: derived from epochs and corpus size
    beta1: float = 0.9
    beta2: float = 0.98
    epsilon: float = 1e-6
    update_frequency: int = 2
    dropout_schedule: list = None  # [((start, end), rate)], half-open epoch ranges
    epochs: int = 1
    batch_size: int = 8
    weight_decay: float = 0.0
    grad_clip: float = 0.0
    checkpoint_every: int = 0      # 0: final checkpoint only
    seed: int = 0
    deterministic: bool = False

    def __post_init__(self):
        if not 0 < self.warmup_frac < 1:
            raise ConfigError(f"warmup_frac {self.warmup_frac} outside (0, 1)")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ConfigError("betas must lie in (0, 1)")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.update_frequency < 1:
            raise ConfigError("update_frequency must be >= 1")


def finetune_defaults(**overrides) -> TrainConfig:
    """The published finetuning recipe: 3 epochs, peak 5e-5, linear
    decay, no warmup, no accumulation."""
    base = dict(peak_lr=5e-5, warmup_frac=1e-9, epochs=3, update_frequency=1,
                dropout_schedule=[])
    base.update(overrides)
    return TrainConfig(**base)


def default_pretrain_dropout_schedule(epochs: int) -> list:
    """0.1 for the first 80% of epochs, 0 for the rest."""
    cut = math.floor(0.8 * epochs + 0.5)
    return [((0, cut), 0.1), ((cut, epochs), 0.0)]


def dropout_at(schedule, epoch: int, default: float) -> float:
    if schedule is None:
        return default
    for (start, end), rate in schedule:
        if start <= epoch < end:
            return rate
    return 0.0


@dataclass
class OptimizerState:
    m: dict
    v: dict
    step: int = 0

    @classmethod
    def zeros_like(cls, params):
        return cls(m={k: np.zeros_like(p) for k, p in params.items()},
                   v={k: np.zeros_like(p) for k, p in params.items()},
                   step=0)


def lr_at(step: int, cfg: TrainConfig) -> float:
    """Piecewise-linear warmup then decay; zero at both ends."""
    total = cfg.total_steps
    if not 0 <= step <= total:
        raise StepOutOfRange(f"step {step} outside [0, {total}]")
    warmup = round(cfg.warmup_frac * total)
    if step <= warmup:
        return cfg.peak_lr * step / warmup if warmup > 0 else cfg.peak_lr
    return cfg.peak_lr * (total - step) / (total - warmup)


def adam_step(params, grads, state: OptimizerState, lr: float,
              cfg: TrainConfig):
    """Bias-corrected Adam update; returns fresh (params, state)."""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"non-finite gradient in {name}")
    if cfg.grad_clip > 0:
        norm = math.sqrt(sum(float((g.astype(np.float64) ** 2).sum())
                             for g in grads.values()))
        if norm > cfg.grad_clip:
            scale = cfg.grad_clip / norm
            grads = {k: g * scale for k, g in grads.items()}
    t = state.step + 1
    bc1 = 1.0 - cfg.beta1 ** t
    bc2 = 1.0 - cfg.beta2 ** t
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if cfg.weight_decay > 0:
            g = g + cfg.weight_decay * p
        m = cfg.beta1 * state.m[name] + (1 - cfg.beta1) * g
        v = cfg.beta2 * state.v[name] + (1 - cfg.beta2) * g * g
        update = lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.epsilon)
        new_params[name] = (p - update).astype(p.dtype)
        new_m[name] = m.astype(p.dtype)
        new_v[name] = v.astype(p.dtype)
    return new_params, OptimizerState(m=new_m, v=new_v, step=t)


def accumulate_and_step(params, state: OptimizerState, microbatches,
                        mcfg: ModelConfig, tcfg: TrainConfig, lr: float,
                        dropout_rate: float = 0.0, rng=None):
    """Average gradients over the microbatches, then one Adam update.

    Returns (params, state, mean loss).
    """
    if not microbatches or len(microbatches) > tcfg.update_frequency:
        raise ConfigError(
            f"expected up to {tcfg.update_frequency} microbatches, "
            f"got {len(microbatches)}")
    total_grads = None
    losses = []
    for batch in microbatches:
        l, grads = loss_and_grads(params, mcfg, batch, dropout_rate, rng)
        losses.append(l)
        if total_grads is None:
            total_grads = grads
        else:
            for k in total_grads:
                total_grads[k] = total_grads[k] + grads[k]
    n = len(microbatches)
    mean_grads = {k: g / n for k, g in total_grads.items()}
    params, state = adam_step(params, mean_grads, state, lr, tcfg)
    return params, state, float(np.mean(losses))


def _steps_per_epoch(n_examples: int, tcfg: TrainConfig) -> int:
    micro = math.ceil(n_examples / tcfg.batch_size)
    return math.ceil(micro / tcfg.update_frequency)


def _train_loop(get_pair, n_examples, v: Vocabulary, mcfg: ModelConfig,
                tcfg: TrainConfig, out_dir, resume=None, init_from=None,
                log_name="metrics.csv"):
    """Shared training driver.

    ``get_pair(epoch, index)`` must deterministically return one
    (source TokenSequence, target TokenSequence) pair.  All stochastic
    state is derived from (seed, step) so resuming from a checkpoint
    continues bit-identically.  ``resume`` continues a partial run;
    ``init_from`` only warm-starts the parameters.

    Note: tcfg.total_steps is filled in when it was left at 0.
    """
    if n_examples == 0:
        raise EmptyDataset("empty training stream")
    os.makedirs(out_dir, exist_ok=True)

    steps_per_epoch = _steps_per_epoch(n_examples, tcfg)
    total = tcfg.total_steps or steps_per_epoch * tcfg.epochs
    tcfg.total_steps = total

    if resume is not None:
        _, params, start_step, state, _ = load_checkpoint(resume, expect_cfg=mcfg)
        if state is None:
            state = OptimizerState.zeros_like(params)
    else:
        if init_from is not None:
            _, params, _, _, _ = load_checkpoint(init_from, expect_cfg=mcfg)
        else:
            params = init_params(mcfg, tcfg.seed)
        state = OptimizerState.zeros_like(params)
        start_step = 0

    log_path = os.path.join(out_dir, log_name)
    mode = "a" if (resume is not None and os.path.exists(log_path)) else "w"
    log = open(log_path, mode, newline="")
    writer = csv.writer(log)
    if mode == "w":
        writer.writerow(["step", "epoch", "lr", "loss", "tokens_per_sec"])

    step = 0
    final_path = None
    done = False
    for epoch in range(tcfg.epochs):
        rate = dropout_at(tcfg.dropout_schedule, epoch, mcfg.dropout)
        shuffle_rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=tcfg.seed, spawn_key=(2, epoch))))
        order = list(shuffle_rng.permutation(n_examples))
        micro = [order[i:i + tcfg.batch_size]
                 for i in range(0, n_examples, tcfg.batch_size)]
        for g0 in range(0, len(micro), tcfg.update_frequency):
            group = micro[g0:g0 + tcfg.update_frequency]
            if step >= total:
                done = True
                break
            if step < start_step:
                step += 1
                continue
            t0 = time.perf_counter()
            drop_rng = np.random.Generator(np.random.PCG64(
                np.random.SeedSequence(entropy=tcfg.seed, spawn_key=(1, step))))
            batches = []
            n_tokens = 0
            for idxs in group:
                pairs = []
                for i in idxs:
                    s, t = get_pair(epoch, i)
                    pairs.append((s.ids, t.ids))
                    n_tokens += len(s.ids) + len(t.ids)
                batches.append(make_batch(pairs, v.pad_id))
            lr = lr_at(step + 1, tcfg)
            params, state, loss_val = accumulate_and_step(
                params, state, batches, mcfg, tcfg, lr, rate, drop_rng)
            step += 1
            dt = time.perf_counter() - t0
            tps = 0.0 if tcfg.deterministic else n_tokens / dt
            writer.writerow([step, epoch, f"{lr:.10g}", f"{loss_val:.10g}",
                             f"{tps:.1f}"])
            if not math.isfinite(loss_val):
                log.close()
                raise NonFiniteGradient(f"non-finite loss at step {step}")
            if tcfg.checkpoint_every and step % tcfg.checkpoint_every == 0:
                path = os.path.join(out_dir, f"ckpt_step{step}.bin")
                save_checkpoint(path, mcfg, params, step, state)
                log.flush()
        if done:
            break
    log.close()
    final_path = os.path.join(out_dir, f"ckpt_step{step}.bin")
    save_checkpoint(final_path, mcfg, params, step, state)
    return final_path, params, state


def pretrain(corpus, v: Vocabulary, mcfg: ModelConfig, tcfg: TrainConfig,
             ncfg: NoiseConfig, out_dir, resume=None):
    """Denoising pretraining over an iterable of text documents."""
    docs = [d for d in corpus if d.strip()]
    if tcfg.dropout_schedule is None:
        tcfg.dropout_schedule = default_pretrain_dropout_schedule(tcfg.epochs)

    def get_pair(epoch, i):
        rng = example_rng(ncfg.seed, epoch * len(docs) + i)
        return make_pretrain_pair(docs[i], v, ncfg, rng)

    return _train_loop(get_pair, len(docs), v, mcfg, tcfg, out_dir, resume)


def finetune(pairs, v: Vocabulary, mcfg: ModelConfig, tcfg: TrainConfig,
             out_dir, init_checkpoint=None, resume=None):
    """Supervised document->summary training, optionally warm-started
    from a pretraining checkpoint."""
    data = [(encode(v, d, kind="source"), encode(v, s, kind="target"))
            for d, s in pairs]
    if not data:
        raise EmptyDataset("empty training stream")

    def get_pair(epoch, i):
        return data[i]

    return _train_loop(get_pair, len(data), v, mcfg, tcfg, out_dir,
                       resume=resume, init_from=init_checkpoint)
