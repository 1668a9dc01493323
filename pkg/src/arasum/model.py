"""Encoder-decoder transformer in the BART-base shape.

Post-layer-norm residual blocks, GELU feed-forwards, learned positional
embeddings (separate tables for encoder and decoder), token embedding
shared between encoder input, decoder input, and the output projection,
and an optional extra layer norm on top of each stack.  Gradients come
from the reverse-mode core in :mod:`arasum.autodiff`.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import AllPadTarget, ConfigError, SequenceTooLong

INIT_STD = 0.02


@dataclass
class ModelConfig:
    vocab_size: int
    enc_layers: int = 6
    dec_layers: int = 6
    d_model: int = 768
    n_heads: int = 12
    d_ffn: int = 3072
    max_positions: int = 1024
    dropout: float = 0.1
    final_layernorm: bool = True

    def __post_init__(self):
        counts = (self.vocab_size, self.enc_layers, self.dec_layers,
                  self.d_model, self.n_heads, self.d_ffn, self.max_positions)
        if any(c < 1 for c in counts):
            raise ConfigError(f"all model dimensions must be >= 1, got {counts}")
        if self.d_model % self.n_heads != 0:
            raise ConfigError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if not 0 <= self.dropout < 1:
            raise ConfigError(f"dropout {self.dropout} outside [0, 1)")


@dataclass
class Batch:
    """Padded id matrices; decoder input is the target shifted right."""

    src: np.ndarray        # [B, T] int
    src_mask: np.ndarray   # [B, T] bool, True at real tokens
    dec_in: np.ndarray     # [B, U] int, starts with bos
    target: np.ndarray     # [B, U] int, ends with eos
    tgt_mask: np.ndarray   # [B, U] bool, True at supervised positions


def make_batch(pairs, pad_id: int) -> Batch:
    """Build a padded batch from (source ids, target ids) lists.

    Target sequences must carry bos...eos framing; the decoder sees
    everything but the final token, the loss everything but bos.
    """
    B = len(pairs)
    T = max(len(s) for s, _ in pairs)
    U = max(len(t) for _, t in pairs) - 1
    src = np.full((B, T), pad_id, dtype=np.int64)
    dec_in = np.full((B, U), pad_id, dtype=np.int64)
    target = np.full((B, U), pad_id, dtype=np.int64)
    src_mask = np.zeros((B, T), dtype=bool)
    tgt_mask = np.zeros((B, U), dtype=bool)
    for b, (s, t) in enumerate(pairs):
        src[b, :len(s)] = s
        src_mask[b, :len(s)] = True
        dec_in[b, :len(t) - 1] = t[:-1]
        target[b, :len(t) - 1] = t[1:]
        tgt_mask[b, :len(t) - 1] = True
    return Batch(src, src_mask, dec_in, target, tgt_mask)


def _attn_names(prefix):
    return [f"{prefix}.{w}" for w in ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo")]


def param_shapes(cfg: ModelConfig) -> dict[str, tuple]:
    d, f, V, P = cfg.d_model, cfg.d_ffn, cfg.vocab_size, cfg.max_positions
    shapes: dict[str, tuple] = {
        "emb.tok": (V, d),
        "emb.pos_enc": (P, d),
        "emb.pos_dec": (P, d),
    }

    def attn(prefix):
        for name in _attn_names(prefix):
            shapes[name] = (d, d) if name.split(".")[-1].startswith("w") else (d,)

    def ln(prefix):
        shapes[f"{prefix}.g"] = (d,)
        shapes[f"{prefix}.b"] = (d,)

    def ffn(prefix):
        shapes[f"{prefix}.w1"] = (d, f)
        shapes[f"{prefix}.b1"] = (f,)
        shapes[f"{prefix}.w2"] = (f, d)
        shapes[f"{prefix}.b2"] = (d,)

    for i in range(cfg.enc_layers):
        attn(f"enc.{i}.attn")
        ln(f"enc.{i}.attn_ln")
        ffn(f"enc.{i}.ffn")
        ln(f"enc.{i}.ffn_ln")
    for i in range(cfg.dec_layers):
        attn(f"dec.{i}.self_attn")
        ln(f"dec.{i}.self_ln")
        attn(f"dec.{i}.cross_attn")
        ln(f"dec.{i}.cross_ln")
        ffn(f"dec.{i}.ffn")
        ln(f"dec.{i}.ffn_ln")
    if cfg.final_layernorm:
        ln("enc.final_ln")
        ln("dec.final_ln")
    return shapes


def init_params(cfg: ModelConfig, seed: int, dtype=np.float32) -> dict[str, np.ndarray]:
    """Weights ~ N(0, 0.02); all biases zero; layer-norm gains one."""
    rng = np.random.Generator(np.random.PCG64(seed))
    params = {}
    for name, shape in param_shapes(cfg).items():
        leaf = name.split(".")[-1]
        if leaf == "g":
            params[name] = np.ones(shape, dtype=dtype)
        elif leaf.startswith("b"):
            params[name] = np.zeros(shape, dtype=dtype)
        else:
            params[name] = rng.normal(0.0, INIT_STD, size=shape).astype(dtype)
    return params


def count_params(cfg: ModelConfig) -> int:
    """Closed-form scalar count for the full parameter set."""
    d, f, V, P = cfg.d_model, cfg.d_ffn, cfg.vocab_size, cfg.max_positions
    attn = 4 * (d * d + d)
    ffn = d * f + f + f * d + d
    ln = 2 * d
    enc_layer = attn + ln + ffn + ln
    dec_layer = 2 * attn + 3 * ln + ffn
    total = V * d + 2 * P * d
    total += cfg.enc_layers * enc_layer + cfg.dec_layers * dec_layer
    if cfg.final_layernorm:
        total += 2 * ln
    return total


def _multi_head_attention(p, prefix, x_q: Tensor, x_kv: Tensor,
                          mask: np.ndarray, cfg: ModelConfig) -> Tensor:
    """mask: broadcastable to [B, H, Tq, Tk], True where attendable."""
    d, h = cfg.d_model, cfg.n_heads
    dh = d // h
    B, Tq = x_q.shape[0], x_q.shape[1]
    Tk = x_kv.shape[1]

    def proj(x, w, b):
        return ad.add(ad.matmul(x, p[w]), p[b])

    names = _attn_names(prefix)
    q = proj(x_q, names[0], names[1])
    k = proj(x_kv, names[2], names[3])
    v = proj(x_kv, names[4], names[5])
    # [B, T, d] -> [B, H, T, dh]
    q = ad.transpose(ad.reshape(q, (B, Tq, h, dh)), (0, 2, 1, 3))
    k = ad.transpose(ad.reshape(k, (B, Tk, h, dh)), (0, 2, 1, 3))
    v = ad.transpose(ad.reshape(v, (B, Tk, h, dh)), (0, 2, 1, 3))
    scores = ad.scale(ad.matmul(q, ad.transpose(k, (0, 1, 3, 2))), 1.0 / np.sqrt(dh))
    probs = ad.masked_softmax(scores, mask)
    ctx = ad.matmul(probs, v)
    ctx = ad.reshape(ad.transpose(ctx, (0, 2, 1, 3)), (B, Tq, d))
    return proj(ctx, names[6], names[7])


class _Graph:
    """One forward pass: parameter tensors plus the logits node."""

    def __init__(self, params, cfg: ModelConfig, batch: Batch,
                 dropout_rate: float = 0.0, rng=None):
        if batch.src.shape[1] > cfg.max_positions or batch.dec_in.shape[1] > cfg.max_positions:
            raise SequenceTooLong(
                f"batch time dims {batch.src.shape[1]}/{batch.dec_in.shape[1]} "
                f"exceed max_positions {cfg.max_positions}")
        if dropout_rate > 0 and rng is None:
            raise ConfigError("dropout requires an rng")
        self.p = {name: Tensor(arr) for name, arr in params.items()}
        self.cfg = cfg
        self.rate = dropout_rate
        self.rng = rng
        self.logits = self._build(batch)

    def _drop(self, x):
        if self.rate > 0:
            return ad.dropout(x, self.rate, self.rng)
        return x

    def _block(self, prefix, x, sub):
        """Post-LN residual: LN(x + dropout(sublayer))."""
        y = ad.add(x, self._drop(sub))
        return ad.layer_norm(y, self.p[f"{prefix}.g"], self.p[f"{prefix}.b"])

    def _ffn(self, prefix, x):
        h = ad.gelu(ad.add(ad.matmul(x, self.p[f"{prefix}.w1"]),
                           self.p[f"{prefix}.b1"]))
        h = self._drop(h)
        return ad.add(ad.matmul(h, self.p[f"{prefix}.w2"]), self.p[f"{prefix}.b2"])

    def _build(self, batch: Batch):
        p, cfg = self.p, self.cfg
        B, T = batch.src.shape
        U = batch.dec_in.shape[1]

        src_key = batch.src_mask[:, None, None, :]               # [B,1,1,T]
        causal = np.tril(np.ones((U, U), dtype=bool))[None, None]  # [1,1,U,U]

        x = ad.add(ad.embedding(p["emb.tok"], batch.src),
                   ad.embedding(p["emb.pos_enc"], np.arange(T)))
        x = self._drop(x)
        for i in range(cfg.enc_layers):
            a = _multi_head_attention(p, f"enc.{i}.attn", x, x, src_key, cfg)
            x = self._block(f"enc.{i}.attn_ln", x, a)
            x = self._block(f"enc.{i}.ffn_ln", x, self._ffn(f"enc.{i}.ffn", x))
        if cfg.final_layernorm:
            x = ad.layer_norm(x, p["enc.final_ln.g"], p["enc.final_ln.b"])
        memory = x

        y = ad.add(ad.embedding(p["emb.tok"], batch.dec_in),
                   ad.embedding(p["emb.pos_dec"], np.arange(U)))
        y = self._drop(y)
        for i in range(cfg.dec_layers):
            a = _multi_head_attention(p, f"dec.{i}.self_attn", y, y, causal, cfg)
            y = self._block(f"dec.{i}.self_ln", y, a)
            c = _multi_head_attention(p, f"dec.{i}.cross_attn", y, memory, src_key, cfg)
            y = self._block(f"dec.{i}.cross_ln", y, c)
            y = self._block(f"dec.{i}.ffn_ln", y, self._ffn(f"dec.{i}.ffn", y))
        if cfg.final_layernorm:
            y = ad.layer_norm(y, p["dec.final_ln.g"], p["dec.final_ln.b"])

        return ad.matmul(y, ad.transpose(p["emb.tok"], (1, 0)))


def forward(params, cfg: ModelConfig, batch: Batch,
            dropout_rate: float = 0.0, rng=None) -> np.ndarray:
    """Logits [batch, time, vocab]; dropout only when a rate is given."""
    return _Graph(params, cfg, batch, dropout_rate, rng).logits.data


def loss(logits: np.ndarray, targets: np.ndarray, pad_id: int) -> float:
    """Mean token cross-entropy over non-pad target positions."""
    mask = targets != pad_id
    if not mask.any():
        raise AllPadTarget("no supervised positions in target")
    t = ad.softmax_cross_entropy(Tensor(logits, requires_grad=False), targets, mask)
    return float(t.data)


def loss_and_grads(params, cfg: ModelConfig, batch: Batch,
                   dropout_rate: float = 0.0, rng=None):
    """One forward/backward pass: (loss value, gradient dict)."""
    if not batch.tgt_mask.any():
        raise AllPadTarget("no supervised positions in target")
    g = _Graph(params, cfg, batch, dropout_rate, rng)
    l = ad.softmax_cross_entropy(g.logits, batch.target, batch.tgt_mask)
    l.backward()
    grads = {
        name: (t.grad if t.grad is not None else np.zeros_like(t.data))
        for name, t in g.p.items()
    }
    return float(l.data), grads


def save_checkpoint(path, cfg: ModelConfig, params, step: int = 0,
                    opt_state=None, extra=None) -> None:
    """JSON-described container of little-endian float32 tensors."""
    arrays = {f"param/{k}": v.astype("<f4") for k, v in params.items()}
    if opt_state is not None:
        arrays.update({f"m/{k}": v.astype("<f4") for k, v in opt_state.m.items()})
        arrays.update({f"v/{k}": v.astype("<f4") for k, v in opt_state.v.items()})
        arrays["opt_step"] = np.int64(opt_state.step)
    header = {"config": asdict(cfg), "step": step, "extra": extra or {}}
    arrays["header_json"] = np.frombuffer(
        json.dumps(header, sort_keys=True).encode(), dtype=np.uint8)
    with open(path, "wb") as f:
        np.savez(f, **arrays)


def load_checkpoint(path, expect_cfg: ModelConfig | None = None):
    """Returns (cfg, params, step, opt_state_or_None, extra)."""
    from .optim import OptimizerState

    with np.load(path) as z:
        header = json.loads(bytes(z["header_json"]).decode())
        cfg = ModelConfig(**header["config"])
        if expect_cfg is not None and cfg != expect_cfg:
            raise ConfigError(
                f"checkpoint config {cfg} does not match expected {expect_cfg}")
        params = {k[len("param/"):]: z[k] for k in z.files if k.startswith("param/")}
        opt_state = None
        if "opt_step" in z.files:
            opt_state = OptimizerState(
                m={k[len("m/"):]: z[k] for k in z.files if k.startswith("m/")},
                v={k[len("v/"):]: z[k] for k in z.files if k.startswith("v/")},
                step=int(z["opt_step"]),
            )
    return cfg, params, header["step"], opt_state, header["extra"]
