"""Minimal reverse-mode automatic differentiation over numpy arrays.

Just enough ops for an encoder-decoder transformer: broadcasting
add/mul, batched matmul, embedding gather, layer norm, GELU, masked
softmax, dropout, and a fused stable softmax cross-entropy.  Each op
records a closure that accumulates gradients into its parents; calling
``backward`` on the final scalar walks the graph in reverse topological
order.
"""

import numpy as np
from scipy.special import erf


class Tensor:
    __slots__ = ("data", "grad", "parents", "backward_fn", "requires_grad")

    def __init__(self, data, parents=(), backward_fn=None, requires_grad=True):
        self.data = np.asarray(data)
        self.grad = None
        self.parents = parents
        self.backward_fn = backward_fn
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.data.shape

    def accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype)
        else:
            self.grad += g

    def backward(self):
        """Backprop from a scalar output."""
        assert self.data.ndim == 0, "backward() expects a scalar"
        order = []
        seen = set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t.parents:
                visit(p)
            order.append(t)

        visit(self)
        self.grad = np.ones_like(self.data)
        for t in reversed(order):
            if t.backward_fn is not None and t.grad is not None:
                t.backward_fn(t.grad)


def _sum_to_shape(g, shape):
    """Undo numpy broadcasting in the backward pass."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, s in enumerate(shape):
        if s == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def add(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data + b.data, (a, b))

    def bw(g):
        a.accumulate(_sum_to_shape(g, a.shape))
        b.accumulate(_sum_to_shape(g, b.shape))

    out.backward_fn = bw
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data * b.data, (a, b))

    def bw(g):
        a.accumulate(_sum_to_shape(g * b.data, a.shape))
        b.accumulate(_sum_to_shape(g * a.data, b.shape))

    out.backward_fn = bw
    return out


def scale(a: Tensor, c: float) -> Tensor:
    out = Tensor(a.data * c, (a,))
    out.backward_fn = lambda g: a.accumulate(g * c)
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(np.matmul(a.data, b.data), (a, b))

    def bw(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        a.accumulate(_sum_to_shape(ga, a.shape))
        b.accumulate(_sum_to_shape(gb, b.shape))

    out.backward_fn = bw
    return out


def sum_all(a: Tensor) -> Tensor:
    out = Tensor(a.data.sum(), (a,))
    out.backward_fn = lambda g: a.accumulate(np.ones_like(a.data) * g)
    return out


def embedding(table: Tensor, ids: np.ndarray) -> Tensor:
    out = Tensor(table.data[ids], (table,))

    def bw(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids, g)
        table.accumulate(gt)

    out.backward_fn = bw
    return out


def reshape(a: Tensor, shape) -> Tensor:
    out = Tensor(a.data.reshape(shape), (a,))
    out.backward_fn = lambda g: a.accumulate(g.reshape(a.shape))
    return out


def transpose(a: Tensor, axes) -> Tensor:
    out = Tensor(a.data.transpose(axes), (a,))
    inv = np.argsort(axes)
    out.backward_fn = lambda g: a.accumulate(g.transpose(inv))
    return out


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out = Tensor(xhat * gain.data + bias.data, (x, gain, bias))

    def bw(g):
        reduce_axes = tuple(range(g.ndim - 1))
        gain.accumulate((g * xhat).sum(axis=reduce_axes))
        bias.accumulate(g.sum(axis=reduce_axes))
        gx_hat = g * gain.data
        # standard layer-norm backward
        gx = inv * (
            gx_hat
            - gx_hat.mean(axis=-1, keepdims=True)
            - xhat * (gx_hat * xhat).mean(axis=-1, keepdims=True)
        )
        x.accumulate(gx)

    out.backward_fn = bw
    return out


def gelu(x: Tensor) -> Tensor:
    """Exact (erf-based) GELU."""
    cdf = 0.5 * (1.0 + erf(x.data / np.sqrt(2.0)))
    out = Tensor(x.data * cdf, (x,))

    def bw(g):
        pdf = np.exp(-0.5 * x.data ** 2) / np.sqrt(2.0 * np.pi)
        x.accumulate(g * (cdf + x.data * pdf))

    out.backward_fn = bw
    return out


def masked_softmax(scores: Tensor, mask: np.ndarray) -> Tensor:
    """Row softmax with boolean ``mask`` (True = attendable).

    Masked positions get exactly zero probability.  Rows with no valid
    position are a contract violation upstream.
    """
    neg = np.where(mask, scores.data, -np.inf)
    m = neg.max(axis=-1, keepdims=True)
    e = np.exp(neg - m)
    e = np.where(mask, e, 0.0)
    p = e / e.sum(axis=-1, keepdims=True)
    out = Tensor(p, (scores,))

    def bw(g):
        dot = (g * p).sum(axis=-1, keepdims=True)
        scores.accumulate(p * (g - dot))

    out.backward_fn = bw
    return out


def dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout; identity when rate == 0."""
    if rate == 0.0:
        return x
    keep = (rng.random(x.shape) >= rate).astype(x.data.dtype)
    scale_ = 1.0 / (1.0 - rate)
    out = Tensor(x.data * keep * scale_, (x,))
    out.backward_fn = lambda g: x.accumulate(g * keep * scale_)
    return out


def softmax_cross_entropy(logits: Tensor, targets: np.ndarray,
                          weight_mask: np.ndarray) -> Tensor:
    """Mean cross-entropy over positions where ``weight_mask`` is True.

    logits: [..., V]; targets: integer array matching the leading shape.
    Numerically stable log-softmax; fused gradient (p - onehot) / n.
    """
    z = logits.data
    m = z.max(axis=-1, keepdims=True)
    zs = z - m
    lse = np.log(np.exp(zs).sum(axis=-1, keepdims=True))
    logp = zs - lse
    picked = np.take_along_axis(logp, targets[..., None], axis=-1)[..., 0]
    n = int(weight_mask.sum())
    loss_val = -(picked * weight_mask).sum() / n
    out = Tensor(np.asarray(loss_val, dtype=z.dtype), (logits,))

    def bw(g):
        p = np.exp(logp)
        grad = p.copy()
        np.put_along_axis(
            grad, targets[..., None],
            np.take_along_axis(grad, targets[..., None], axis=-1) - 1.0,
            axis=-1,
        )
        grad *= (weight_mask / n)[..., None]
        logits.accumulate(g * grad)

    out.backward_fn = bw
    return out
