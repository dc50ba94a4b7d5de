"""Minimal MLP engine with reverse-mode gradients.

Everything runs on float64 numpy arrays. Networks are plain parameter
containers; a forward pass either evaluates directly (no bookkeeping) or
builds a small graph of `Var` nodes from which gradients of a scalar loss
are pulled by `backward`. Only the handful of operations the training
losses need are implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class TrainingDivergenceError(RuntimeError):
    """Raised when an optimizer step sees non-finite gradients or parameters."""


class GraphUsageError(RuntimeError):
    """Raised on invalid autodiff usage, e.g. backward from a non-scalar."""


# ---------------------------------------------------------------------------
# autodiff graph
# ---------------------------------------------------------------------------


class Var:
    """One node of the gradient tape: a value plus how to push adjoints back."""

    __slots__ = ("value", "grad", "parents", "_push")

    def __init__(self, value, parents=(), push=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.parents = parents
        self._push = push

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
            if self.grad.shape != self.value.shape:
                self.grad = np.broadcast_to(self.grad, self.value.shape).copy()
        else:
            self.grad += g


def _value(x):
    return x.value if isinstance(x, Var) else np.asarray(x, dtype=np.float64)


def _unbroadcast(g, shape):
    """Sum gradient `g` down to `shape` after numpy broadcasting."""
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _binary(a, b, out, da, db):
    parents, pushes = [], []
    if isinstance(a, Var):
        parents.append(a)
        pushes.append(da)
    if isinstance(b, Var):
        parents.append(b)
        pushes.append(db)

    def push(g):
        for parent, fn in zip(parents, pushes):
            parent._accumulate(_unbroadcast(fn(g), parent.value.shape))

    return Var(out, tuple(parents), push)


def add(a, b):
    av, bv = _value(a), _value(b)
    return _binary(a, b, av + bv, lambda g: g, lambda g: g)


def sub(a, b):
    av, bv = _value(a), _value(b)
    return _binary(a, b, av - bv, lambda g: g, lambda g: -g)


def mul(a, b):
    av, bv = _value(a), _value(b)
    return _binary(a, b, av * bv, lambda g: g * bv, lambda g: g * av)


def square(x):
    xv = x.value

    def push(g):
        x._accumulate(2.0 * xv * g)

    return Var(xv * xv, (x,), push)


def vexp(x):
    out = np.exp(x.value)

    def push(g):
        x._accumulate(g * out)

    return Var(out, (x,), push)


def relu(x):
    xv = x.value
    mask = xv > 0

    def push(g):
        x._accumulate(g * mask)

    return Var(np.where(mask, xv, 0.0), (x,), push)


def affine(x, w, b):
    """y = x @ w.T + b with x of shape (N, D) or (D,); w (O, D), b (O,)."""
    xv, wv, bv = _value(x), _value(w), _value(b)
    single = xv.ndim == 1
    x2 = xv[None, :] if single else xv
    out = x2 @ wv.T + bv

    def push(g):
        g2 = g[None, :] if single else g
        if isinstance(w, Var):
            w._accumulate(g2.T @ x2)
        if isinstance(b, Var):
            b._accumulate(g2.sum(axis=0))
        if isinstance(x, Var):
            gx = g2 @ wv
            x._accumulate(gx[0] if single else gx)

    parents = tuple(p for p in (x, w, b) if isinstance(p, Var))
    return Var(out[0] if single else out, parents, push)


def concat(parts, axis=-1):
    values = [_value(p) for p in parts]
    out = np.concatenate(values, axis=axis)
    sizes = [v.shape[axis] for v in values]
    offsets = np.cumsum([0] + sizes)

    def push(g):
        for part, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if isinstance(part, Var):
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                part._accumulate(g[tuple(idx)])

    parents = tuple(p for p in parts if isinstance(p, Var))
    return Var(out, parents, push)


def reshape(x, shape):
    xv = x.value

    def push(g):
        x._accumulate(g.reshape(xv.shape))

    return Var(xv.reshape(shape), (x,), push)


def sum_axis(x, axis):
    xv = x.value

    def push(g):
        x._accumulate(np.broadcast_to(np.expand_dims(g, axis), xv.shape).copy())

    return Var(xv.sum(axis=axis), (x,), push)


def mean_all(x):
    xv = x.value
    n = xv.size

    def push(g):
        x._accumulate(np.full_like(xv, float(g) / n))

    return Var(xv.mean(), (x,), push)


def minimum(a, b):
    av, bv = a.value, b.value
    take_a = av <= bv

    def push(g):
        a._accumulate(g * take_a)
        b._accumulate(g * ~take_a)

    return Var(np.where(take_a, av, bv), (a, b), push)


def softmax_last(x):
    """Softmax over the last axis, numerically stabilized."""
    xv = x.value
    shifted = xv - xv.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def push(g):
        inner = (g * out).sum(axis=-1, keepdims=True)
        x._accumulate(out * (g - inner))

    return Var(out, (x,), push)


def log_softmax_last(x):
    """Log-softmax over the last axis with max subtraction."""
    xv = x.value
    shifted = xv - xv.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out = shifted - lse
    p = np.exp(out)

    def push(g):
        x._accumulate(g - p * g.sum(axis=-1, keepdims=True))

    return Var(out, (x,), push)


def backward(loss: Var, adjoint: float = 1.0) -> None:
    """Propagate `adjoint` from a scalar loss through the recorded graph.

    Leaves accumulate into `.grad`; parameter values are never touched.
    """
    if loss.value.ndim != 0:
        raise GraphUsageError("backward expects a scalar loss node")
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    loss.grad = np.asarray(adjoint, dtype=np.float64)
    for node in reversed(order):
        if node._push is not None and node.grad is not None:
            node._push(node.grad)


# ---------------------------------------------------------------------------
# MLP parameters
# ---------------------------------------------------------------------------

CHECKPOINT_FORMAT = 1


@dataclass
class MlpParams:
    """Fully-connected network: ReLU hidden layers, linear output."""

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def init(cls, layer_sizes, rng) -> "MlpParams":
        """Seeded init, uniform in +-1/sqrt(fan_in) per layer."""
        if len(layer_sizes) < 2 or any(n <= 0 for n in layer_sizes):
            raise ValueError(f"bad layer sizes {layer_sizes}")
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(list(layer_sizes), weights, biases)

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def num_params(self) -> int:
        return sum(a.size for a in self.arrays())

    def copy(self) -> "MlpParams":
        return MlpParams(
            list(self.layer_sizes),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    def get_flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def set_flat(self, flat: np.ndarray) -> None:
        pos = 0
        for a in self.arrays():
            a[...] = flat[pos : pos + a.size].reshape(a.shape)
            pos += a.size

    def to_dict(self) -> dict:
        return {
            "format": CHECKPOINT_FORMAT,
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.ravel().tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpParams":
        sizes = list(d["layer_sizes"])
        weights = [
            np.asarray(w, dtype=np.float64).reshape(o, i)
            for w, i, o in zip(d["weights"], sizes[:-1], sizes[1:])
        ]
        biases = [np.asarray(b, dtype=np.float64) for b in d["biases"]]
        return cls(sizes, weights, biases)


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Plain forward pass (no gradient bookkeeping); x is (D,) or (N, D)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.in_dim:
        raise ValueError(
            f"input dim {x.shape[-1]} does not match net input {params.in_dim}"
        )
    h = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T + b
        if i < last:
            h = np.maximum(h, 0.0)
    return h


def mlp_graph(params: MlpParams, x, trainable: bool = True):
    """Forward pass that records the tape.

    Returns (output Var, leaf list aligned with params.arrays()). With
    trainable=False the weights enter as constants and the leaf list is
    empty; gradients then flow only through the input (when it is a Var).
    """
    xv = _value(x)
    if xv.shape[-1] != params.in_dim:
        raise ValueError(
            f"input dim {xv.shape[-1]} does not match net input {params.in_dim}"
        )
    leaves = []
    h = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        if trainable:
            wv, bv = Var(w), Var(b)
            leaves.extend((wv, bv))
        else:
            wv, bv = w, b
        h = affine(h, wv, bv)
        if i < last:
            h = relu(h)
    return h, leaves


def leaf_grads(leaves) -> list[np.ndarray]:
    return [
        leaf.grad if leaf.grad is not None else np.zeros_like(leaf.value)
        for leaf in leaves
    ]


# ---------------------------------------------------------------------------
# optimizer and schedule
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    """Adam moments for one list of parameter arrays."""

    first_moment: list[np.ndarray]
    second_moment: list[np.ndarray]
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def init(cls, arrays, **kw) -> "AdamState":
        return cls(
            [np.zeros_like(a) for a in arrays],
            [np.zeros_like(a) for a in arrays],
            **kw,
        )


def adam_step(arrays, grads, state: AdamState, rate: float) -> None:
    """One in-place Adam update with bias correction.

    Finite gradients and a finite rate keep the parameters finite, so the
    divergence check only needs to look at the incoming gradients.
    """
    for g in grads:
        if not math.isfinite(float(np.sum(g))):
            raise TrainingDivergenceError(
                f"non-finite gradient (max abs {np.nanmax(np.abs(g))!r})"
            )
    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - state.beta1**t
    c2 = 1.0 - state.beta2**t
    for a, g, m, v in zip(arrays, grads, state.first_moment, state.second_moment):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        a -= rate * (m / c1) / (np.sqrt(v / c2) + state.epsilon)


@dataclass(frozen=True)
class LrSchedule:
    """Polynomial decay: rate(t) = initial * (1 - t/total)^power, floored."""

    initial_rate: float
    total_steps: int
    power: float = 0.9
    floor: float = 1e-5

    def rate(self, step: int) -> float:
        t = min(max(step, 0), self.total_steps)
        r = self.initial_rate * (1.0 - t / self.total_steps) ** self.power
        return max(r, min(self.floor, self.initial_rate))


# ---------------------------------------------------------------------------
# probability primitives
# ---------------------------------------------------------------------------


def softmax_with_log(logits, groups=None):
    """Probabilities and log-probabilities, normalized within each group.

    `groups` is a partition of the index set (defaults to one group over
    all entries). Log-probabilities are computed with max subtraction so
    that exp(logp) reproduces p exactly.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if groups is None:
        groups = [np.arange(logits.size)]
    logp = np.empty_like(logits)
    for group in groups:
        idx = np.asarray(group)
        if idx.size == 0:
            raise ValueError("empty group in softmax partition")
        shifted = logits[idx] - logits[idx].max()
        lse = np.log(np.exp(shifted).sum())
        logp[idx] = shifted - lse
    p = np.exp(logp)
    return p, logp


def gumbel_noise(shape, rng) -> np.ndarray:
    """Standard Gumbel samples g = -log(-log(u)), u uniform on (0, 1)."""
    u = rng.random(shape)
    u = np.clip(u, np.finfo(np.float64).tiny, None)
    return -np.log(-np.log(u))
