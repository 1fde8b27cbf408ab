"""Dense network machinery for the learners: MLPs, reverse-mode gradients,
adaptive-moment updates, global-norm clipping, and Polyak target averaging.

Everything is float64 numpy; forward/backward accept a single input vector or
a batch of row vectors. Parameter gradients are summed over batch rows, so a
mean objective is expressed by scaling the output gradient by 1/B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ACTIVATIONS = ("relu", "tanh", "identity")


@dataclass
class MlpParams:
    """Layer weights [out, in] and biases [out], plus activation tags."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "relu"
    output_activation: str = "identity"

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def copy(self) -> "MlpParams":
        return MlpParams(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.hidden_activation,
            self.output_activation,
        )


@dataclass
class GradientBundle:
    """Partial derivatives, shape-congruent with an MlpParams."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def scaled(self, factor: float) -> "GradientBundle":
        return GradientBundle(
            [w * factor for w in self.weights], [b * factor for b in self.biases]
        )


@dataclass
class AdamState:
    """First/second moment accumulators and the update counter."""

    m_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_weights: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0


def mlp_init(
    layer_sizes: list[int],
    rng: np.random.Generator,
    hidden_activation: str = "relu",
    output_activation: str = "identity",
) -> MlpParams:
    """Weights uniform on +-1/sqrt(fan_in), biases zero."""
    if len(layer_sizes) < 2 or any(s < 1 for s in layer_sizes):
        raise ValueError(f"need >= 2 positive layer sizes, got {layer_sizes}")
    if hidden_activation not in _ACTIVATIONS or output_activation not in _ACTIVATIONS:
        raise ValueError(f"unknown activation in ({hidden_activation}, {output_activation})")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases, hidden_activation, output_activation)


def parameter_count(params: MlpParams) -> int:
    return sum(w.size for w in params.weights) + sum(b.size for b in params.biases)


def _apply(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return np.maximum(z, 0.0)
    if tag == "tanh":
        return np.tanh(z)
    return z


def _derivative(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return (z > 0.0).astype(np.float64)
    if tag == "tanh":
        return 1.0 - np.tanh(z) ** 2
    return np.ones_like(z)


def forward(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, list]:
    """Affine + nonlinearity composition; the cache feeds backward()."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.weights[0].shape[1]:
        raise ValueError(
            f"input width {x.shape[-1]} != first layer fan-in {params.weights[0].shape[1]}"
        )
    last = len(params.weights) - 1
    cache = []
    h = x
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w.T + b
        cache.append((h, z))
        tag = params.output_activation if i == last else params.hidden_activation
        h = _apply(tag, z)
    return h, cache


def backward(
    params: MlpParams, cache: list, output_gradient: np.ndarray
) -> tuple[GradientBundle, np.ndarray]:
    """Exact reverse-mode derivatives of output . output_gradient.

    Returns parameter gradients (summed over batch rows when the forward ran
    on a batch) and the gradient with respect to the input.
    """
    gy = np.asarray(output_gradient, dtype=np.float64)
    last = len(params.weights) - 1
    if gy.shape[-1] != params.weights[last].shape[0]:
        raise ValueError(
            f"output gradient width {gy.shape[-1]} != output size {params.weights[last].shape[0]}"
        )
    g_weights: list[np.ndarray] = [None] * len(params.weights)  # type: ignore[list-item]
    g_biases: list[np.ndarray] = [None] * len(params.biases)  # type: ignore[list-item]
    grad = gy
    for i in range(last, -1, -1):
        h_in, z = cache[i]
        tag = params.output_activation if i == last else params.hidden_activation
        dz = grad * _derivative(tag, z)
        if dz.ndim == 1:
            g_weights[i] = np.outer(dz, h_in)
            g_biases[i] = dz.copy()
        else:
            g_weights[i] = dz.T @ h_in
            g_biases[i] = dz.sum(axis=0)
        grad = dz @ params.weights[i]
    return GradientBundle(g_weights, g_biases), grad


def global_norm(grads: GradientBundle) -> float:
    total = sum(float(np.sum(w**2)) for w in grads.weights)
    total += sum(float(np.sum(b**2)) for b in grads.biases)
    return math.sqrt(total)


def clip_global_norm(grads: GradientBundle, max_norm: float) -> GradientBundle:
    """Scale all entries so the global L2 norm is at most max_norm."""
    if not max_norm > 0.0:
        raise ValueError(f"max_norm must be > 0, got {max_norm}")
    norm = global_norm(grads)
    if norm <= max_norm:
        return GradientBundle([w.copy() for w in grads.weights], [b.copy() for b in grads.biases])
    return grads.scaled(max_norm / norm)


def adam_init(params: MlpParams) -> AdamState:
    return AdamState(
        m_weights=[np.zeros_like(w) for w in params.weights],
        m_biases=[np.zeros_like(b) for b in params.biases],
        v_weights=[np.zeros_like(w) for w in params.weights],
        v_biases=[np.zeros_like(b) for b in params.biases],
        step=0,
    )


def adam_step(
    params: MlpParams,
    grads: GradientBundle,
    state: AdamState,
    learning_rate: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[MlpParams, AdamState]:
    """Bias-corrected adaptive-moment descent step (returns new values)."""
    t = state.step + 1
    new_params = params.copy()
    new_state = AdamState(
        m_weights=[], m_biases=[], v_weights=[], v_biases=[], step=t
    )
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for kind in ("weights", "biases"):
        ps = getattr(new_params, kind)
        gs = getattr(grads, kind)
        ms = getattr(state, f"m_{kind}")
        vs = getattr(state, f"v_{kind}")
        for i, g in enumerate(gs):
            if g.shape != ps[i].shape:
                raise ValueError(f"gradient shape {g.shape} != parameter shape {ps[i].shape}")
            m = beta1 * ms[i] + (1.0 - beta1) * g
            v = beta2 * vs[i] + (1.0 - beta2) * g**2
            ps[i] = ps[i] - learning_rate * (m / c1) / (np.sqrt(v / c2) + eps)
            getattr(new_state, f"m_{kind}").append(m)
            getattr(new_state, f"v_{kind}").append(v)
    return new_params, new_state


def polyak_update(target: MlpParams, online: MlpParams, tau: float) -> MlpParams:
    """target' = (1 - tau) * target + tau * online, elementwise."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if [w.shape for w in target.weights] != [w.shape for w in online.weights]:
        raise ValueError("target and online networks are not shape-congruent")
    return MlpParams(
        [(1.0 - tau) * tw + tau * ow for tw, ow in zip(target.weights, online.weights)],
        [(1.0 - tau) * tb + tau * ob for tb, ob in zip(target.biases, online.biases)],
        target.hidden_activation,
        target.output_activation,
    )
