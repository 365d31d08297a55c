"""Minimal dense-network engine: init, forward with tape, exact backprop, Adam.

Everything is float64 numpy. Hidden layers use tanh (default) or relu, the
output layer is always linear. The forward pass records pre-activations and
activations on a GradientTape; the backward pass replays them to produce
exact reverse-mode parameter gradients for whatever scalar loss supplied
the output gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

ACTIVATIONS = ("tanh", "relu")


@dataclass
class Mlp:
    """A fully connected network. weights[l] has shape (out, in)."""

    layer_widths: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "tanh"


@dataclass
class GradientTape:
    """Forward-pass record: layer inputs and hidden pre-activations."""

    inputs: list[np.ndarray] = field(default_factory=list)
    pre_acts: list[np.ndarray] = field(default_factory=list)


@dataclass
class AdamState:
    """First/second moment buffers plus hyperparameters."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    step_count: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def init(cls, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        if not 0.0 < lr:
            raise ConfigError("lr must be positive")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ConfigError("betas must lie in [0, 1)")
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
            lr=lr, beta1=beta1, beta2=beta2, eps=eps,
        )


def mlp_init(layer_widths, activation="tanh", seed=0) -> Mlp:
    """Glorot-uniform weights, zero biases, fully determined by the seed."""
    widths = [int(w) for w in layer_widths]
    if len(widths) < 2 or any(w < 1 for w in widths):
        raise ConfigError(f"need >= 2 positive layer widths, got {layer_widths}")
    if activation not in ACTIVATIONS:
        raise ConfigError(f"unknown activation {activation!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(widths, weights, biases, activation)


def mlp_forward(net: Mlp, batch):
    """Forward pass over a (B, d_in) batch. Returns (output, tape)."""
    a = np.asarray(batch, dtype=float)
    if a.ndim != 2 or a.shape[1] != net.layer_widths[0]:
        raise ShapeError(
            f"batch must be (B, {net.layer_widths[0]}), got {np.shape(batch)}")
    tape = GradientTape()
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        tape.inputs.append(a)
        z = a @ w.T + b
        if l == last:
            return z, tape
        tape.pre_acts.append(z)
        a = np.tanh(z) if net.activation == "tanh" else np.maximum(z, 0.0)
    raise ConfigError("network has no layers")  # unreachable for valid nets


def mlp_params(net: Mlp):
    """Flat parameter list [W1, b1, W2, b2, ...]."""
    out = []
    for w, b in zip(net.weights, net.biases):
        out.append(w)
        out.append(b)
    return out


def mlp_set_params(net: Mlp, params):
    """Write a flat parameter list (as from mlp_params) back into the net."""
    if len(params) != 2 * len(net.weights):
        raise ShapeError("parameter list length mismatch")
    for l in range(len(net.weights)):
        w, b = params[2 * l], params[2 * l + 1]
        if w.shape != net.weights[l].shape or b.shape != net.biases[l].shape:
            raise ShapeError("parameter shape mismatch")
        net.weights[l] = w
        net.biases[l] = b


def mlp_param_count(net: Mlp) -> int:
    return sum(w.size + b.size for w, b in zip(net.weights, net.biases))


def mlp_backward(net: Mlp, tape: GradientTape, output_grad):
    """Exact reverse-mode gradients. Returns a flat list matching mlp_params.

    output_grad is dLoss/dOutput of shape (B, d_out); the tape must come
    from the matching forward pass.
    """
    delta = np.asarray(output_grad, dtype=float)
    n_layers = len(net.weights)
    if len(tape.inputs) != n_layers or len(tape.pre_acts) != n_layers - 1:
        raise ShapeError("tape does not match network depth")
    if delta.shape != (tape.inputs[0].shape[0], net.layer_widths[-1]):
        raise ShapeError(
            f"output_grad must be (B, {net.layer_widths[-1]}), got {delta.shape}")
    grads = [None] * (2 * n_layers)
    for l in range(n_layers - 1, -1, -1):
        if l < n_layers - 1:
            # inputs[l + 1] is hidden layer l's activation output, so the
            # activation derivative comes free: tanh' = 1 - a^2, relu' = a > 0.
            a_out = tape.inputs[l + 1]
            if net.activation == "tanh":
                delta = delta * (1.0 - a_out * a_out)
            else:
                delta = delta * (a_out > 0.0)
        grads[2 * l] = delta.T @ tape.inputs[l]
        grads[2 * l + 1] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ net.weights[l]
    return grads


def mse_loss(pred, target):
    """Mean squared error and its gradient 2 (pred - target) / count."""
    p = np.asarray(pred, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape != t.shape:
        raise ShapeError(f"pred {p.shape} vs target {t.shape}")
    diff = p - t
    return float(np.mean(diff * diff)), (2.0 / diff.size) * diff


def adam_step(params, grads, state: AdamState):
    """One bias-corrected Adam update. Returns (new_params, new_state).

    Purely functional: inputs are left untouched, so identical calls with
    identical arguments give identical results. Each parameter's update
    depends only on its own gradient history.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError("params, grads, and state must have equal lengths")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter {p.shape}")
    t = state.step_count + 1
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        step = state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
        new_p.append(p - step)
        new_m.append(m)
        new_v.append(v)
    return new_p, AdamState(new_m, new_v, t, state.lr, state.beta1, state.beta2, state.eps)
