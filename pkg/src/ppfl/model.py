"""Small softmax classifiers with hand-written gradients and optimizers.

Parameters always travel as one flat float64 vector (a "param vector") so
privacy mechanisms can treat every model identically. Layout:

* logistic: ``W (input_dim x C)`` row-major, then ``b (C)``
* mlp: ``W1 (input_dim x hidden)``, ``b1 (hidden)``, ``W2 (hidden x C)``, ``b2 (C)``

The MLP uses tanh so the loss is smooth everywhere and finite-difference
gradient checks are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError

MODEL_KINDS = ("logistic", "mlp")
OPTIMIZER_KINDS = ("sgd", "adam")


@dataclass(frozen=True)
class ModelSpec:
    kind: str = "logistic"
    input_dim: int = 20
    num_classes: int = 10
    hidden_dim: int = 32

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigError("; ".join(problems), problems)

    def problems(self):
        out = []
        if self.kind not in MODEL_KINDS:
            out.append(f"model kind must be one of {MODEL_KINDS}, got {self.kind!r}")
        if self.input_dim < 1:
            out.append(f"input_dim must be >= 1, got {self.input_dim}")
        if self.num_classes < 2:
            out.append(f"num_classes must be >= 2, got {self.num_classes}")
        if self.kind == "mlp" and self.hidden_dim < 1:
            out.append(f"hidden_dim must be >= 1 for mlp, got {self.hidden_dim}")
        return out

    @property
    def shapes(self):
        d, c, h = self.input_dim, self.num_classes, self.hidden_dim
        if self.kind == "logistic":
            return [(d, c), (c,)]
        return [(d, h), (h,), (h, c), (c,)]

    @property
    def num_params(self):
        return sum(int(np.prod(s)) for s in self.shapes)

    def unpack(self, params):
        """Split a flat param vector into views shaped per layer."""
        params = np.asarray(params, dtype=np.float64)
        if params.ndim != 1 or params.size != self.num_params:
            raise ConfigError(
                f"param vector has {params.size} entries, model expects {self.num_params}"
            )
        parts, offset = [], 0
        for shape in self.shapes:
            size = int(np.prod(shape))
            parts.append(params[offset : offset + size].reshape(shape))
            offset += size
        return parts


def init_params(spec, rng=None):
    """Zeros for logistic regression; scaled Gaussian weights for the MLP."""
    if spec.kind == "logistic":
        return np.zeros(spec.num_params)
    if rng is None:
        raise InputError("mlp initialisation needs an rng")
    d, h, c = spec.input_dim, spec.hidden_dim, spec.num_classes
    w1 = rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, h))
    w2 = rng.normal(0.0, 1.0 / np.sqrt(h), size=(h, c))
    return np.concatenate([w1.ravel(), np.zeros(h), w2.ravel(), np.zeros(c)])


def _check_features(spec, features):
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != spec.input_dim:
        raise ConfigError(
            f"features must have shape (n, {spec.input_dim}), got {features.shape}"
        )
    return features


def _logits(spec, params, features):
    parts = spec.unpack(params)
    if spec.kind == "logistic":
        w, b = parts
        return features @ w + b, None
    w1, b1, w2, b2 = parts
    hidden = np.tanh(features @ w1 + b1)
    return hidden @ w2 + b2, hidden


def _log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def forward(spec, params, features):
    """Class-probability matrix, one softmax row per example."""
    features = _check_features(spec, features)
    logits, _ = _logits(spec, params, features)
    return np.exp(_log_softmax(logits))


def predict(spec, params, features):
    features = _check_features(spec, features)
    logits, _ = _logits(spec, params, features)
    return logits.argmax(axis=1)


def loss_and_gradient(spec, params, features, labels):
    """Mean cross-entropy over the batch and its gradient w.r.t. ``params``."""
    features = _check_features(spec, features)
    labels = np.asarray(labels, dtype=np.int64)
    n = features.shape[0]
    if n == 0:
        raise InputError("cannot compute a loss on an empty batch")
    if labels.shape != (n,):
        raise InputError(f"expected {n} labels, got shape {labels.shape}")

    logits, hidden = _logits(spec, params, features)
    log_probs = _log_softmax(logits)
    rows = np.arange(n)
    loss = -log_probs[rows, labels].mean()

    dlogits = np.exp(log_probs)
    dlogits[rows, labels] -= 1.0
    dlogits /= n

    if spec.kind == "logistic":
        grads = [features.T @ dlogits, dlogits.sum(axis=0)]
    else:
        _, _, w2, _ = spec.unpack(params)
        dhidden = (dlogits @ w2.T) * (1.0 - hidden**2)
        grads = [
            features.T @ dhidden,
            dhidden.sum(axis=0),
            hidden.T @ dlogits,
            dlogits.sum(axis=0),
        ]
    return float(loss), np.concatenate([g.ravel() for g in grads])


@dataclass
class OptimizerState:
    """SGD or Adam state. Adam defaults follow Kingma & Ba."""

    kind: str = "adam"
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray | None = field(default=None, repr=False)
    v: np.ndarray | None = field(default=None, repr=False)
    step: int = 0

    def __post_init__(self):
        if self.kind not in OPTIMIZER_KINDS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZER_KINDS}, got {self.kind!r}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")


def make_optimizer(kind, learning_rate, num_params):
    state = OptimizerState(kind=kind, learning_rate=learning_rate)
    if kind == "adam":
        state.m = np.zeros(num_params)
        state.v = np.zeros(num_params)
    return state


def optimizer_step(state, params, grad):
    """Apply one update and advance ``state`` in place; returns new params."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if params.shape != grad.shape:
        raise ConfigError(f"grad shape {grad.shape} != params shape {params.shape}")
    state.step += 1
    if state.kind == "sgd":
        return params - state.learning_rate * grad

    if state.m is None:
        state.m = np.zeros_like(params)
        state.v = np.zeros_like(params)
    if state.m.shape != params.shape:
        raise ConfigError("optimizer moments do not match the param vector")
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = state.m / (1.0 - state.beta1**state.step)
    v_hat = state.v / (1.0 - state.beta2**state.step)
    return params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
