"""Trainable-layer descriptors, the Adam optimizer, and loss functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad

__all__ = ["LayerSpec", "OptimizerConfig", "AdamState", "adam_step",
           "bce_loss", "mse_loss"]

BCE_CLAMP = 1e-7


@dataclass
class LayerSpec:
    """One layer in a declarative model description.

    ``kind`` is one of conv | deconv | dense | batchnorm | activation |
    dropout | upsample | reshape | skip_add; ``attrs`` carries the knobs that
    kind needs (filters, kernel, stride, padding, alpha, rate, factor, shape,
    skip source index); ``params`` names the parameter tensors this layer
    owns, unique within a model.
    """
    kind: str
    attrs: dict = field(default_factory=dict)
    params: tuple[str, ...] = ()


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        for name, b in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not 0.0 <= b < 1.0:
                raise ValueError(f"{name} must be in [0,1), got {b}")


class AdamState:
    """First/second moment estimates per parameter plus the step counter."""

    def __init__(self, params: dict[str, np.ndarray]):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def copy(self) -> "AdamState":
        out = AdamState({})
        out.m = {k: v.copy() for k, v in self.m.items()}
        out.v = {k: v.copy() for k, v in self.v.items()}
        out.t = self.t
        return out


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, config: OptimizerConfig
              ) -> tuple[dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update.  Pure: returns fresh params and state.

    m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;
    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
    """
    new_state = state.copy()
    new_state.t = state.t + 1
    t = new_state.t
    b1, b2 = config.beta1, config.beta2
    lr = np.float32(config.learning_rate)
    eps = np.float32(config.eps)
    bc1 = np.float32(1.0 - b1 ** t)
    bc2 = np.float32(1.0 - b2 ** t)
    out = {}
    for name, theta in params.items():
        g = grads[name]
        if g.shape != theta.shape:
            raise ValueError(f"adam_step: gradient shape {g.shape} != parameter "
                             f"shape {theta.shape} for {name!r}")
        m = new_state.m[name]
        v = new_state.v[name]
        m[...] = np.float32(b1) * m + np.float32(1.0 - b1) * g
        v[...] = np.float32(b2) * v + np.float32(1.0 - b2) * (g * g)
        mhat = m / bc1
        vhat = v / bc2
        out[name] = theta - lr * mhat / (np.sqrt(vhat) + eps)
    return out, new_state


def bce_loss(pred: ad.Tensor, target) -> ad.Tensor:
    """Mean binary cross-entropy; predictions clamped to [1e-7, 1-1e-7]."""
    g = pred.graph
    if not isinstance(target, ad.Tensor):
        target = g.leaf(np.asarray(target, dtype=g.dtype))
    if pred.shape != target.shape:
        raise ValueError(f"bce_loss: shape {pred.shape} != {target.shape}")
    p = ad.clip(pred, BCE_CLAMP, 1.0 - BCE_CLAMP)
    t = target
    pos = t * ad.log(p)
    neg = (ad.add(-t, 1.0)) * ad.log(ad.add(-p, 1.0))
    return -(pos + neg).mean()


def mse_loss(pred: ad.Tensor, target) -> ad.Tensor:
    """Mean squared error over all elements."""
    g = pred.graph
    if not isinstance(target, ad.Tensor):
        target = g.leaf(np.asarray(target, dtype=g.dtype))
    if pred.shape != target.shape:
        raise ValueError(f"mse_loss: shape {pred.shape} != {target.shape}")
    d = pred - target
    return (d * d).mean()
