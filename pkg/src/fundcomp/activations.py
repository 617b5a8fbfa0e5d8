"""Pointwise nonlinear activations: rectification, ReLU, adaptive reciprocal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroSignal
from .signal_model import SampledSignal

# |x| may exceed 1 by float rounding when normalized by an estimated sup-norm;
# overshoot up to this much is clamped, anything larger is a domain error.
OVERSHOOT_TOL = 1e-9

ABS = "abs"
RELU = "relu"
ADAPTIVE_RECIPROCAL = "heps"

_KINDS = (ABS, RELU, ADAPTIVE_RECIPROCAL)


@dataclass(frozen=True)
class ActivationSpec:
    kind: str
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown activation kind {self.kind!r}")
        if self.kind == ADAPTIVE_RECIPROCAL:
            if self.epsilon is None or not 0.0 < self.epsilon < 1.0:
                raise ValueError("heps requires epsilon in (0, 1)")
        elif self.epsilon is not None:
            raise ValueError(f"{self.kind} takes no epsilon")

    @classmethod
    def abs(cls) -> "ActivationSpec":
        return cls(ABS)

    @classmethod
    def relu(cls) -> "ActivationSpec":
        return cls(RELU)

    @classmethod
    def adaptive(cls, epsilon: float) -> "ActivationSpec":
        return cls(ADAPTIVE_RECIPROCAL, epsilon)

    @property
    def label(self) -> str:
        if self.kind == ADAPTIVE_RECIPROCAL:
            return f"heps_{self.epsilon:g}"
        return self.kind


def h_eps(x, epsilon: float):
    """Adaptive reciprocal activation 1 / (1 - (1 - eps)|x|) on [-1, 1]."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    ax = np.abs(np.asarray(x, dtype=np.float64))
    if np.any(ax > 1.0 + OVERSHOOT_TOL):
        worst = float(np.max(ax))
        raise DomainError(f"|x| = {worst} exceeds 1 beyond tolerance")
    ax = np.minimum(ax, 1.0)
    out = 1.0 / (1.0 - (1.0 - epsilon) * ax)
    return float(out) if np.ndim(x) == 0 else out


def apply(spec: ActivationSpec, signal: SampledSignal,
          norm: float | None = None) -> SampledSignal:
    """Apply an activation per sample, preserving rate and start time.

    For the adaptive reciprocal, `norm` is the normalization of the input
    (defaults to the sample max); inject the analytic sup-norm when available.
    """
    x = signal.samples
    if spec.kind == ABS:
        y = np.abs(x)
    elif spec.kind == RELU:
        y = np.maximum(x, 0.0)
    else:
        if norm is None:
            norm = float(np.max(np.abs(x)))
        if norm <= 0.0:
            raise ZeroSignal("adaptive reciprocal needs a nonzero normalization")
        y = h_eps(x / norm, spec.epsilon)
    return SampledSignal(y, signal.sample_rate, signal.start_time)
