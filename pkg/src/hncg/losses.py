"""Adversarial and reconstruction loss kernels.

Pure numeric formulas over batches of discriminator outputs and sample
vectors; no networks, gradients, or training loops live here.  Expectations
are arithmetic means over the batch; L1 terms are normalized per element so
values stay dimension-independent.  Probabilities are clamped to
[EPS, 1 - EPS] before taking logs.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

EPS = 1e-7


def _prob_batch(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValidationError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return np.clip(arr, EPS, 1.0 - EPS)


def _sample_batch(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError(f"{name} must not be empty")
    return arr.reshape(len(arr), -1)


def gan_value(d_real, d_fake) -> float:
    """Minimax game value: E[log D(x)] + E[log(1 - D(G(z)))]."""
    real = _prob_batch(d_real, "d_real")
    fake = _prob_batch(d_fake, "d_fake")
    return float(np.mean(np.log(real)) + np.mean(np.log(1.0 - fake)))


def cgan_value(d_real_given_y, d_fake_given_y) -> float:
    """Conditional variant; numerically identical with conditioned outputs."""
    return gan_value(d_real_given_y, d_fake_given_y)


def cycle_consistency_loss(x, x_rec, y, y_rec) -> float:
    """Mean-per-element L1 of both reconstruction directions, summed."""
    x = _sample_batch(x, "x")
    x_rec = _sample_batch(x_rec, "x_rec")
    y = _sample_batch(y, "y")
    y_rec = _sample_batch(y_rec, "y_rec")
    if x.shape != x_rec.shape:
        raise ValidationError(f"shape mismatch: x {x.shape} vs x_rec {x_rec.shape}")
    if y.shape != y_rec.shape:
        raise ValidationError(f"shape mismatch: y {y.shape} vs y_rec {y_rec.shape}")
    return float(np.mean(np.abs(x_rec - x)) + np.mean(np.abs(y_rec - y)))


def cycle_gan_total_loss(gan_xy: float, gan_yx: float, cyc: float, lam: float) -> float:
    """Total objective: both adversarial terms plus lam times the cycle term."""
    return float(gan_xy + gan_yx + lam * cyc)


def gp_gan_loss(l2: float, adv: float, lam: float = 0.999) -> float:
    """Convex combination lam*l2 + (1-lam)*adv; lam defaults to 0.999."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValidationError("lambda must lie in [0, 1]")
    return float(lam * l2 + (1.0 - lam) * adv)
