"""Semantic-image-to-RGB synthesis.

Three routes:
  * stub_synthesize: deterministic stand-in for a neural synthesizer
    (palette color plus counter-hash noise), good enough to exercise the
    whole pipeline and exactly declassifiable at low noise amplitudes,
  * external_synthesize: the subprocess plug protocol for real models,
  * spade_denorm: the spatially-adaptive denormalization kernel used by
    such models, exposed as a tested numeric primitive.
"""

from __future__ import annotations

import numpy as np

from . import imgio
from .errors import ValidationError
from .plug import PlugConfig, check_dims, run_plug
from .raster import SemanticImage, colorize_semantic
from .scene import ClassPalette


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """Counter-based 64-bit mix; platform-independent integer arithmetic."""
    x = (x + np.uint64(0x9E3779B97F4A7C15)).astype(np.uint64)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def hash_noise(seed: int, height: int, width: int, channels: int = 3) -> np.ndarray:
    """Deterministic uniform noise in [-1, 1), keyed on (seed, x, y, channel)."""
    ys, xs, cs = np.meshgrid(
        np.arange(height, dtype=np.uint64),
        np.arange(width, dtype=np.uint64),
        np.arange(channels, dtype=np.uint64),
        indexing="ij",
    )
    counter = xs | (ys << np.uint64(20)) | (cs << np.uint64(40))
    state = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ counter)
    u = (state >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
    return 2.0 * u - 1.0


def stub_synthesize(m: SemanticImage, palette: ClassPalette, seed: int,
                    noise_amp: float = 0.05) -> np.ndarray:
    """Deterministic synthesizer: class color plus hash noise, clamped to [0, 1].

    Nearest-palette-color declassification recovers the input ids exactly
    whenever noise_amp is below half the minimum pairwise palette distance.
    """
    noise_amp = float(noise_amp)
    if not 0.0 <= noise_amp < 0.5:
        raise ValidationError("noise_amp must lie in [0, 0.5)")
    base = colorize_semantic(m, palette)
    if noise_amp == 0.0:
        return base
    noise = hash_noise(seed, m.height, m.width) * noise_amp
    return np.clip(base + noise, 0.0, 1.0)


def external_synthesize(m: SemanticImage, palette: ClassPalette, plug: PlugConfig) -> np.ndarray:
    """Run an external synthesizer over a semantic image.

    Writes the labels both ways (raw ids at {in}, color-coded at {in_color},
    always side by side) so adapters can pick the encoding their model
    expects; reads an RGB PNG of equal dimensions from {out}.
    """
    color = colorize_semantic(m, palette)

    def write_inputs(tmpdir):
        ids_path = tmpdir / "in_ids.png"
        color_path = tmpdir / "in_color.png"
        imgio.write_png_gray(ids_path, m.ids)
        imgio.write_png_rgb(color_path, color)
        return {"{in}": str(ids_path), "{in_color}": str(color_path)}

    def read_output(out_path):
        rgb = imgio.read_png_rgb(out_path)
        check_dims(rgb.shape, (m.height, m.width), "synthesized image")
        return rgb

    return run_plug(plug, write_inputs, read_output)


def spade_denorm(h: np.ndarray, gamma: np.ndarray, beta: np.ndarray,
                 mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Spatially-adaptive denormalization of activations.

    h: (N, C, Y, X); gamma, beta: (C, Y, X) layout-derived modulation grids;
    mu, sigma: per-channel statistics (sigma > 0).  Returns
    gamma * (h - mu) / sigma + beta with shape preserved.
    """
    h = np.asarray(h, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64).reshape(-1)
    sigma = np.asarray(sigma, dtype=np.float64).reshape(-1)
    if h.ndim != 4:
        raise ValidationError("activations must be (N, C, Y, X)")
    n, c, y, x = h.shape
    if gamma.shape != (c, y, x) or beta.shape != (c, y, x):
        raise ValidationError("gamma/beta must be (C, Y, X) matching the activations")
    if mu.shape != (c,) or sigma.shape != (c,):
        raise ValidationError("mu/sigma must be per-channel vectors")
    if np.any(sigma <= 0.0):
        raise ValidationError("sigma must be positive for every channel")
    mu_b = mu[None, :, None, None]
    sigma_b = sigma[None, :, None, None]
    return gamma[None] * ((h - mu_b) / sigma_b) + beta[None]


def channel_stats(h: np.ndarray):
    """Per-channel mean and (population) std over the N, Y, X axes."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 4:
        raise ValidationError("activations must be (N, C, Y, X)")
    mu = h.mean(axis=(0, 2, 3))
    sigma = h.std(axis=(0, 2, 3))
    return mu, sigma
