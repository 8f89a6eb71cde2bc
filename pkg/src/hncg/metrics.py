"""Evaluation: semantic retention and Fréchet distance over feature sets.

Retention is top-1 pixel accuracy of a segmentation of the output image
against the conditioning layout (the layout is the ground truth); void
pixels (id 0) are ignored by default.

The Fréchet distance between Gaussian fits (mu, C) of two feature sets is

    d^2 = ||mu1 - mu2||^2 + Tr(C1 + C2 - 2*sqrt(C1 C2))

computed through the symmetric form sqrt(sqrt(C1) C2 sqrt(C1)) so only
symmetric eigendecompositions are needed.  Eigenvalues in [-1e-8, 0) count
as rounding noise and clamp to zero; anything lower signals an invalid
covariance.

Feature files: magic "HNCGFEAT", uint32 N, uint32 D (little-endian), then
N*D little-endian float32 values, row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import imgio
from .errors import CovarianceError, ValidationError
from .plug import PlugConfig, check_dims, run_plug
from .raster import SemanticImage

FEATURE_MAGIC = b"HNCGFEAT"
FEATURE_DIM = 256
EIG_FLOOR = -1e-8


def semantic_retention(layout: SemanticImage, predicted: SemanticImage,
                       ignore_ids: Iterable[int] = (0,)) -> float:
    """Fraction of non-ignored pixels whose predicted id matches the layout."""
    if layout.ids.shape != predicted.ids.shape:
        raise ValidationError(
            f"dimension mismatch: {layout.ids.shape} vs {predicted.ids.shape}"
        )
    ignore = np.asarray(sorted(set(int(i) for i in ignore_ids)), dtype=np.int64)
    counted = ~np.isin(layout.ids, ignore)
    total = int(counted.sum())
    if total == 0:
        raise ValidationError("empty evaluation set: every pixel is ignored")
    agree = int(np.count_nonzero((layout.ids == predicted.ids) & counted))
    return agree / total


class FeatureStats:
    """Mean vector and symmetric covariance of a feature set."""

    def __init__(self, mean: np.ndarray, cov: np.ndarray):
        mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(cov, dtype=np.float64)
        if cov.shape != (len(mean), len(mean)):
            raise ValidationError(f"covariance shape {cov.shape} does not match mean {mean.shape}")
        if cov.size and float(np.abs(cov - cov.T).max()) > 1e-10:
            raise ValidationError("covariance must be symmetric")
        self.mean = mean
        self.cov = (cov + cov.T) / 2.0

    @property
    def dim(self) -> int:
        return len(self.mean)


def feature_stats(features: np.ndarray) -> FeatureStats:
    """Column means and unbiased (N-1) sample covariance, symmetrized."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] < 2:
        raise ValidationError("feature matrix must be (N, D) with N >= 2")
    mean = f.mean(axis=0)
    centered = f - mean
    cov = centered.T @ centered / (f.shape[0] - 1)
    return FeatureStats(mean, (cov + cov.T) / 2.0)


def _sqrt_psd(mat: np.ndarray, what: str) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    if float(w.min(initial=0.0)) < EIG_FLOOR:
        raise CovarianceError(f"{what}: eigenvalue {float(w.min()):.3e} below {EIG_FLOOR:.0e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def frechet_distance(s1: FeatureStats, s2: FeatureStats) -> float:
    """Squared Fréchet distance between two Gaussian fits; always >= 0."""
    if s1.dim != s2.dim:
        raise ValidationError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    root1 = _sqrt_psd(s1.cov, "first covariance")
    inner = root1 @ s2.cov @ root1
    inner = (inner + inner.T) / 2.0
    w = np.linalg.eigvalsh(inner)
    if float(w.min(initial=0.0)) < EIG_FLOOR:
        raise CovarianceError(f"second covariance: eigenvalue {float(w.min()):.3e} below {EIG_FLOOR:.0e}")
    trace_sqrt = float(np.sqrt(np.clip(w, 0.0, None)).sum())
    delta = s1.mean - s2.mean
    d2 = float(delta @ delta) + float(np.trace(s1.cov)) + float(np.trace(s2.cov)) - 2.0 * trace_sqrt
    return max(d2, 0.0)


def fid_between_sets(a: np.ndarray, b: np.ndarray) -> float:
    """Fréchet distance between Gaussian fits of two feature matrices."""
    return frechet_distance(feature_stats(a), feature_stats(b))


# ---------------------------------------------------------------------------
# Feature extraction


def stub_features(img: np.ndarray) -> np.ndarray:
    """Deterministic 256-D stand-in for a deep feature extractor.

    Concatenates 64-bin normalized histograms per RGB channel (192) with an
    8x8 box-downsampled luma grid (64).
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValidationError("expected an (H, W, 3) image")
    h, w = img.shape[:2]
    feats = []
    for c in range(3):
        bins = np.clip((img[:, :, c] * 64).astype(np.int64), 0, 63)
        hist = np.bincount(bins.reshape(-1), minlength=64).astype(np.float64)
        feats.append(hist / (h * w))
    luma = 0.299 * img[:, :, 0] + 0.587 * img[:, :, 1] + 0.114 * img[:, :, 2]
    feats.append(_box_down(luma, 8).reshape(-1))
    return np.concatenate(feats)


def _box_down(img2d: np.ndarray, out: int) -> np.ndarray:
    h, w = img2d.shape
    result = np.zeros((out, out), dtype=np.float64)
    yb = np.floor(np.arange(out + 1) * h / out).astype(int)
    xb = np.floor(np.arange(out + 1) * w / out).astype(int)
    for i in range(out):
        y0, y1 = yb[i], max(yb[i + 1], yb[i] + 1)
        y0 = min(y0, h - 1)
        for j in range(out):
            x0, x1 = xb[j], max(xb[j + 1], xb[j] + 1)
            x0 = min(x0, w - 1)
            result[i, j] = img2d[y0:y1, x0:x1].mean()
    return result


def features_of_images(images: Iterable[np.ndarray]) -> np.ndarray:
    """Stack stub features of an image collection into an (N, D) matrix."""
    rows = [stub_features(img) for img in images]
    if not rows:
        raise ValidationError("no images given")
    return np.stack(rows)


# ---------------------------------------------------------------------------
# External segmentation plug


def external_segment(img: np.ndarray, plug: PlugConfig) -> SemanticImage:
    """Segment an RGB image with an external model; reads a raw-id PNG back."""
    img = np.asarray(img, dtype=np.float64)

    def write_inputs(tmpdir):
        in_path = tmpdir / "in_rgb.png"
        imgio.write_png_rgb(in_path, img)
        return {"{in}": str(in_path)}

    def read_output(out_path):
        ids = imgio.read_png_gray(out_path)
        check_dims(ids.shape, img.shape[:2], "segmentation")
        return SemanticImage(ids)

    return run_plug(plug, write_inputs, read_output)


# ---------------------------------------------------------------------------
# Feature file format


def write_features(path, features: np.ndarray) -> None:
    """Write an (N, D) feature matrix in the HNCGFEAT binary format."""
    f = np.asarray(features, dtype=np.float32)
    if f.ndim != 2:
        raise ValidationError("feature matrix must be 2-D")
    n, d = f.shape
    payload = FEATURE_MAGIC + struct.pack("<II", n, d) + f.astype("<f4").tobytes(order="C")
    Path(path).write_bytes(payload)


def read_features(path) -> np.ndarray:
    """Read an HNCGFEAT file back into an (N, D) float32 matrix."""
    raw = Path(path).read_bytes()
    if raw[:8] != FEATURE_MAGIC:
        raise ValidationError(f"{path}: bad magic, not a feature file")
    if len(raw) < 16:
        raise ValidationError(f"{path}: truncated header")
    n, d = struct.unpack("<II", raw[8:16])
    expected = 16 + 4 * n * d
    if len(raw) != expected:
        raise ValidationError(f"{path}: expected {expected} bytes, got {len(raw)}")
    return np.frombuffer(raw[16:], dtype="<f4").reshape(n, d).copy()


def load_feature_source(path, pattern: str = "*.png") -> np.ndarray:
    """Features from a path: HNCGFEAT file directly, or a directory of PNGs."""
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob(pattern))
        if not files:
            raise ValidationError(f"no {pattern} images in {p}")
        return features_of_images(imgio.read_png_rgb(f) for f in files).astype(np.float32)
    return read_features(p)
