"""Blending of synthesized background and partially rendered foreground.

Four operators share the CLI mode names `alpha`, `pyramid`, `gp-classical`,
and `gan-plug`:

  * alpha_blend weights the background by the mask (alpha = 1 keeps the
    background, alpha = 0 keeps the foreground); coverage_to_alpha bridges
    a partial render's coverage to that orientation,
  * pyramid_blend blends Laplacian levels with the Gaussian pyramid of the
    mask; note the mask weights the FOREGROUND here, the opposite
    orientation, so callers pass coverage rather than 1 - coverage,
  * poisson_blend is the classical gradient-domain counterpart of a
    blending GAN: it solves the Poisson equation inside the pasted region
    with Dirichlet boundary values from the background,
  * external_gan_blend hands a naive copy-paste composite and its mask to
    an external blending model via the plug protocol.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import imgio
from .errors import ConvergenceError, ValidationError
from .plug import PlugConfig, check_dims, run_plug
from .render import PartialRender

PYRAMID_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
DEFAULT_LEVELS = 4


def _check_unit(img: np.ndarray, name: str) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.size and (img.min() < 0.0 or img.max() > 1.0):
        raise ValidationError(f"{name} values must lie in [0, 1]")
    return img


def _check_same_hw(a, b, what: str):
    if a.shape[:2] != b.shape[:2]:
        raise ValidationError(f"dimension mismatch in {what}: {a.shape[:2]} vs {b.shape[:2]}")


def _mask_like(mask: np.ndarray, img: np.ndarray) -> np.ndarray:
    return mask[..., None] if img.ndim == 3 else mask


def coverage_to_alpha(pr: PartialRender) -> np.ndarray:
    """Background-weighting mask: 1 - coverage, so foreground shows where covered."""
    return 1.0 - pr.alpha.astype(np.float64)


def alpha_blend(background: np.ndarray, foreground: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Per-pixel convex combination mask*background + (1-mask)*foreground."""
    background = _check_unit(background, "background")
    foreground = _check_unit(foreground, "foreground")
    mask = _check_unit(mask, "mask")
    _check_same_hw(background, foreground, "alpha_blend")
    _check_same_hw(background, mask, "alpha_blend")
    m = _mask_like(mask, background)
    return m * background + (1.0 - m) * foreground


# ---------------------------------------------------------------------------
# Pyramids


def _blur1d(img: np.ndarray, axis: int) -> np.ndarray:
    padded = np.pad(img, [(2, 2) if a == axis else (0, 0) for a in range(img.ndim)], mode="edge")
    out = np.zeros_like(img)
    sl = [slice(None)] * img.ndim
    n = img.shape[axis]
    for k, w in enumerate(PYRAMID_KERNEL):
        sl[axis] = slice(k, k + n)
        out += w * padded[tuple(sl)]
    return out


def _down(img: np.ndarray) -> np.ndarray:
    pad = [(0, img.shape[0] % 2), (0, img.shape[1] % 2)] + [(0, 0)] * (img.ndim - 2)
    img = np.pad(img, pad, mode="edge")
    img = _blur1d(_blur1d(img, 0), 1)
    return img[::2, ::2]


def _up1d(img: np.ndarray, axis: int) -> np.ndarray:
    # polyphase zero-stuff + gain-2 binomial filter with edge clamping
    n = img.shape[axis]
    idx_m = np.maximum(np.arange(n) - 1, 0)
    idx_p = np.minimum(np.arange(n) + 1, n - 1)
    gm = np.take(img, idx_m, axis=axis)
    gp = np.take(img, idx_p, axis=axis)
    even = (gm + 6.0 * img + gp) / 8.0
    odd = (img + gp) / 2.0
    shape = list(img.shape)
    shape[axis] = 2 * n
    out = np.empty(shape, dtype=img.dtype)
    sl_even = [slice(None)] * img.ndim
    sl_odd = [slice(None)] * img.ndim
    sl_even[axis] = slice(0, 2 * n, 2)
    sl_odd[axis] = slice(1, 2 * n, 2)
    out[tuple(sl_even)] = even
    out[tuple(sl_odd)] = odd
    return out


def _up(img: np.ndarray, target_hw) -> np.ndarray:
    out = _up1d(_up1d(img, 0), 1)
    return out[: target_hw[0], : target_hw[1]]


def _check_levels(img: np.ndarray, levels: int) -> int:
    levels = int(levels)
    if levels < 1:
        raise ValidationError("levels must be >= 1")
    limit = math.floor(math.log2(min(img.shape[0], img.shape[1])))
    if levels > 1 and levels > limit:
        raise ValidationError(f"levels too deep: {levels} > {limit} for {img.shape[:2]}")
    return levels


def gaussian_pyramid(img: np.ndarray, levels: int) -> list:
    """[G0=img, G1, ...]: repeated blur-and-halve with a 5-tap binomial filter."""
    img = np.asarray(img, dtype=np.float64)
    levels = _check_levels(img, levels)
    out = [img]
    for _ in range(levels - 1):
        out.append(_down(out[-1]))
    return out


def laplacian_pyramid(img: np.ndarray, levels: int) -> list:
    """Band-pass stack: L_k = G_k - up(G_{k+1}); the last level is G_{levels-1}."""
    gp = gaussian_pyramid(img, levels)
    out = [gp[k] - _up(gp[k + 1], gp[k].shape[:2]) for k in range(len(gp) - 1)]
    out.append(gp[-1])
    return out


def collapse_pyramid(lap: list) -> np.ndarray:
    """Exact inverse of laplacian_pyramid up to float rounding."""
    if not lap:
        raise ValidationError("empty pyramid")
    acc = lap[-1]
    for k in range(len(lap) - 2, -1, -1):
        acc = lap[k] + _up(acc, lap[k].shape[:2])
    return acc


def pyramid_blend(background: np.ndarray, foreground: np.ndarray, mask: np.ndarray,
                  levels: int = DEFAULT_LEVELS) -> np.ndarray:
    """Multi-band blend: per level mask_k*foreground_k + (1-mask_k)*background_k.

    The mask weights the foreground (pass coverage, not 1 - coverage).  At
    levels = 1 this reduces algebraically to alpha_blend with 1 - mask.
    """
    background = _check_unit(background, "background")
    foreground = _check_unit(foreground, "foreground")
    mask = _check_unit(mask, "mask")
    _check_same_hw(background, foreground, "pyramid_blend")
    _check_same_hw(background, mask, "pyramid_blend")
    la = laplacian_pyramid(foreground, levels)
    lb = laplacian_pyramid(background, levels)
    gm = gaussian_pyramid(mask, levels)
    blended = [
        _mask_like(gm[k], la[k]) * la[k] + (1.0 - _mask_like(gm[k], la[k])) * lb[k]
        for k in range(len(la))
    ]
    return np.clip(collapse_pyramid(blended), 0.0, 1.0)


# ---------------------------------------------------------------------------
# Copy-paste and Poisson


def copy_paste_composite(background: np.ndarray, pr: PartialRender) -> np.ndarray:
    """Naive composite: foreground pixels where covered, background elsewhere."""
    background = _check_unit(background, "background")
    _check_same_hw(background, pr.rgb, "copy_paste_composite")
    fg = np.clip(pr.rgb, 0.0, 1.0)
    cov = _mask_like(pr.coverage, background)
    return np.where(cov, fg, background)


def _neighbor_tables(coverage: np.ndarray):
    omega = coverage.astype(bool)
    ys, xs = np.nonzero(omega)
    idx = np.full(omega.shape, -1, dtype=np.int64)
    idx[omega] = np.arange(len(ys))
    nbr_idx, nbr_in = [], []
    for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ny, nx = ys + dy, xs + dx
        nbr_in.append(omega[ny, nx])
        nbr_idx.append(np.maximum(idx[ny, nx], 0))
    return omega, ys, xs, nbr_idx, nbr_in


def poisson_blend(background: np.ndarray, foreground: np.ndarray, coverage: np.ndarray,
                  max_iters: Optional[int] = None, tol: float = 1e-8) -> np.ndarray:
    """Gradient-domain composite over the covered region.

    Solves lap(f) = div(grad(foreground)) inside the region with f equal to
    the background on the border, per channel, by conjugate gradient on the
    5-point Laplacian.  The region must sit strictly inside the image
    border.  Output equals the background outside the region bit-exactly.
    """
    background = _check_unit(background, "background")
    foreground = _check_unit(foreground, "foreground")
    _check_same_hw(background, foreground, "poisson_blend")
    coverage = np.asarray(coverage)
    _check_same_hw(background, coverage, "poisson_blend")
    if not np.isin(coverage, (0, 1)).all():
        raise ValidationError("coverage must be binary")
    if coverage[0, :].any() or coverage[-1, :].any() or coverage[:, 0].any() or coverage[:, -1].any():
        raise ValidationError("coverage region must lie strictly inside the image border")

    omega, ys, xs, nbr_idx, nbr_in = _neighbor_tables(coverage)
    n = len(ys)
    out = background.copy()
    if n == 0:
        return out
    if max_iters is None:
        max_iters = int(math.ceil(10.0 * math.sqrt(n)))

    def apply_lap(x):
        acc = 4.0 * x
        for k in range(4):
            acc -= np.where(nbr_in[k], x[nbr_idx[k]], 0.0)
        return acc

    channels = 1 if background.ndim == 2 else background.shape[2]
    for c in range(channels):
        bg = background if background.ndim == 2 else background[:, :, c]
        fg = foreground if foreground.ndim == 2 else foreground[:, :, c]
        rhs = 4.0 * fg[ys, xs]
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            rhs -= fg[ys + dy, xs + dx]
        for k, (dy, dx) in enumerate(((-1, 0), (1, 0), (0, -1), (0, 1))):
            rhs += np.where(nbr_in[k], 0.0, bg[ys + dy, xs + dx])

        x = fg[ys, xs].copy()
        r = rhs - apply_lap(x)
        r0 = float(np.linalg.norm(r))
        if r0 > 0.0:
            p = r.copy()
            rs = float(r @ r)
            for _ in range(max_iters):
                ap = apply_lap(p)
                alpha = rs / float(p @ ap)
                x += alpha * p
                r -= alpha * ap
                rs_new = float(r @ r)
                if math.sqrt(rs_new) <= tol * r0:
                    break
                p = r + (rs_new / rs) * p
                rs = rs_new
            else:
                raise ConvergenceError(
                    f"poisson solve: residual {math.sqrt(rs):.3e} above {tol:.1e}*{r0:.3e} "
                    f"after {max_iters} iterations"
                )
        if background.ndim == 2:
            out[ys, xs] = np.clip(x, 0.0, 1.0)
        else:
            out[ys, xs, c] = np.clip(x, 0.0, 1.0)
    return out


def external_gan_blend(composite: np.ndarray, coverage: np.ndarray, plug: PlugConfig) -> np.ndarray:
    """Refine a copy-paste composite with an external blending model.

    Writes the composite PNG to {in} and the coverage mask PNG to {mask};
    reads an RGB PNG of equal dimensions from {out}.
    """
    composite = _check_unit(composite, "composite")
    coverage = np.asarray(coverage)
    _check_same_hw(composite, coverage, "external_gan_blend")
    if "{mask}" not in plug.command:
        raise ValidationError("blend plug command must contain the {mask} placeholder")

    def write_inputs(tmpdir):
        in_path = tmpdir / "in_composite.png"
        mask_path = tmpdir / "in_mask.png"
        imgio.write_png_rgb(in_path, composite)
        imgio.write_png_gray(mask_path, (coverage > 0).astype(np.uint8) * 255)
        return {"{in}": str(in_path), "{mask}": str(mask_path)}

    def read_output(out_path):
        rgb = imgio.read_png_rgb(out_path)
        check_dims(rgb.shape, composite.shape[:2], "blended image")
        return rgb

    return run_plug(plug, write_inputs, read_output)
