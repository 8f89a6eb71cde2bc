"""PNG/PPM image I/O and gamma helpers.

Conventions:
  * class-id images persist as 8-bit single-channel PNG (raw ids)
  * color images persist as 8-bit RGB PNG; values in [0, 1] scale by 255
  * rendered radiance is linear; it is clamped and gamma-encoded (2.2)
    only when exported (write_render / write_render_rgba)
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from .errors import ValidationError
from .scene import Texture

GAMMA = 2.2


def encode_gamma(linear: np.ndarray) -> np.ndarray:
    """Clamp linear radiance to [0, 1] and gamma-encode for display."""
    return np.clip(linear, 0.0, 1.0) ** (1.0 / GAMMA)


def to_uint8(img01: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img01) * 255.0), 0, 255).astype(np.uint8)


def from_uint8(raw: np.ndarray) -> np.ndarray:
    return raw.astype(np.float64) / 255.0


def write_png_rgb(path, img01: np.ndarray) -> None:
    """Write an RGB image with channels already in display space [0, 1]."""
    arr = to_uint8(img01)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError("expected an (H, W, 3) image")
    Image.fromarray(arr, mode="RGB").save(str(path), format="PNG")


def write_png_gray(path, ids: np.ndarray) -> None:
    """Write a single-channel 8-bit image (raw class ids or masks)."""
    arr = np.asarray(ids)
    if arr.ndim != 2:
        raise ValidationError("expected an (H, W) single-channel image")
    Image.fromarray(arr.astype(np.uint8), mode="L").save(str(path), format="PNG")


def write_render(path, linear_rgb: np.ndarray) -> None:
    """Export linear radiance as gamma-encoded RGB PNG."""
    write_png_rgb(path, encode_gamma(linear_rgb))


def write_render_rgba(path, linear_rgb: np.ndarray, alpha: np.ndarray) -> None:
    """Export a partial render: gamma-encoded RGB plus 255*coverage alpha."""
    rgb = to_uint8(encode_gamma(linear_rgb))
    a = (np.asarray(alpha) > 0).astype(np.uint8) * 255
    arr = np.dstack([rgb, a])
    Image.fromarray(arr, mode="RGBA").save(str(path), format="PNG")


def read_png_rgb(path) -> np.ndarray:
    """Read an RGB(A) PNG as float (H, W, 3) in [0, 1]; alpha is dropped."""
    try:
        img = Image.open(str(path))
    except FileNotFoundError:
        raise ValidationError(f"missing image file {path}") from None
    except Exception as exc:
        raise ValidationError(f"unreadable image file {path}: {exc}") from None
    with img:
        return from_uint8(np.asarray(img.convert("RGB"), dtype=np.uint8))


def read_png_gray(path) -> np.ndarray:
    """Read a single-channel 8-bit PNG as uint8 (H, W); ids preserved exactly."""
    try:
        img = Image.open(str(path))
    except FileNotFoundError:
        raise ValidationError(f"missing image file {path}") from None
    except Exception as exc:
        raise ValidationError(f"unreadable image file {path}: {exc}") from None
    with img:
        if img.mode != "L":
            raise ValidationError(
                f"{path}: expected single-channel 8-bit PNG, got mode {img.mode}"
            )
        return np.asarray(img, dtype=np.uint8)


def read_texture(path: Union[str, Path], mode: str = "bilinear") -> Texture:
    """Load a texture from 8-bit RGB PNG or binary PPM (P6)."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise ValidationError(f"missing texture file {path}") from None
    if raw[:2] == b"P6":
        return Texture(from_uint8(_parse_ppm(raw, path)), mode=mode)
    try:
        with Image.open(str(path)) as img:
            data = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except Exception as exc:
        raise ValidationError(f"unreadable texture file {path}: {exc}") from None
    return Texture(from_uint8(data), mode=mode)


def _parse_ppm(raw: bytes, path) -> np.ndarray:
    # binary PPM: "P6\n<w> <h>\n<maxval>\n" then w*h*3 bytes
    fields: list = []
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        fields.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        w, h, maxval = (int(f) for f in fields)
    except ValueError:
        raise ValidationError(f"malformed PPM header in {path}") from None
    if maxval != 255:
        raise ValidationError(f"{path}: only 8-bit PPM supported")
    data = np.frombuffer(raw, dtype=np.uint8, count=w * h * 3, offset=pos)
    if data.size != w * h * 3:
        raise ValidationError(f"{path}: truncated PPM payload")
    return data.reshape(h, w, 3)
