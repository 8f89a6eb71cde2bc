"""Semantic rasterization: z-buffered class-id images from posed meshes.

Camera convention: right-handed camera frame with visible points on the
negative z axis.  The raw image-plane mapping (m1, m2) = -d/p3 * (p1, p2)
produces an upside-down image; composing it with the 180-degree rotation
and the pixel mapping yields the upright projection

    u = cx + focal_px * (-p1 / p3)
    v = cy - focal_px * (-p2 / p3)

with pixel (row i, col j) centered at (j + 0.5, i + 0.5).

Coverage: a pixel is covered iff its center lies inside the projected
triangle, with the top-left rule deciding shared edges.  Depth is
interpolated perspective-correctly on 1/z.  Depth ties go to the earlier
submitted triangle, so the lower object index wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import BehindCameraError, ValidationError
from .scene import ClassPalette, SceneDescription
from .transforms import apply_pose, apply_pose_inverse

CLIP_EPS = 1e-6


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics in pixel units; principal point defaults to center."""

    focal_px: float
    cx: float
    cy: float
    height: int
    width: int

    def __post_init__(self):
        if self.focal_px <= 0 or not np.isfinite(self.focal_px):
            raise ValidationError("focal_px must be finite and positive")
        if self.height < 1 or self.width < 1:
            raise ValidationError("image dimensions must be >= 1")

    @classmethod
    def from_settings(cls, settings) -> "Intrinsics":
        return cls(
            focal_px=float(settings.focal_px),
            cx=settings.width / 2.0,
            cy=settings.height / 2.0,
            height=settings.height,
            width=settings.width,
        )


@dataclass(frozen=True)
class SemanticImage:
    """H x W grid of class ids (0 = void)."""

    ids: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids)
        if ids.ndim != 2:
            raise ValidationError("semantic image must be 2-D")
        if ids.dtype != np.uint8:
            if ids.size and (ids.min() < 0 or ids.max() > 255):
                raise ValidationError("class ids must lie in [0, 255]")
            ids = ids.astype(np.uint8)
        object.__setattr__(self, "ids", ids)

    @property
    def height(self) -> int:
        return self.ids.shape[0]

    @property
    def width(self) -> int:
        return self.ids.shape[1]


def image_plane_coords(p_cam, d: float = 1.0) -> np.ndarray:
    """Raw pinhole mapping (m1, m2) = -d/p3 * (p1, p2), before pixel mapping."""
    p = np.asarray(p_cam, dtype=float).reshape(3)
    if p[2] >= 0:
        raise BehindCameraError("point lies behind the camera (z >= 0)")
    return np.array([-d / p[2] * p[0], -d / p[2] * p[1]])


def project_point(p_cam, K: Intrinsics) -> np.ndarray:
    """Project a camera-frame point to continuous (u, v) pixel coordinates."""
    p = np.asarray(p_cam, dtype=float).reshape(3)
    if p[2] >= 0:
        raise BehindCameraError("point lies behind the camera (z >= 0)")
    u = K.cx + K.focal_px * (-p[0] / p[2])
    v = K.cy - K.focal_px * (-p[1] / p[2])
    return np.array([u, v])


def unproject_pixels(u: np.ndarray, v: np.ndarray, depth: np.ndarray, K: Intrinsics) -> np.ndarray:
    """Camera-frame points for pixel coords (u, v) at positive depth (-z)."""
    x = (u - K.cx) * depth / K.focal_px
    y = -(v - K.cy) * depth / K.focal_px
    return np.stack([x, y, -depth], axis=-1)


# ---------------------------------------------------------------------------
# Triangle preparation: clip against z = -eps, project, orient


def _clip_poly(tri_xyz, tri_attr, inside):
    """Sutherland-Hodgman clip of one triangle against z <= -CLIP_EPS."""
    out_xyz, out_attr = [], []
    for i in range(3):
        j = (i + 1) % 3
        a, b = tri_xyz[i], tri_xyz[j]
        a_in, b_in = inside[i], inside[j]
        if a_in:
            out_xyz.append(a)
            out_attr.append(tri_attr[i])
        if a_in != b_in:
            t = (-CLIP_EPS - a[2]) / (b[2] - a[2])
            out_xyz.append(a + t * (b - a))
            out_attr.append(tri_attr[i] + t * (tri_attr[j] - tri_attr[i]))
    return out_xyz, out_attr


def prepare_screen_triangles(verts_cam: np.ndarray, faces0: np.ndarray, K: Intrinsics,
                             vertex_attrs: Optional[np.ndarray] = None):
    """Clip camera-space triangles to the front half-space and project them.

    Returns a dict of packed per-triangle arrays: px, py (T,3) pixel coords,
    invd (T,3) reciprocal depths, topleft (T,3) edge flags, face (T,) parent
    face indices, and attr (T,3,k) clip-interpolated vertex attributes when
    vertex_attrs (N,k) is given.  Degenerate and fully-behind triangles drop.
    """
    faces0 = np.asarray(faces0, dtype=np.int64).reshape(-1, 3)
    n_attr = 0 if vertex_attrs is None else vertex_attrs.shape[1]
    if faces0.size == 0:
        return _pack([], [], np.zeros((0,), dtype=np.int64), n_attr, K)

    tri = verts_cam[faces0]  # (M, 3, 3)
    att = vertex_attrs[faces0] if vertex_attrs is not None else np.zeros((len(faces0), 3, 0))
    inside = tri[:, :, 2] <= -CLIP_EPS
    n_in = inside.sum(axis=1)

    keep_xyz = [tri[n_in == 3]]
    keep_att = [att[n_in == 3]]
    keep_face = [np.nonzero(n_in == 3)[0]]

    partial_idx = np.nonzero((n_in == 1) | (n_in == 2))[0]
    extra_xyz, extra_att, extra_face = [], [], []
    for m in partial_idx:
        poly_xyz, poly_att = _clip_poly(tri[m], att[m], inside[m])
        for k in range(1, len(poly_xyz) - 1):  # fan triangulation
            extra_xyz.append([poly_xyz[0], poly_xyz[k], poly_xyz[k + 1]])
            extra_att.append([poly_att[0], poly_att[k], poly_att[k + 1]])
            extra_face.append(m)
    if extra_xyz:
        keep_xyz.append(np.asarray(extra_xyz))
        keep_att.append(np.asarray(extra_att))
        keep_face.append(np.asarray(extra_face, dtype=np.int64))

    xyz = np.concatenate(keep_xyz, axis=0)
    attr = np.concatenate(keep_att, axis=0)
    face = np.concatenate(keep_face, axis=0)
    return _pack(xyz, attr, face, n_attr, K)


def _pack(xyz, attr, face, n_attr, K: Intrinsics):
    empty = {
        "px": np.zeros((0, 3)), "py": np.zeros((0, 3)), "invd": np.zeros((0, 3)),
        "topleft": np.zeros((0, 3), dtype=np.uint8), "face": np.zeros((0,), dtype=np.int64),
        "attr": np.zeros((0, 3, n_attr)),
    }
    if len(face) == 0:
        return empty
    xyz = np.asarray(xyz, dtype=np.float64)
    z = xyz[:, :, 2]
    px = K.cx + K.focal_px * (-xyz[:, :, 0] / z)
    py = K.cy - K.focal_px * (-xyz[:, :, 1] / z)
    depth = -z
    invd = 1.0 / depth

    area = (px[:, 1] - px[:, 0]) * (py[:, 2] - py[:, 0]) - (py[:, 1] - py[:, 0]) * (px[:, 2] - px[:, 0])
    keep = area != 0.0
    px, py, invd, area = px[keep], py[keep], invd[keep], area[keep]
    face = face[keep]
    attr = np.asarray(attr, dtype=np.float64)[keep]
    if len(face) == 0:
        return empty

    flip = area < 0.0
    px[flip] = px[flip][:, [0, 2, 1]]
    py[flip] = py[flip][:, [0, 2, 1]]
    invd[flip] = invd[flip][:, [0, 2, 1]]
    attr[flip] = attr[flip][:, [0, 2, 1]]

    # top-left ownership of boundary pixels: edge k runs v_{k+1} -> v_{k+2}
    topleft = np.zeros((len(face), 3), dtype=np.uint8)
    for k in range(3):
        a, b = (k + 1) % 3, (k + 2) % 3
        dx = px[:, b] - px[:, a]
        dy = py[:, b] - py[:, a]
        topleft[:, k] = (dy < 0.0) | ((dy == 0.0) & (dx > 0.0))

    return {
        "px": np.ascontiguousarray(px), "py": np.ascontiguousarray(py),
        "invd": np.ascontiguousarray(invd), "topleft": np.ascontiguousarray(topleft),
        "face": face, "attr": np.ascontiguousarray(attr),
    }


def fill_packed(packed: dict, K: Intrinsics, kernel=None):
    """Run the fill kernel over packed triangles.

    Returns (tri_index (H,W) int32 with -1 for empty, depth (H,W) float64
    with +inf for empty, bary (H,W,3) float64).
    """
    h, w = K.height, K.width
    out_tri = np.full((h, w), -1, dtype=np.int32)
    out_depth = np.full((h, w), np.inf, dtype=np.float64)
    out_bary = np.zeros((h, w, 3), dtype=np.float64)
    if len(packed["face"]):
        fill = kernel or _kernels.fill_triangles
        fill(packed["px"], packed["py"], packed["invd"], packed["topleft"],
             h, w, out_tri, out_depth, out_bary)
    return out_tri, out_depth, out_bary


def concat_packed(parts: list) -> dict:
    keys = ("px", "py", "invd", "topleft", "face", "attr")
    if not parts:
        return _pack([], [], np.zeros((0,), dtype=np.int64), 0, Intrinsics(1.0, 0.5, 0.5, 1, 1))
    return {k: np.ascontiguousarray(np.concatenate([p[k] for p in parts], axis=0)) for k in keys}


# ---------------------------------------------------------------------------
# Public operations


def camera_vertices(mesh_vertices: np.ndarray, object_pose, camera_pose) -> np.ndarray:
    """Object-frame vertices mapped into the camera frame."""
    return apply_pose_inverse(apply_pose(mesh_vertices, object_pose), camera_pose)


def rasterize_semantic(scene: SceneDescription, K: Optional[Intrinsics] = None):
    """Rasterize the class-radiant meshes into (SemanticImage, depth buffer).

    Each pixel receives the class id of the depth-nearest semantic surface
    covering its center; uncovered pixels hold 0 and +inf depth.
    """
    K = K or Intrinsics.from_settings(scene.settings)
    parts, tri_class = [], []
    for obj in scene.objects:
        verts_cam = camera_vertices(obj.semantic_mesh.vertices, obj.pose, scene.camera)
        packed = prepare_screen_triangles(verts_cam, obj.semantic_mesh.faces0, K)
        parts.append(packed)
        tri_class.append(np.full(len(packed["face"]), obj.class_id, dtype=np.int64))
    packed = concat_packed(parts)
    class_of_tri = np.concatenate(tri_class) if tri_class else np.zeros(0, dtype=np.int64)

    tri, depth, _ = fill_packed(packed, K)
    ids = np.zeros((K.height, K.width), dtype=np.uint8)
    covered = tri >= 0
    if covered.any():
        ids[covered] = class_of_tri[tri[covered]].astype(np.uint8)
    return SemanticImage(ids), depth


def colorize_semantic(m: SemanticImage, palette: ClassPalette) -> np.ndarray:
    """Map class ids to display colors in [0, 1]; unknown ids are an error."""
    present = np.unique(m.ids)
    unknown = present[~np.isin(present, palette.ids)]
    if len(unknown):
        raise ValidationError(f"ids not in palette: {unknown.tolist()}")
    lut = np.zeros((256, 3), dtype=np.float64)
    lut[palette.ids] = palette.colors_float
    return lut[m.ids]


def declassify_semantic(rgb: np.ndarray, palette: ClassPalette) -> SemanticImage:
    """Inverse of colorize: nearest palette color (Chebyshev distance) per pixel.

    Ties break toward the lower class id, which makes the lookup a exact
    inverse of colorize_semantic and tolerant to per-channel noise smaller
    than half the minimum pairwise palette distance.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    order = np.argsort(palette.ids, kind="stable")
    ids_sorted = palette.ids[order]
    colors_sorted = palette.colors_float[order]
    dist = np.abs(rgb[..., None, :] - colors_sorted).max(axis=-1)
    nearest = np.argmin(dist, axis=-1)
    return SemanticImage(ids_sorted[nearest].astype(np.uint8))
