"""Direct-lighting renderer for objects of interest.

Radiance model: emission plus a single delta light reflected by a Lambertian
surface,

    L = L_e + albedo/pi * L_i * max(0, dot(omega_i, n))

with three discrete RGB channels.  Directional lights are unattenuated;
point lights fall off with 1/r^2.  No shadows or interreflection: the
hemisphere integral collapses to the one delta-light term (the documented
direct-lighting restriction).  Faces are shaded flat with normals from
counter-clockwise winding; radiance stays linear until PNG export.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .raster import Intrinsics, concat_packed, fill_packed, prepare_screen_triangles, unproject_pixels
from .scene import LightSource, Material, SceneDescription, Texture
from .transforms import apply_pose, apply_pose_inverse, rotation_matrix


@dataclass(frozen=True)
class PartialRender:
    """Linear-radiance RGB, binary coverage alpha, and per-pixel interest class id."""

    rgb: np.ndarray
    alpha: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        rgb = np.asarray(self.rgb, dtype=np.float64)
        alpha = np.asarray(self.alpha).astype(np.uint8)
        ids = np.asarray(self.ids).astype(np.uint8)
        if rgb.ndim != 3 or rgb.shape[2] != 3 or alpha.shape != rgb.shape[:2] or ids.shape != rgb.shape[:2]:
            raise ValidationError("partial render buffers must agree on (H, W)")
        if not np.isin(alpha, (0, 1)).all():
            raise ValidationError("coverage alpha must be binary")
        if np.any(rgb[alpha == 0] != 0.0):
            raise ValidationError("uncovered pixels must have zero radiance")
        if rgb.min() < 0.0:
            raise ValidationError("radiance must be >= 0")
        object.__setattr__(self, "rgb", rgb)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "ids", ids)

    @property
    def coverage(self) -> np.ndarray:
        return self.alpha.astype(bool)


def light_at(light: LightSource, points: np.ndarray):
    """Incoming direction and radiance of the delta light at points (..., 3)."""
    if light.kind == "directional":
        omega = -light.vector / np.linalg.norm(light.vector)
        omega = np.broadcast_to(omega, points.shape)
        radiance = np.broadcast_to(light.radiance, points.shape)
        return omega, radiance
    delta = light.vector - points
    r2 = np.sum(delta * delta, axis=-1, keepdims=True)
    r2 = np.maximum(r2, 1e-12)  # guard a point light exactly on the surface
    omega = delta / np.sqrt(r2)
    radiance = light.radiance / r2
    return omega, radiance


def shade(points: np.ndarray, normals: np.ndarray, albedo: np.ndarray,
          emission: np.ndarray, light: LightSource) -> np.ndarray:
    """Vectorized Lambert shading; all arguments broadcast over (..., 3)."""
    omega, radiance = light_at(light, points)
    cos_term = np.maximum(0.0, np.sum(omega * normals, axis=-1, keepdims=True))
    return emission + albedo / np.pi * radiance * cos_term


def shade_point(p, n, mat: Material, uv, light: LightSource, view_dir=None) -> np.ndarray:
    """Outgoing radiance at a single surface point.

    n must be unit length.  view_dir is accepted for interface completeness;
    a Lambertian surface reflects independently of view direction.
    """
    n = np.asarray(n, dtype=np.float64).reshape(3)
    norm = float(np.linalg.norm(n))
    if norm == 0.0:
        raise ValidationError("zero-length normal")
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError("normal must be unit length")
    p = np.asarray(p, dtype=np.float64).reshape(3)
    if isinstance(mat.albedo, Texture):
        if uv is None:
            raise ValidationError("textured material requires uv coordinates")
        albedo = mat.albedo.sample(np.asarray(uv, dtype=np.float64).reshape(1, 2))[0]
    else:
        albedo = mat.albedo
    return shade(p, n, albedo, mat.emission, light)


def _face_normals(world_tris: np.ndarray) -> np.ndarray:
    """Unit normals from counter-clockwise winding; degenerate faces get zero."""
    e1 = world_tris[:, 1] - world_tris[:, 0]
    e2 = world_tris[:, 2] - world_tris[:, 0]
    n = np.cross(e1, e2)
    length = np.linalg.norm(n, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(length > 0, n / length, 0.0)
    return unit


def render_meshes(entries: list, light: LightSource, camera_pose, K: Intrinsics):
    """Z-buffered direct-lighting render of (pose, mesh, material, class_id) entries.

    Entries are dicts with keys pose, mesh, material, class_id.  Returns
    (rgb linear, alpha binary, ids, depth).  Raises if a textured material
    is paired with a mesh that has no uvs.
    """
    parts = []
    tri_entry, tri_normal = [], []
    for e_idx, entry in enumerate(entries):
        mesh, material = entry["mesh"], entry["material"]
        if material.textured and mesh.uvs is None:
            raise ValidationError(
                f"mesh for entry {e_idx} lacks uvs but its material references a texture"
            )
        verts_world = apply_pose(mesh.vertices, entry["pose"])
        verts_cam = apply_pose_inverse(verts_world, camera_pose)
        uvs = mesh.uvs if mesh.uvs is not None else np.zeros((len(mesh.vertices), 2))
        packed = prepare_screen_triangles(verts_cam, mesh.faces0, K, vertex_attrs=uvs)
        normals = _face_normals(verts_world[mesh.faces0])
        parts.append(packed)
        tri_entry.append(np.full(len(packed["face"]), e_idx, dtype=np.int64))
        tri_normal.append(normals[packed["face"]] if len(packed["face"]) else np.zeros((0, 3)))

    packed = concat_packed(parts)
    entry_of_tri = np.concatenate(tri_entry) if tri_entry else np.zeros(0, dtype=np.int64)
    normal_of_tri = np.concatenate(tri_normal) if tri_normal else np.zeros((0, 3))

    tri, depth, bary = fill_packed(packed, K)
    h, w = K.height, K.width
    rgb = np.zeros((h, w, 3), dtype=np.float64)
    alpha = np.zeros((h, w), dtype=np.uint8)
    ids = np.zeros((h, w), dtype=np.uint8)
    covered = tri >= 0
    if not covered.any():
        return rgb, alpha, ids, depth

    ti = tri[covered]
    lam = bary[covered]  # screen barycentrics (n, 3)
    d = depth[covered]

    # perspective-correct uv: weight vertex attrs by lambda/z, renormalize by depth
    invd_v = packed["invd"][ti]           # (n, 3)
    uv_v = packed["attr"][ti]             # (n, 3, 2)
    uv = np.einsum("nk,nkc->nc", lam * invd_v, uv_v) * d[:, None]

    vi, ui = np.nonzero(covered)
    p_cam = unproject_pixels(ui + 0.5, vi + 0.5, d, K)
    r_cam = rotation_matrix(camera_pose.orientation)
    p_world = p_cam @ r_cam.T + camera_pose.position

    normals = normal_of_tri[ti]
    entry_idx = entry_of_tri[ti]
    out = np.zeros((len(ti), 3), dtype=np.float64)
    for e_idx, entry in enumerate(entries):
        sel = entry_idx == e_idx
        if not sel.any():
            continue
        material = entry["material"]
        if material.textured:
            albedo = material.albedo.sample(uv[sel])
        else:
            albedo = np.broadcast_to(material.albedo, (int(sel.sum()), 3))
        out[sel] = shade(p_world[sel], normals[sel], albedo, material.emission, light)
        ids[vi[sel], ui[sel]] = entry["class_id"]

    rgb[covered] = np.maximum(out, 0.0)
    alpha[covered] = 1
    return rgb, alpha, ids, depth


def render_partial(scene: SceneDescription, K: Optional[Intrinsics] = None) -> PartialRender:
    """Render only the objects of interest; alpha marks their exact coverage."""
    K = K or Intrinsics.from_settings(scene.settings)
    entries = [
        {
            "pose": scene.objects[it.object_index].pose,
            "mesh": it.mesh,
            "material": it.material,
            "class_id": scene.objects[it.object_index].class_id,
        }
        for it in scene.interest
    ]
    rgb, alpha, ids, _ = render_meshes(entries, scene.light, scene.camera, K)
    return PartialRender(rgb, alpha, ids)


def render_full(scene: SceneDescription, K: Optional[Intrinsics] = None) -> np.ndarray:
    """Desk-scale full-render analog: every object shaded in one pass.

    Non-interest objects use their class-radiant geometry with the palette
    color as constant albedo; interest objects substitute their detailed
    textured meshes.  Returns linear RGB.
    """
    K = K or Intrinsics.from_settings(scene.settings)
    interest_by_index = {it.object_index: it for it in scene.interest}
    entries = []
    for idx, obj in enumerate(scene.objects):
        it = interest_by_index.get(idx)
        if it is not None:
            entries.append({"pose": obj.pose, "mesh": it.mesh,
                            "material": it.material, "class_id": obj.class_id})
        else:
            material = Material(albedo=scene.palette.color_of(obj.class_id))
            entries.append({"pose": obj.pose, "mesh": obj.semantic_mesh,
                            "material": material, "class_id": obj.class_id})
    rgb, _, _, _ = render_meshes(entries, scene.light, scene.camera, K)
    return rgb
