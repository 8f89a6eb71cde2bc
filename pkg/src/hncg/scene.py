"""Scene data model and loaders.

A scene holds a list of posed objects with simple class-radiant meshes, a
sublist of objects of interest carrying detailed textured meshes, a camera
pose, one light, render settings, and the class palette.  Everything is
immutable after construction; arrays are frozen with the write flag cleared.

Mesh face indices are stored 1-based (OBJ convention); rasterization code
converts once via ``TriMesh.faces0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ObjParseError, SceneError, ValidationError


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PoseVector:
    """Position (meters) and roll-pitch-yaw orientation (radians)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        ori = np.asarray(self.orientation, dtype=float).reshape(3)
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(ori))):
            raise ValidationError("pose entries must be finite")
        object.__setattr__(self, "position", _freeze(pos))
        object.__setattr__(self, "orientation", _freeze(ori))

    @classmethod
    def identity(cls) -> "PoseVector":
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "PoseVector":
        v = list(values)
        if len(v) != 6:
            raise ValidationError(f"pose vector needs 6 entries, got {len(v)}")
        return cls(np.array(v[:3], dtype=float), np.array(v[3:], dtype=float))

    def as_list(self) -> list:
        return [*self.position.tolist(), *self.orientation.tolist()]


@dataclass(frozen=True)
class TriMesh:
    """Triangular mesh: vertices (N,3), 1-based faces (M,3), optional uvs (N,2)."""

    vertices: np.ndarray
    faces: np.ndarray
    uvs: Optional[np.ndarray] = None

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if not np.all(np.isfinite(verts)):
            raise ValidationError("mesh vertices must be finite")
        n = len(verts)
        if faces.size and (faces.min() < 1 or faces.max() > n):
            raise ValidationError(
                f"face index out of range [1, {n}]: {int(faces.min())}..{int(faces.max())}"
            )
        if faces.size:
            a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
            if np.any((a == b) | (b == c) | (a == c)):
                raise ValidationError("face repeats a vertex index")
        uvs = self.uvs
        if uvs is not None:
            uvs = np.asarray(uvs, dtype=float).reshape(-1, 2)
            if len(uvs) != n:
                raise ValidationError("uv count must match vertex count")
            if uvs.size and (uvs.min() < 0.0 or uvs.max() > 1.0):
                raise ValidationError("uv coordinates must lie in [0, 1]")
            object.__setattr__(self, "uvs", _freeze(uvs))
        object.__setattr__(self, "vertices", _freeze(verts))
        object.__setattr__(self, "faces", _freeze(faces))

    @property
    def faces0(self) -> np.ndarray:
        """Zero-based face index array."""
        return self.faces - 1

    def __eq__(self, other):
        if not isinstance(other, TriMesh):
            return NotImplemented
        same_uv = (self.uvs is None) == (other.uvs is None)
        if same_uv and self.uvs is not None:
            same_uv = np.array_equal(self.uvs, other.uvs)
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.faces, other.faces)
            and same_uv
        )


@dataclass(frozen=True)
class Texture:
    """RGB texture with data (H,W,3) in [0,1]; rows run top to bottom.

    uv convention follows OBJ: v=0 samples the bottom row, v=1 the top.
    """

    data: np.ndarray
    mode: str = "nearest"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3 or data.shape[2] != 3 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValidationError("texture data must be (H, W, 3) with H, W >= 1")
        if data.min() < 0.0 or data.max() > 1.0:
            raise ValidationError("texture values must lie in [0, 1]")
        if self.mode not in ("nearest", "bilinear"):
            raise ValidationError(f"unknown sampling mode {self.mode!r}")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def sample(self, uv: np.ndarray) -> np.ndarray:
        """Sample at uv (...,2); out-of-range coordinates clamp to the edge."""
        uv = np.asarray(uv, dtype=float)
        u, v = uv[..., 0], uv[..., 1]
        h, w = self.height, self.width
        if self.mode == "nearest":
            tx = np.clip(np.floor(u * w), 0, w - 1).astype(np.intp)
            ty = np.clip(np.floor((1.0 - v) * h), 0, h - 1).astype(np.intp)
            return self.data[ty, tx]
        gx = np.clip(u * w - 0.5, 0.0, w - 1.0)
        gy = np.clip((1.0 - v) * h - 0.5, 0.0, h - 1.0)
        x0 = np.floor(gx).astype(np.intp)
        y0 = np.floor(gy).astype(np.intp)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        fx = (gx - x0)[..., None]
        fy = (gy - y0)[..., None]
        top = self.data[y0, x0] * (1 - fx) + self.data[y0, x1] * fx
        bot = self.data[y1, x0] * (1 - fx) + self.data[y1, x1] * fx
        return top * (1 - fy) + bot * fy


@dataclass(frozen=True)
class Material:
    """Lambertian material: albedo (texture or constant RGB) plus emission."""

    albedo: Union[Texture, np.ndarray]
    emission: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not isinstance(self.albedo, Texture):
            alb = np.asarray(self.albedo, dtype=float).reshape(3)
            if alb.min() < 0.0 or alb.max() > 1.0:
                raise ValidationError("constant albedo must lie in [0, 1]")
            object.__setattr__(self, "albedo", _freeze(alb))
        emi = np.asarray(self.emission, dtype=float).reshape(3)
        if not np.all(np.isfinite(emi)) or emi.min() < 0.0:
            raise ValidationError("emission must be finite and >= 0")
        object.__setattr__(self, "emission", _freeze(emi))

    @property
    def textured(self) -> bool:
        return isinstance(self.albedo, Texture)


@dataclass(frozen=True)
class LightSource:
    """Delta light: directional (vector = travel direction) or point (vector = position)."""

    kind: str
    vector: np.ndarray
    radiance: np.ndarray

    def __post_init__(self):
        if self.kind not in ("directional", "point"):
            raise ValidationError(f"unknown light kind {self.kind!r}")
        vec = np.asarray(self.vector, dtype=float).reshape(3)
        rad = np.asarray(self.radiance, dtype=float).reshape(3)
        if not (np.all(np.isfinite(vec)) and np.all(np.isfinite(rad))):
            raise ValidationError("light vector and radiance must be finite")
        if self.kind == "directional" and float(np.linalg.norm(vec)) == 0.0:
            raise ValidationError("directional light needs a nonzero direction")
        if rad.min() < 0.0:
            raise ValidationError("radiance must be >= 0")
        object.__setattr__(self, "vector", _freeze(vec))
        object.__setattr__(self, "radiance", _freeze(rad))


@dataclass(frozen=True)
class RenderSettings:
    """Output image size in pixels and pixel-unit focal length."""

    width: int
    height: int
    focal_px: float

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValidationError("image dimensions must be >= 1")
        f = float(self.focal_px)
        if not math.isfinite(f) or f <= 0.0:
            raise ValidationError("focal_px must be finite and positive")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        object.__setattr__(self, "focal_px", f)


@dataclass(frozen=True)
class ClassPalette:
    """Unique class ids mapped to distinct 8-bit display colors.

    Id 0 is reserved for void/background.
    """

    ids: np.ndarray
    colors: np.ndarray
    names: tuple

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        colors = np.asarray(self.colors, dtype=np.int64).reshape(-1, 3)
        if len(ids) != len(colors):
            raise ValidationError("palette ids and colors must pair up")
        if len(ids) == 0:
            raise ValidationError("palette must not be empty")
        if ids.min() < 0 or ids.max() > 255:
            raise ValidationError("class ids must lie in [0, 255]")
        if len(np.unique(ids)) != len(ids):
            raise ValidationError("duplicate class id in palette")
        if colors.min() < 0 or colors.max() > 255:
            raise ValidationError("palette colors must be 8-bit RGB")
        if len({tuple(c) for c in colors.tolist()}) != len(colors):
            raise ValidationError("palette colors must be pairwise distinct")
        object.__setattr__(self, "ids", _freeze(ids))
        object.__setattr__(self, "colors", _freeze(colors.astype(np.uint8)))
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))

    @classmethod
    def from_entries(cls, entries: Sequence[dict]) -> "ClassPalette":
        ids = [e["id"] for e in entries]
        colors = [e["color"] for e in entries]
        names = [e.get("name", f"class_{e['id']}") for e in entries]
        return cls(np.array(ids), np.array(colors), tuple(names))

    def __contains__(self, class_id: int) -> bool:
        return bool(np.any(self.ids == int(class_id)))

    @property
    def colors_float(self) -> np.ndarray:
        """Palette colors scaled to [0, 1]."""
        return self.colors.astype(float) / 255.0

    def color_of(self, class_id: int) -> np.ndarray:
        idx = np.nonzero(self.ids == int(class_id))[0]
        if len(idx) == 0:
            raise ValidationError(f"unknown class id {class_id}")
        return self.colors_float[idx[0]]

    def min_pairwise_distance(self) -> float:
        """Minimum pairwise Chebyshev distance between colors, unit scale."""
        c = self.colors_float
        diff = np.abs(c[:, None, :] - c[None, :, :]).max(axis=2)
        diff[np.diag_indices(len(c))] = np.inf
        return float(diff.min())


@dataclass(frozen=True)
class SceneObject:
    pose: PoseVector
    semantic_mesh: TriMesh
    class_id: int

    def __post_init__(self):
        cid = int(self.class_id)
        if not 0 <= cid <= 255:
            raise ValidationError("class_id must lie in [0, 255]")
        object.__setattr__(self, "class_id", cid)


@dataclass(frozen=True)
class InterestObject:
    """Object of interest: detailed mesh and material rendered physically."""

    object_index: int
    mesh: TriMesh
    material: Material


@dataclass(frozen=True)
class SceneDescription:
    objects: tuple
    interest: tuple
    camera: PoseVector
    light: LightSource
    settings: RenderSettings
    palette: ClassPalette

    def __post_init__(self):
        objects = tuple(self.objects)
        interest = tuple(self.interest)
        seen = set()
        for it in interest:
            if not 0 <= it.object_index < len(objects):
                raise SceneError(
                    f"interest index {it.object_index} not in objects [0, {len(objects)})"
                )
            if it.object_index in seen:
                raise SceneError(f"duplicate interest index {it.object_index}")
            seen.add(it.object_index)
        for i, obj in enumerate(objects):
            if obj.class_id not in self.palette:
                raise SceneError(f"object {i} class id {obj.class_id} missing from palette")
        if 0 not in self.palette:
            raise SceneError("palette must define the void class (id 0)")
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "interest", interest)

    @property
    def interest_indices(self) -> list:
        return [it.object_index for it in self.interest]


# ---------------------------------------------------------------------------
# OBJ subset parsing and serialization


def parse_obj(text: Union[str, Sequence[str]]) -> TriMesh:
    """Parse the OBJ subset: ``v x y z``, ``vt u v``, ``f a b c`` (or ``a/at``).

    Comments (``#``) and unrelated directives are ignored.  Faces must be
    triangles; indices are 1-based and validated against the final vertex
    count.  Texture coordinates attach per vertex via the face index pairs.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = list(text)

    verts: list = []
    vts: list = []
    # face entries: (line_no, [(vi, ti|None) x3])
    face_entries: list = []

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        if key == "v":
            if len(tokens) != 4:
                raise ObjParseError(f"vertex needs 3 coordinates, got {len(tokens) - 1}", lineno)
            verts.append([_parse_float(t, lineno) for t in tokens[1:]])
        elif key == "vt":
            if len(tokens) != 3:
                raise ObjParseError(f"texture coordinate needs 2 values, got {len(tokens) - 1}", lineno)
            vts.append([_parse_float(t, lineno) for t in tokens[1:]])
        elif key == "f":
            if len(tokens) != 4:
                raise ObjParseError(f"face must be a triangle, got {len(tokens) - 1} vertices", lineno)
            entry = []
            for tok in tokens[1:]:
                parts = tok.split("/")
                if len(parts) == 1:
                    entry.append((_parse_int(parts[0], lineno), None))
                elif len(parts) == 2 and parts[1] != "":
                    entry.append((_parse_int(parts[0], lineno), _parse_int(parts[1], lineno)))
                else:
                    raise ObjParseError(f"unsupported face vertex {tok!r}", lineno)
            face_entries.append((lineno, entry))
        # other directives (vn, o, g, s, usemtl, ...) are outside the subset

    nv, nt = len(verts), len(vts)
    faces = np.zeros((len(face_entries), 3), dtype=np.int64)
    uv_per_vertex = np.full((nv, 2), np.nan) if nt else None
    for fi, (lineno, entry) in enumerate(face_entries):
        for k, (vi, ti) in enumerate(entry):
            if not 1 <= vi <= nv:
                raise ObjParseError(f"face index {vi} out of range [1, {nv}]", lineno)
            faces[fi, k] = vi
            if ti is not None:
                if uv_per_vertex is None:
                    raise ObjParseError(f"face references texture index {ti} but no vt lines precede", lineno)
                if not 1 <= ti <= nt:
                    raise ObjParseError(f"texture index {ti} out of range [1, {nt}]", lineno)
                new = np.array(vts[ti - 1], dtype=float)
                old = uv_per_vertex[vi - 1]
                if not np.any(np.isnan(old)) and not np.array_equal(old, new):
                    raise ObjParseError(f"conflicting texture coordinate for vertex {vi}", lineno)
                uv_per_vertex[vi - 1] = new
        if len({vi for vi, _ in entry}) != 3:
            raise ObjParseError("face repeats a vertex index", lineno)

    uvs = None
    if uv_per_vertex is not None and not np.all(np.isnan(uv_per_vertex)):
        uv_per_vertex = np.where(np.isnan(uv_per_vertex), 0.0, uv_per_vertex)
        uvs = uv_per_vertex
    try:
        return TriMesh(np.array(verts, dtype=float).reshape(-1, 3), faces, uvs)
    except ValidationError as exc:
        raise ObjParseError(str(exc), len(lines)) from exc


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ObjParseError(f"malformed numeric token {token!r}", lineno) from None
    if not math.isfinite(value):
        raise ObjParseError(f"non-finite numeric token {token!r}", lineno)
    return value


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ObjParseError(f"malformed numeric token {token!r}", lineno) from None


def dump_obj(mesh: TriMesh) -> str:
    """Serialize a TriMesh back to the OBJ subset (repr-exact floats)."""
    out = []
    for v in mesh.vertices:
        out.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    if mesh.uvs is not None:
        for t in mesh.uvs:
            out.append(f"vt {float(t[0])!r} {float(t[1])!r}")
        for f in mesh.faces:
            out.append(f"f {f[0]}/{f[0]} {f[1]}/{f[1]} {f[2]}/{f[2]}")
    else:
        for f in mesh.faces:
            out.append(f"f {f[0]} {f[1]} {f[2]}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Scene document loading


def load_palette(path: Union[str, Path]) -> ClassPalette:
    """Load a palette file: JSON list of {id, color: [r,g,b], name}."""
    path = Path(path)
    try:
        entries = json.loads(path.read_text())
    except FileNotFoundError:
        raise SceneError(f"missing palette file {path}") from None
    except json.JSONDecodeError as exc:
        raise SceneError(f"palette file {path}: {exc}") from None
    if not isinstance(entries, list):
        raise SceneError(f"palette file {path} must hold a list")
    try:
        return ClassPalette.from_entries(entries)
    except (KeyError, TypeError) as exc:
        raise SceneError(f"palette file {path}: malformed entry ({exc})") from None


def load_scene(path: Union[str, Path]) -> SceneDescription:
    """Load a scene document (JSON) and every mesh/texture/palette it references.

    Relative paths resolve against the scene file's directory.
    """
    from .imgio import read_texture  # local import to avoid a cycle at import time

    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise SceneError(f"missing scene file {path}") from None
    except json.JSONDecodeError as exc:
        raise SceneError(f"scene file {path}: {exc}") from None
    base = path.parent

    def resolve(rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else base / p

    def require(mapping: dict, key: str, where: str):
        if key not in mapping:
            raise SceneError(f"{where} missing required key {key!r}")
        return mapping[key]

    objects = []
    for i, entry in enumerate(require(doc, "objects", "scene")):
        pose = PoseVector.from_list(require(entry, "pose", f"objects[{i}]"))
        mesh = _load_mesh(resolve(require(entry, "mesh", f"objects[{i}]")))
        objects.append(SceneObject(pose, mesh, int(require(entry, "class_id", f"objects[{i}]"))))

    interest = []
    for i, entry in enumerate(doc.get("interest", [])):
        idx = int(require(entry, "object_index", f"interest[{i}]"))
        mesh = _load_mesh(resolve(require(entry, "mesh", f"interest[{i}]")))
        tex = read_texture(resolve(require(entry, "texture", f"interest[{i}]")))
        interest.append(InterestObject(idx, mesh, Material(albedo=tex)))

    camera = PoseVector.from_list(require(doc, "camera", "scene"))
    light_doc = require(doc, "light", "scene")
    light = LightSource(
        kind=require(light_doc, "kind", "light"),
        vector=require(light_doc, "vector", "light"),
        radiance=require(light_doc, "radiance", "light"),
    )
    s = require(doc, "settings", "scene")
    settings = RenderSettings(
        width=require(s, "width", "settings"),
        height=require(s, "height", "settings"),
        focal_px=require(s, "focal_px", "settings"),
    )
    palette = load_palette(resolve(require(doc, "palette", "scene")))
    return SceneDescription(tuple(objects), tuple(interest), camera, light, settings, palette)


def _load_mesh(path: Path) -> TriMesh:
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise SceneError(f"missing mesh file {path}") from None
    try:
        return parse_obj(text)
    except ObjParseError as exc:
        raise SceneError(f"mesh file {path}: {exc}") from exc
