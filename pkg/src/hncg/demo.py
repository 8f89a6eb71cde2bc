"""Self-contained demo scene writer.

Builds a small urban-flavored scene on disk: a backdrop and ground with
class-radiant quads, plus two objects of interest (a box and a lane
marking) whose detailed meshes carry constant-color textures matching their
palette colors.  The directional light radiance is set to pi per channel so
a head-on Lambertian surface reflects exactly its albedo, which keeps the
stub declassifier exact on rendered pixels.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import imgio
from .scene import load_scene

PALETTE = [
    {"id": 0, "color": [0, 0, 0], "name": "void"},
    {"id": 1, "color": [64, 64, 192], "name": "backdrop"},
    {"id": 2, "color": [64, 160, 64], "name": "ground"},
    {"id": 3, "color": [200, 64, 64], "name": "box"},
    {"id": 4, "color": [224, 224, 64], "name": "marking"},
]


def _quad_obj(x0, x1, y0, y1, z, with_uvs=False) -> str:
    lines = [
        f"v {x0} {y0} {z}",
        f"v {x1} {y0} {z}",
        f"v {x1} {y1} {z}",
        f"v {x0} {y1} {z}",
    ]
    if with_uvs:
        lines += ["vt 0 0", "vt 1 0", "vt 1 1", "vt 0 1"]
        lines += ["f 1/1 2/2 3/3", "f 1/1 3/3 4/4"]
    else:
        lines += ["f 1 2 3", "f 1 3 4"]
    return "\n".join(lines) + "\n"


def write_demo_scene(out_dir, size: int = 64) -> Path:
    """Write scene.json plus its meshes, textures, and palette; returns the scene path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    (out / "palette.json").write_text(json.dumps(PALETTE, indent=2) + "\n")
    (out / "backdrop.obj").write_text(_quad_obj(-14, 14, -14, 14, -12))
    (out / "ground.obj").write_text(_quad_obj(-10, 10, -12, -2, -8))
    (out / "box.obj").write_text(_quad_obj(-2.2, -0.2, -0.8, 1.2, -5))
    (out / "box_detail.obj").write_text(_quad_obj(-2.2, -0.2, -0.8, 1.2, -5, with_uvs=True))
    (out / "marking.obj").write_text(_quad_obj(0.5, 1.7, -1.5, -0.7, -4))
    (out / "marking_detail.obj").write_text(_quad_obj(0.5, 1.7, -1.5, -0.7, -4, with_uvs=True))

    box_tex = np.tile(np.array([200, 64, 64], dtype=np.uint8) / 255.0, (8, 8, 1))
    marking_tex = np.tile(np.array([224, 224, 64], dtype=np.uint8) / 255.0, (8, 8, 1))
    imgio.write_png_rgb(out / "box_tex.png", box_tex)
    imgio.write_png_rgb(out / "marking_tex.png", marking_tex)

    scene = {
        "objects": [
            {"pose": [0, 0, 0, 0, 0, 0], "mesh": "backdrop.obj", "class_id": 1},
            {"pose": [0, 0, 0, 0, 0, 0], "mesh": "ground.obj", "class_id": 2},
            {"pose": [0, 0, 0, 0, 0, 0], "mesh": "box.obj", "class_id": 3},
            {"pose": [0, 0, 0, 0, 0, 0], "mesh": "marking.obj", "class_id": 4},
        ],
        "interest": [
            {"object_index": 2, "mesh": "box_detail.obj", "texture": "box_tex.png"},
            {"object_index": 3, "mesh": "marking_detail.obj", "texture": "marking_tex.png"},
        ],
        "camera": [0, 0, 0, 0, 0, 0],
        "light": {"kind": "directional", "vector": [0, 0, -1],
                  "radiance": [math.pi, math.pi, math.pi]},
        "settings": {"width": size, "height": size, "focal_px": float(size)},
        "palette": "palette.json",
    }
    path = out / "scene.json"
    path.write_text(json.dumps(scene, indent=2) + "\n")
    return path


def demo_scene(out_dir):
    """Write the demo scene and load it back."""
    return load_scene(write_demo_scene(out_dir))
