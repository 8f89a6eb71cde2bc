#!/usr/bin/env python3
"""Benchmark: compiled triangle-fill kernel vs the pure-numpy fallback.

Rasterizes random triangle soups at several sizes with both backends and
reports wall time and speedup.  Outputs are also cross-checked bit for bit,
since the two backends must agree exactly.

Usage: python benchmarks/bench_raster.py [--repeat N]
"""

import argparse
import time

import numpy as np

from hncg import _kernels
from hncg._raster_py import fill_triangles as fill_py
from hncg.raster import Intrinsics, camera_vertices, concat_packed, fill_packed, prepare_screen_triangles
from hncg.scene import PoseVector, TriMesh


def make_packed(rng, n_tris, size):
    n = 3 * n_tris
    verts = np.empty((n, 3))
    verts[:, 0] = rng.uniform(-3, 3, n)
    verts[:, 1] = rng.uniform(-3, 3, n)
    verts[:, 2] = rng.uniform(-6, -1.5, n)
    mesh = TriMesh(verts, np.arange(1, n + 1).reshape(n_tris, 3))
    K = Intrinsics(focal_px=float(size), cx=size / 2, cy=size / 2, height=size, width=size)
    vc = camera_vertices(mesh.vertices, PoseVector.identity(), PoseVector.identity())
    return concat_packed([prepare_screen_triangles(vc, mesh.faces0, K)]), K


def bench(kernel, packed, K, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fill_packed(packed, K, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _kernels.active_backend() != "compiled":
        print("compiled kernel not available; run `pip install -e .` with a C compiler")
        return

    rng = np.random.default_rng(0)
    print(f"{'size':>6} {'tris':>6} {'compiled':>12} {'python':>12} {'speedup':>8}  identical")
    for size, n_tris in ((64, 20), (128, 50), (256, 200), (512, 500)):
        packed, K = make_packed(rng, n_tris, size)
        t_ext, out_ext = bench(None, packed, K, args.repeat)  # active = compiled
        t_py, out_py = bench(fill_py, packed, K, args.repeat)
        same = all(np.array_equal(a, b) for a, b in zip(out_ext, out_py))
        print(f"{size:>6} {n_tris:>6} {t_ext * 1e3:>10.2f}ms {t_py * 1e3:>10.2f}ms "
              f"{t_py / t_ext:>7.1f}x  {same}")


if __name__ == "__main__":
    main()
