"""Pure-numpy triangle fill kernel (fallback backend).

Expressions mirror the compiled kernel operation-for-operation so both
backends produce bit-identical buffers (the extension is built with FMA
contraction disabled for the same reason).
"""

from __future__ import annotations

import math

import numpy as np


def fill_triangles(px, py, invd, topleft, height, width, out_tri, out_depth, out_bary):
    """Z-buffer fill of screen-space triangles.

    px, py, invd: (T, 3) float64 vertex pixel coords and 1/depth, positively
    oriented.  topleft: (T, 3) uint8 edge flags for boundary tie ownership.
    Writes the winning triangle index, its depth, and its screen barycentrics
    into the (H, W[, 3]) output buffers.  Triangles are processed in order;
    the depth test is strict, so earlier triangles win exact depth ties.
    """
    n_tri = px.shape[0]
    for t in range(n_tri):
        x0, x1, x2 = px[t, 0], px[t, 1], px[t, 2]
        y0, y1, y2 = py[t, 0], py[t, 1], py[t, 2]
        area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area <= 0.0:
            continue
        ix0 = max(0, int(math.ceil(min(x0, x1, x2) - 0.5)))
        ix1 = min(width - 1, int(math.floor(max(x0, x1, x2) - 0.5)))
        iy0 = max(0, int(math.ceil(min(y0, y1, y2) - 0.5)))
        iy1 = min(height - 1, int(math.floor(max(y0, y1, y2) - 0.5)))
        if ix0 > ix1 or iy0 > iy1:
            continue
        cx = np.arange(ix0, ix1 + 1, dtype=np.float64) + 0.5
        cy = (np.arange(iy0, iy1 + 1, dtype=np.float64) + 0.5)[:, None]

        e0 = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1)
        e1 = (x0 - x2) * (cy - y2) - (y0 - y2) * (cx - x2)
        e2 = (x1 - x0) * (cy - y0) - (y1 - y0) * (cx - x0)
        inside = (
            ((e0 > 0.0) | ((e0 == 0.0) & bool(topleft[t, 0])))
            & ((e1 > 0.0) | ((e1 == 0.0) & bool(topleft[t, 1])))
            & ((e2 > 0.0) | ((e2 == 0.0) & bool(topleft[t, 2])))
        )
        if not inside.any():
            continue
        l0 = e0 / area
        l1 = e1 / area
        l2 = e2 / area
        ivd = l0 * invd[t, 0] + l1 * invd[t, 1] + l2 * invd[t, 2]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            depth = 1.0 / ivd
        win = inside & (depth < out_depth[iy0 : iy1 + 1, ix0 : ix1 + 1])
        if not win.any():
            continue
        sub = (slice(iy0, iy1 + 1), slice(ix0, ix1 + 1))
        out_depth[sub][win] = depth[win]
        out_tri[sub][win] = t
        out_bary[sub + (0,)][win] = np.broadcast_to(l0, win.shape)[win]
        out_bary[sub + (1,)][win] = np.broadcast_to(l1, win.shape)[win]
        out_bary[sub + (2,)][win] = np.broadcast_to(l2, win.shape)[win]
