# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled triangle fill kernel (hot inner loop of rasterization).

Must stay arithmetically identical to hncg._raster_py.fill_triangles; the
build disables FMA contraction so both backends agree bit for bit.
"""

from libc.math cimport ceil, floor


def fill_triangles(double[:, ::1] px, double[:, ::1] py, double[:, ::1] invd,
                   unsigned char[:, ::1] topleft, int height, int width,
                   int[:, ::1] out_tri, double[:, ::1] out_depth,
                   double[:, :, ::1] out_bary):
    """Z-buffer fill; same contract as the pure-numpy backend."""
    cdef Py_ssize_t t, n_tri = px.shape[0]
    cdef int ix, iy, ix0, ix1, iy0, iy1
    cdef double x0, x1, x2, y0, y1, y2, area
    cdef double i0, i1, i2, mn, mx
    cdef double cx, cy, e0, e1, e2, l0, l1, l2, ivd, depth
    cdef unsigned char t0, t1, t2

    for t in range(n_tri):
        x0 = px[t, 0]; x1 = px[t, 1]; x2 = px[t, 2]
        y0 = py[t, 0]; y1 = py[t, 1]; y2 = py[t, 2]
        area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area <= 0.0:
            continue
        i0 = invd[t, 0]; i1 = invd[t, 1]; i2 = invd[t, 2]
        t0 = topleft[t, 0]; t1 = topleft[t, 1]; t2 = topleft[t, 2]

        mn = x0
        if x1 < mn: mn = x1
        if x2 < mn: mn = x2
        mx = x0
        if x1 > mx: mx = x1
        if x2 > mx: mx = x2
        ix0 = <int>ceil(mn - 0.5)
        ix1 = <int>floor(mx - 0.5)
        if ix0 < 0: ix0 = 0
        if ix1 > width - 1: ix1 = width - 1

        mn = y0
        if y1 < mn: mn = y1
        if y2 < mn: mn = y2
        mx = y0
        if y1 > mx: mx = y1
        if y2 > mx: mx = y2
        iy0 = <int>ceil(mn - 0.5)
        iy1 = <int>floor(mx - 0.5)
        if iy0 < 0: iy0 = 0
        if iy1 > height - 1: iy1 = height - 1

        if ix0 > ix1 or iy0 > iy1:
            continue

        for iy in range(iy0, iy1 + 1):
            cy = iy + 0.5
            for ix in range(ix0, ix1 + 1):
                cx = ix + 0.5
                e0 = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1)
                if e0 < 0.0 or (e0 == 0.0 and not t0):
                    continue
                e1 = (x0 - x2) * (cy - y2) - (y0 - y2) * (cx - x2)
                if e1 < 0.0 or (e1 == 0.0 and not t1):
                    continue
                e2 = (x1 - x0) * (cy - y0) - (y1 - y0) * (cx - x0)
                if e2 < 0.0 or (e2 == 0.0 and not t2):
                    continue
                l0 = e0 / area
                l1 = e1 / area
                l2 = e2 / area
                ivd = l0 * i0 + l1 * i1 + l2 * i2
                depth = 1.0 / ivd
                if depth < out_depth[iy, ix]:
                    out_depth[iy, ix] = depth
                    out_tri[iy, ix] = <int>t
                    out_bary[iy, ix, 0] = l0
                    out_bary[iy, ix, 1] = l1
                    out_bary[iy, ix, 2] = l2
