# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled step kernels; same contract as ``symwalk._pykernels``."""

import numpy as np

from .errors import LatticeOverflowError

ctypedef double complex cplx


cdef inline Py_ssize_t _wrap(Py_ssize_t i, Py_ssize_t n) nogil:
    if i < 0:
        return i + n
    if i >= n:
        return i - n
    return i


def pure_step(psi_in, coin_in, gate_in, int direction, bint cyclic):
    cdef cplx[:, :, ::1] psi = np.ascontiguousarray(psi_in, dtype=np.complex128)
    cdef cplx[:, ::1] coin = np.ascontiguousarray(coin_in, dtype=np.complex128)
    cdef Py_ssize_t nb = psi.shape[0], n = psi.shape[2]
    out_arr = np.empty((nb, 2, n), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    cdef cplx g00 = 1, g01 = 0, g10 = 0, g11 = 1
    cdef bint has_gate = gate_in is not None
    if has_gate:
        g = np.asarray(gate_in, dtype=np.complex128)
        g00, g01, g10, g11 = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    cdef cplx c00 = coin[0, 0], c01 = coin[0, 1], c10 = coin[1, 0], c11 = coin[1, 1]
    # component 0 moves by -direction, component 1 by +direction
    cdef Py_ssize_t s0 = -direction, s1 = direction
    cdef Py_ssize_t b, x, src0, src1
    cdef const cplx* p0
    cdef const cplx* p1
    cdef cplx* q0
    cdef cplx* q1
    cdef cplx a0, a1
    cdef bint overflow = False
    with nogil:
        for b in range(nb):
            p0 = &psi[b, 0, 0]
            p1 = &psi[b, 1, 0]
            q0 = &out[b, 0, 0]
            q1 = &out[b, 1, 0]
            if not cyclic:
                # the leaving edge of each component must be empty after the coin
                x = 0 if s0 < 0 else n - 1
                if c00 * p0[x] + c01 * p1[x] != 0:
                    overflow = True
                x = 0 if s1 < 0 else n - 1
                if c10 * p0[x] + c11 * p1[x] != 0:
                    overflow = True
                if overflow:
                    break
            for x in range(n):
                src0 = x - s0
                src1 = x - s1
                if cyclic:
                    src0 = _wrap(src0, n)
                    src1 = _wrap(src1, n)
                if 0 <= src0 < n:
                    a0 = c00 * p0[src0] + c01 * p1[src0]
                else:
                    a0 = 0
                if 0 <= src1 < n:
                    a1 = c10 * p0[src1] + c11 * p1[src1]
                else:
                    a1 = 0
                if has_gate:
                    q0[x] = g00 * a0 + g01 * a1
                    q1[x] = g10 * a0 + g11 * a1
                else:
                    q0[x] = a0
                    q1[x] = a1
    if overflow:
        raise LatticeOverflowError("walker reached the end of the line; enlarge half_width")
    return out_arr


def density_step(blocks_in, coin_super_in, chan_super_in, int direction, bint cyclic):
    cdef cplx[:, :, ::1] rho = np.ascontiguousarray(blocks_in, dtype=np.complex128)
    cdef cplx[:, ::1] Tv = np.ascontiguousarray(coin_super_in, dtype=np.complex128)
    cdef Py_ssize_t n = rho.shape[1]
    out_arr = np.empty((4, n, n), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    cdef bint has_chan = chan_super_in is not None
    cdef cplx[:, ::1] Mv
    if has_chan:
        Mv = np.ascontiguousarray(chan_super_in, dtype=np.complex128)
    else:
        Mv = np.eye(4, dtype=np.complex128)
    cdef cplx T[4][4]
    cdef cplx M[4][4]
    cdef int srow[4]
    cdef int scol[4]
    cdef int k, l
    for k in range(4):
        srow[k] = direction * (2 * (k // 2) - 1)
        scol[k] = direction * (2 * (k % 2) - 1)
        for l in range(4):
            T[k][l] = Tv[k, l]
            M[k][l] = Mv[k, l]
    cdef const cplx* r[4]
    cdef cplx* o[4]
    for k in range(4):
        r[k] = &rho[k, 0, 0]
        o[k] = &out[k, 0, 0]
    wbuf_arr = np.zeros((4, n), dtype=np.complex128)
    cdef cplx[:, ::1] wbuf = wbuf_arr
    cdef cplx* w[4]
    for k in range(4):
        w[k] = &wbuf[k, 0]
    cdef const cplx* src[4]
    cdef cplx t0, t1, t2, t3
    cdef Py_ssize_t x, y, sx, idx, edge, lo, hi, sh
    cdef bint overflow = False
    with nogil:
        if not cyclic:
            # nothing may be shifted off the line: the leaving edge rows/cols must vanish
            for k in range(4):
                edge = 0 if srow[k] < 0 else n - 1
                for y in range(n):
                    idx = edge * n + y
                    if T[k][0] * r[0][idx] + T[k][1] * r[1][idx] + T[k][2] * r[2][idx] + T[k][3] * r[3][idx] != 0:
                        overflow = True
                edge = 0 if scol[k] < 0 else n - 1
                for x in range(n):
                    idx = x * n + edge
                    if T[k][0] * r[0][idx] + T[k][1] * r[1][idx] + T[k][2] * r[2][idx] + T[k][3] * r[3][idx] != 0:
                        overflow = True
        if not overflow:
            for x in range(n):
                # row buffer w[k][y] = (T rho)_k at the source of (x, y)
                for k in range(4):
                    sx = x - srow[k]
                    if cyclic:
                        sx = _wrap(sx, n)
                    elif sx < 0 or sx >= n:
                        for y in range(n):
                            w[k][y] = 0
                        continue
                    for l in range(4):
                        src[l] = r[l] + sx * n
                    t0, t1, t2, t3 = T[k][0], T[k][1], T[k][2], T[k][3]
                    sh = scol[k]
                    # interior columns: y - sh stays in range
                    lo = 1 if sh > 0 else 0
                    hi = n - 1 if sh < 0 else n
                    for y in range(lo, hi):
                        w[k][y] = t0 * src[0][y - sh] + t1 * src[1][y - sh] + t2 * src[2][y - sh] + t3 * src[3][y - sh]
                    # the one wrapped (cycle) or empty (line) column
                    y = 0 if sh > 0 else n - 1
                    if cyclic:
                        idx = _wrap(y - sh, n)
                        w[k][y] = t0 * src[0][idx] + t1 * src[1][idx] + t2 * src[2][idx] + t3 * src[3][idx]
                    else:
                        w[k][y] = 0
                idx = x * n
                if has_chan:
                    for k in range(4):
                        t0, t1, t2, t3 = M[k][0], M[k][1], M[k][2], M[k][3]
                        for y in range(n):
                            o[k][idx + y] = t0 * w[0][y] + t1 * w[1][y] + t2 * w[2][y] + t3 * w[3][y]
                else:
                    for k in range(4):
                        for y in range(n):
                            o[k][idx + y] = w[k][y]
    if overflow:
        raise LatticeOverflowError("walker reached the end of the line; enlarge half_width")
    return out_arr
