"""Numpy step kernels; the fallback used when the compiled extension is unavailable.

Contract shared with ``_ckernels``:

``pure_step(psi, coin, gate, direction, cyclic)``
    ``psi`` is a batch ``(B, 2, N)``. Returns ``gate . S . coin . psi`` where
    ``S`` moves coin component ``c`` by ``direction * (2c - 1)`` sites.
``density_step(blocks, coin_super, chan_super, direction, cyclic)``
    ``blocks`` is ``(4, N, N)`` with block ``2c + d`` holding ``<c,x|rho|d,y>``.
    Applies the 4x4 coin superoperator, the conditional shift on both sides,
    then the 4x4 channel superoperator.

On a line, amplitude that would leave the lattice raises ``LatticeOverflowError``.
"""

import numpy as np

from .errors import LatticeOverflowError


def _shift_line(src, dst, s, axis):
    n = src.shape[axis]
    lead = [slice(None)] * src.ndim
    tail = [slice(None)] * src.ndim
    edge = [slice(None)] * src.ndim
    if s == -1:
        edge[axis] = 0
        lead[axis], tail[axis] = slice(0, n - 1), slice(1, n)
    else:
        edge[axis] = n - 1
        lead[axis], tail[axis] = slice(1, n), slice(0, n - 1)
    if np.any(src[tuple(edge)]):
        raise LatticeOverflowError("walker reached the end of the line; enlarge half_width")
    dst[tuple(lead)] = src[tuple(tail)]


def _shift(src, s, axis, cyclic):
    if cyclic:
        return np.roll(src, s, axis=axis)
    dst = np.zeros_like(src)
    _shift_line(src, dst, s, axis)
    return dst


def pure_step(psi, coin, gate, direction, cyclic):
    mixed = np.einsum("ab,kbx->kax", coin, psi)
    out = np.empty_like(mixed)
    for c in (0, 1):
        out[:, c] = _shift(mixed[:, c], direction * (2 * c - 1), -1, cyclic)
    if gate is not None:
        out = np.einsum("ab,kbx->kax", gate, out)
    return out


def density_step(blocks, coin_super, chan_super, direction, cyclic):
    n = blocks.shape[-1]
    mixed = (coin_super @ blocks.reshape(4, -1)).reshape(4, n, n)
    shifted = np.empty_like(mixed)
    for k in range(4):
        c, d = divmod(k, 2)
        sc, sd = direction * (2 * c - 1), direction * (2 * d - 1)
        shifted[k] = _shift(_shift(mixed[k], sc, 0, cyclic), sd, 1, cyclic)
    if chan_super is None:
        return shifted
    return (chan_super @ shifted.reshape(4, -1)).reshape(4, n, n)
