"""Brute-force reference implementations used only by the tests.

Everything here works on the full ``2N``-dimensional coin (x) position
space with dense matrices built by explicit loops, sharing no code with
the package's block kernels.
"""

import cmath
import math

import numpy as np


def coin(xi, theta, zeta):
    e = cmath.exp
    return np.array(
        [
            [e(1j * xi) * math.cos(theta), e(1j * zeta) * math.sin(theta)],
            [e(-1j * zeta) * math.sin(theta), -e(-1j * xi) * math.cos(theta)],
        ]
    )


def labels(half_width=None, sites=None):
    if sites is not None:
        return list(range(sites))
    return list(range(-half_width, half_width + 1))


def step_unitary(site_labels, cyclic, c_mat, after=None, direction=1):
    """Dense ``(G (x) I) S (C (x) I)`` on basis ``|c, x>`` with flat index ``c * N + i``."""
    n = len(site_labels)
    pos = {x: i for i, x in enumerate(site_labels)}
    shift = np.zeros((2 * n, 2 * n), dtype=complex)
    for c in (0, 1):
        move = direction * (1 if c == 1 else -1)
        for i, x in enumerate(site_labels):
            y = x + move
            if cyclic:
                y %= n
            if y in pos:
                shift[c * n + pos[y], c * n + i] = 1.0
    u = shift @ np.kron(c_mat, np.eye(n))
    if after is not None:
        u = np.kron(after, np.eye(n)) @ u
    return u


def initial_vector(site_labels, amps, x0=0):
    n = len(site_labels)
    v = np.zeros(2 * n, dtype=complex)
    i = site_labels.index(x0)
    v[i], v[n + i] = amps
    return v


def evolve(site_labels, cyclic, c_mat, steps, amps, after=None, kraus=None, direction=1):
    """Dense density evolution; returns the positional distribution."""
    u = step_unitary(site_labels, cyclic, c_mat, after, direction)
    v = initial_vector(site_labels, amps)
    rho = np.outer(v, v.conj())
    n = len(site_labels)
    big = None if kraus is None else [np.kron(e, np.eye(n)) for e in kraus]
    for _ in range(steps):
        rho = u @ rho @ u.conj().T
        if big is not None:
            rho = sum(k @ rho @ k.conj().T for k in big)
    d = np.real(np.diag(rho))
    return d[:n] + d[n:]


def gad_kraus(p, chi):
    """Textbook generalized amplitude damping towards |0> with weight ``chi`` on it."""
    return [
        math.sqrt(chi) * np.array([[1, 0], [0, math.sqrt(1 - p)]]),
        math.sqrt(chi) * np.array([[0, math.sqrt(p)], [0, 0]]),
        math.sqrt(1 - chi) * np.array([[math.sqrt(1 - p), 0], [0, 1]]),
        math.sqrt(1 - chi) * np.array([[0, 0], [math.sqrt(p), 0]]),
    ]


def hadamard_line_recurrence(steps, amps):
    """Amplitude recurrence for the Hadamard walk on plain dicts (no arrays, no kernels)."""
    s = 1 / math.sqrt(2)
    state = {0: tuple(amps)}
    for _ in range(steps):
        nxt = {}
        for x, (a, b) in state.items():
            up, down = s * (a + b), s * (a - b)
            l0, l1 = nxt.get(x - 1, (0, 0))
            nxt[x - 1] = (l0 + up, l1)
            r0, r1 = nxt.get(x + 1, (0, 0))
            nxt[x + 1] = (r0, r1 + down)
        state = nxt
    return {x: abs(a) ** 2 + abs(b) ** 2 for x, (a, b) in state.items()}
