"""Exact linear algebra over a prime field F_p using int64 numpy arrays."""
from __future__ import annotations

import numpy as np

# products of two reduced entries must fit in int64
_MAX_PRIME = 3_000_000_000
# below this many entries plain Python beats numpy call overhead
_SMALL = 256


def _as_array(rows, ncols: int, p: int) -> np.ndarray:
    if p >= _MAX_PRIME:
        raise ValueError(f"prime {p} too large for int64 elimination")
    if len(rows) == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), ncols)
    return arr % p


def _rref_small(rows, ncols: int, p: int):
    m = [[int(v) % p for v in r] for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [v * inv % p for v in m[r]]
        pr = m[r]
        for i in range(nrows):
            f = m[i][c]
            if i != r and f:
                m[i] = [(a - f * b) % p for a, b in zip(m[i], pr)]
        pivots.append(c)
        r += 1
    return np.array(m[:r], dtype=np.int64).reshape(r, ncols), pivots


def rref(rows, ncols: int, p: int):
    """Reduced row echelon form. Returns (matrix, pivot columns)."""
    if len(rows) * ncols <= _SMALL and p < _MAX_PRIME:
        return _rref_small(rows, ncols, p)
    m = _as_array(rows, ncols, p)
    nrows = m.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace(rows, ncols: int, p: int) -> list[list[int]]:
    """Basis of {v : A v = 0} over F_p, one vector per free column."""
    red, pivots = rref(rows, ncols, p)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = int(-red[i, free]) % p
        basis.append(v)
    return basis


def rank(rows, ncols: int, p: int) -> int:
    return len(rref(rows, ncols, p)[1])


def solve(rows, rhs, ncols: int, p: int):
    """One solution x of A x = rhs, or None when inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1, p)
    if pivots and pivots[-1] == ncols:
        return None
    x = [0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = int(red[i, ncols])
    return x
