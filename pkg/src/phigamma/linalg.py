"""Linear algebra over the chain rings Z/p^a.

Every nonzero residue mod p^a is a unit times a power of p, so Gaussian
elimination stays exact as long as each pivot has minimal p-valuation in
the remaining submatrix.  That observation drives both the Smith-style
diagonalization used by :func:`solve_linear_chain` and the Howell-style
canonical bases used for ideal and submodule arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def p_valuation(x: int, p: int, cap: int) -> int:
    """p-adic valuation of x mod p^cap, with v(0) = cap."""
    if x % (p**cap) == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _find_pivot(M: np.ndarray, t: int, p: int, a: int):
    """First entry of minimal valuation in the submatrix M[t:, t:]."""
    sub = M[t:, t:]
    if not sub.size or not sub.any():
        return None
    for v in range(a):
        mask = (sub % (p ** (v + 1))) != 0
        if mask.any():
            i, j = np.unravel_index(int(np.argmax(mask)), mask.shape)
            return v, t + int(i), t + int(j)
    return None


def smith_normal_form(mat, p: int, a: int):
    """Diagonalize ``mat`` over Z/p^a.

    Returns (D, U, V) with U @ mat @ V = D mod p^a, U and V invertible,
    and D diagonal with entries p^{v_1} | p^{v_2} | ... followed by zeros.
    """
    q = p**a
    M = np.array(mat, dtype=np.int64).reshape(len(mat), -1) % q
    m, n = M.shape
    U = np.eye(m, dtype=np.int64)
    V = np.eye(n, dtype=np.int64)
    t = 0
    while t < min(m, n):
        piv = _find_pivot(M, t, p, a)
        if piv is None:
            break
        v, i, j = piv
        M[[t, i]] = M[[i, t]]
        U[[t, i]] = U[[i, t]]
        M[:, [t, j]] = M[:, [j, t]]
        V[:, [t, j]] = V[:, [j, t]]
        pv = p**v
        unit = int(M[t, t]) // pv
        uinv = pow(unit, -1, q)
        M[t] = (M[t] * uinv) % q
        U[t] = (U[t] * uinv) % q
        col = M[:, t].copy()
        col[t] = 0
        cs = col // pv
        M = (M - np.outer(cs, M[t])) % q
        U = (U - np.outer(cs, U[t])) % q
        row = M[t].copy()
        row[t] = 0
        cs = row // pv
        M = (M - np.outer(M[:, t], cs)) % q
        V = (V - np.outer(V[:, t], cs)) % q
        t += 1
    return M, U, V


@dataclass(frozen=True)
class ChainSolution:
    """Solution set of a linear system over Z/p^a.

    ``particular is None`` certifies that no solution exists; this is a
    value, not a fault.  ``kernel`` generates all homogeneous solutions and
    ``kernel_size`` is the exact number of them.
    """

    particular: tuple[int, ...] | None
    kernel: tuple[tuple[int, ...], ...]
    kernel_size: int

    @property
    def solvable(self) -> bool:
        return self.particular is not None


def solve_linear_chain(mat, rhs, p: int, a: int) -> ChainSolution:
    """Solve mat @ x = rhs over Z/p^a, describing the full solution set."""
    q = p**a
    M = np.array(mat, dtype=np.int64).reshape(len(mat), -1) % q
    m, n = M.shape
    b = np.array(rhs, dtype=np.int64) % q
    D, U, V = smith_normal_form(M, p, a)
    c = (U @ b) % q
    y = np.zeros(n, dtype=np.int64)
    rank = 0
    kernel: list[np.ndarray] = []
    kernel_size = 1
    for i in range(min(m, n)):
        d = int(D[i, i])
        if d == 0:
            break
        rank += 1
        v = p_valuation(d, p, a)
        if int(c[i]) % d != 0:
            return ChainSolution(None, (), 0)
        y[i] = int(c[i]) // d
        if v > 0:
            e = np.zeros(n, dtype=np.int64)
            e[i] = p ** (a - v)
            kernel.append(e)
            kernel_size *= p**v
    for i in range(rank, m):
        if int(c[i]) % q != 0:
            return ChainSolution(None, (), 0)
    for j in range(rank, n):
        e = np.zeros(n, dtype=np.int64)
        e[j] = 1
        kernel.append(e)
        kernel_size *= q
    x = (V @ y) % q
    gens = tuple(tuple(int(w) for w in (V @ k) % q) for k in kernel)
    return ChainSolution(tuple(int(w) for w in x), gens, kernel_size)


def kernel_of(mat, p: int, a: int) -> ChainSolution:
    M = np.array(mat, dtype=np.int64).reshape(len(mat), -1)
    return solve_linear_chain(M, np.zeros(M.shape[0], dtype=np.int64), p, a)


# ----------------------------------------------------------------------
# Howell-style canonical bases for submodules of (Z/p^a)^n.


def howell_basis(rows, n: int, p: int, a: int) -> tuple[tuple[int, ...], ...]:
    """Canonical generating rows of the span of ``rows`` inside (Z/p^a)^n.

    Beyond plain echelon reduction, each pivot row with pivot p^v also
    contributes p^{a-v} times itself, so that membership can be decided by
    greedy reduction (the Howell property).
    """
    q = p**a
    work = [tuple(int(x) % q for x in r) for r in rows]
    work = [r for r in work if any(r)]
    basis: list[tuple[int, ...]] = []
    while work:
        work.sort(key=lambda r: (_lead(r), p_valuation(r[_lead(r)], p, a)))
        r = work.pop(0)
        if not any(r):
            continue
        j = _lead(r)
        v = p_valuation(r[j], p, a)
        unit = (r[j] // p**v) % q
        r = tuple((x * pow(unit, -1, q)) % q for x in r)
        rest = []
        for s in work:
            if any(s) and _lead(s) == j:
                c = (s[j] // p**v) % q
                s = tuple((x - c * y) % q for x, y in zip(s, r))
            if any(s):
                rest.append(s)
        work = rest
        if v > 0:
            tail = tuple((p ** (a - v) * x) % q for x in r)
            if any(tail):
                work.append(tail)
        basis.append(r)
    basis.sort(key=_lead)
    # reduce entries above each pivot to canonical representatives
    for i in range(len(basis) - 1, -1, -1):
        j = _lead(basis[i])
        pv = p ** p_valuation(basis[i][j], p, a)
        for k in range(i):
            c = basis[k][j] // pv
            if c:
                basis[k] = tuple(
                    (x - c * y) % q for x, y in zip(basis[k], basis[i])
                )
    return tuple(b for b in basis if any(b))


def _lead(row) -> int:
    for idx, x in enumerate(row):
        if x:
            return idx
    return len(row)


def reduce_against(basis, vec, p: int, a: int) -> tuple[int, ...]:
    """Remainder of ``vec`` after greedy reduction against a Howell basis."""
    q = p**a
    v = [int(x) % q for x in vec]
    for row in basis:
        j = _lead(row)
        if j >= len(v) or v[j] == 0:
            continue
        pv = p ** p_valuation(row[j], p, a)
        if v[j] % pv == 0:
            c = v[j] // pv
            for k in range(len(v)):
                v[k] = (v[k] - c * row[k]) % q
    return tuple(v)


def in_span(basis, vec, p: int, a: int) -> bool:
    return not any(reduce_against(basis, vec, p, a))


def span_size(basis, p: int, a: int) -> int:
    size = 1
    for row in basis:
        v = p_valuation(row[_lead(row)], p, a)
        size *= p ** (a - v)
    return size


def express_in_basis(basis, vec, p: int, a: int) -> tuple[int, ...] | None:
    """Coefficients writing ``vec`` as a combination of Howell basis rows."""
    q = p**a
    v = [int(x) % q for x in vec]
    coeffs = []
    for row in basis:
        j = _lead(row)
        c = 0
        if j < len(v) and v[j]:
            pv = p ** p_valuation(row[j], p, a)
            if v[j] % pv != 0:
                return None
            c = v[j] // pv
            for k in range(len(v)):
                v[k] = (v[k] - c * row[k]) % q
        coeffs.append(c % q)
    if any(v):
        return None
    return tuple(coeffs)
