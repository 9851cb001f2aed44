"""Finite-window coordinates for series operators.

A window [lo, hi) crossed with a basis of the coefficient space turns the
semilinear operators into integer matrices over Z/p^a; images outside the
window are projected away, so kernel and cokernel computations are only
meaningful together with the stability checks run by the callers.
"""

from __future__ import annotations

import numpy as np

from .series import LaurentSeries, SeriesRing


class Window:
    """Degrees [lo, hi) tensored with coefficient rows (default: full basis)."""

    def __init__(self, ring: SeriesRing, lo: int, hi: int, rows=None):
        if lo > 0 or hi <= 0:
            raise ValueError("window must contain degree 0")
        self.ring = ring
        self.lo = lo
        self.hi = hi
        if rows is None:
            rows = [ring.algebra.basis_vector(i) for i in range(ring.algebra.rank)]
        self.rows = [tuple(r) for r in rows]

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi)

    @property
    def dim(self) -> int:
        return (self.hi - self.lo) * len(self.rows)

    def basis_series(self):
        for d in self.degrees:
            for r in self.rows:
                yield self.ring.series({d: r}, exact=True)

    def to_vector(self, x: LaurentSeries) -> np.ndarray:
        """Coordinates of a series supported in the window, full basis only."""
        rank = self.ring.algebra.rank
        if len(self.rows) != rank:
            raise ValueError("vectorization needs the full coefficient basis")
        out = np.zeros(self.dim, dtype=np.int64)
        for d, c in x.coeffs.items():
            if self.lo <= d < self.hi:
                base = (d - self.lo) * rank
                for i, v in enumerate(c):
                    out[base + i] = v
        return out

    def to_series(self, vec) -> LaurentSeries:
        A = self.ring.algebra
        n = len(self.rows)
        coeffs: dict[int, tuple] = {}
        for idx, v in enumerate(vec):
            v = int(v) % A.base.q
            if v:
                d = self.lo + idx // n
                term = A.scalar(v, self.rows[idx % n])
                coeffs[d] = A.add(coeffs.get(d, A.zero()), term)
        return self.ring.series(coeffs, exact=True)

    def operator_matrix(self, op) -> np.ndarray:
        """Matrix of a series operator, window-projected, columns first."""
        cols = []
        for b in self.basis_series():
            img = op(b)
            col = np.zeros(self.dim, dtype=np.int64)
            rank = len(self.rows)
            for d, c in img.coeffs.items():
                if self.lo <= d < self.hi:
                    coords = self._express(c)
                    if coords is None:
                        raise ValueError(
                            "operator image leaves the coefficient span"
                        )
                    base = (d - self.lo) * rank
                    for i, v in enumerate(coords):
                        col[base + i] = v
            cols.append(col)
        return np.stack(cols, axis=1)

    def _express(self, c):
        rank = self.ring.algebra.rank
        if len(self.rows) == rank and all(
            self.rows[i] == self.ring.algebra.basis_vector(i) for i in range(rank)
        ):
            return c
        from .linalg import express_in_basis

        return express_in_basis(
            self.rows, c, self.ring.algebra.base.p, self.ring.algebra.base.a
        )
