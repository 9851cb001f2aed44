"""Finite coefficient rings and their Frobenius-equation solvers.

The coefficient objects are finite Z/p^a-algebras presented by structure
constants on a free module basis.  On top of them live:

* nilradical filtrations (powers of the nilradical, p included) whose
  successive quotients are square-zero, the induction ladder used by the
  classification algorithm;
* complete orthogonal idempotent decompositions into local factors;
* Galois rings GR(p^a, m), the unramified extensions of Z/p^a, with their
  canonical Frobenius;
* the split model A^f of W(k) tensor A with the cyclic-shift Frobenius,
  together with its norm map and the telescoping kernel solver;
* additive (Artin-Schreier) and multiplicative (Lang) Frobenius-equation
  solvers that grow the Galois ring on demand and report the extension
  degree they used.

All values are immutable after construction and all operations are pure
functions, so concurrent read access needs no coordination.  Coordinates
are python integers, which makes the arithmetic overflow-free for any
modulus p^a.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    KernelConditionFailed,
    MathError,
    NoEmbedding,
    NotARingMap,
    NotAUnit,
    RingMismatch,
)
from .linalg import (
    express_in_basis,
    howell_basis,
    in_span,
    kernel_of,
    p_valuation,
    reduce_against,
    solve_linear_chain,
    span_size,
)

_ENUMERATION_GUARD = 1_000_000


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimePower:
    """An odd prime p and exponent a; the scalar ring is Z/p^a."""

    p: int
    a: int

    def __post_init__(self):
        if not _is_prime(self.p) or self.p < 3:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.a < 1:
            raise ValueError(f"a must be positive, got {self.a}")

    @property
    def q(self) -> int:
        return self.p**self.a


class CoeffAlgebra:
    """A finite free Z/p^a-algebra given by rank^3 structure constants.

    Elements are coordinate tuples of length ``rank`` with entries in
    [0, p^a).  Associativity, commutativity and unitality are checked on
    the generators at construction time.
    """

    __slots__ = (
        "base",
        "rank",
        "table",
        "one",
        "_nil",
        "_local",
        "_units",
        "_mulrows",
    )

    def __init__(self, base: PrimePower, table, one, check: bool = True):
        q = base.q
        self.base = base
        self.rank = len(table)
        self.table = tuple(
            tuple(tuple(int(c) % q for c in row) for row in plane)
            for plane in table
        )
        self.one = tuple(int(c) % q for c in one)
        if len(self.one) != self.rank or any(
            len(plane) != self.rank or any(len(r) != self.rank for r in plane)
            for plane in self.table
        ):
            raise ValueError("structure constant table has wrong shape")
        self._nil = None
        self._local = None
        self._units = None
        self._mulrows = self.table
        if check:
            self._check_axioms()

    # -- basic structure -------------------------------------------------

    def _check_axioms(self):
        n = self.rank
        gens = [self.basis_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                if self.mul(gens[i], gens[j]) != self.mul(gens[j], gens[i]):
                    raise ValueError("multiplication table is not commutative")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    left = self.mul(self.mul(gens[i], gens[j]), gens[k])
                    right = self.mul(gens[i], self.mul(gens[j], gens[k]))
                    if left != right:
                        raise ValueError("multiplication table is not associative")
        for i in range(n):
            if self.mul(self.one, gens[i]) != gens[i]:
                raise ValueError("designated unit element does not act as 1")

    @property
    def size(self) -> int:
        return self.base.q**self.rank

    def basis_vector(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def is_zero(self, x) -> bool:
        return not any(x)

    def add(self, x, y) -> tuple[int, ...]:
        q = self.base.q
        return tuple((u + v) % q for u, v in zip(x, y))

    def sub(self, x, y) -> tuple[int, ...]:
        q = self.base.q
        return tuple((u - v) % q for u, v in zip(x, y))

    def neg(self, x) -> tuple[int, ...]:
        q = self.base.q
        return tuple((-u) % q for u in x)

    def scalar(self, c: int, x) -> tuple[int, ...]:
        q = self.base.q
        c %= q
        return tuple((c * u) % q for u in x)

    def mul(self, x, y) -> tuple[int, ...]:
        q = self.base.q
        if self.rank == 1:
            return ((x[0] * y[0] * self.table[0][0][0]) % q,)
        out = [0] * self.rank
        table = self.table
        for i, xi in enumerate(x):
            if not xi:
                continue
            plane = table[i]
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = xi * yj
                row = plane[j]
                for k in range(self.rank):
                    if row[k]:
                        out[k] += c * row[k]
        return tuple(v % q for v in out)

    def power(self, x, n: int) -> tuple[int, ...]:
        if n < 0:
            return self.power(self.invert(x), -n)
        result = self.one
        base = x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def elements(self):
        if self.size > _ENUMERATION_GUARD:
            raise MathError(f"refusing to enumerate {self.size} ring elements")
        return itertools.product(range(self.base.q), repeat=self.rank)

    def units(self) -> tuple[tuple[int, ...], ...]:
        if self._units is None:
            self._units = tuple(x for x in self.elements() if self.is_unit(x))
        return self._units

    # -- units -----------------------------------------------------------

    def mult_matrix(self, x) -> list[list[int]]:
        """Matrix of multiplication by x on the module basis (columns)."""
        cols = [self.mul(x, self.basis_vector(j)) for j in range(self.rank)]
        return [[cols[j][i] for j in range(self.rank)] for i in range(self.rank)]

    def is_unit(self, x) -> bool:
        p = self.base.p
        m = np.array(self.mult_matrix(x), dtype=np.int64) % p
        return _rank_mod_p(m, p) == self.rank

    def invert(self, x) -> tuple[int, ...]:
        sol = solve_linear_chain(
            self.mult_matrix(x), self.one, self.base.p, self.base.a
        )
        if sol.particular is None:
            raise NotAUnit(self._non_unit_message(x))
        return tuple(sol.particular)

    def _non_unit_message(self, x) -> str:
        try:
            for idx, factor in enumerate(local_decompose(self)):
                xi = factor.projection.apply(x)
                filt = nil_filtration(factor.algebra)
                if filt.membership(1, xi):
                    return (
                        f"element {x} vanishes in the residue field of "
                        f"local factor {idx}"
                    )
        except MathError:
            pass
        return f"element {x} is not a unit"

    def elem(self, coords) -> "AlgElem":
        return AlgElem(self, tuple(int(c) % self.base.q for c in coords))

    # -- identity --------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CoeffAlgebra)
            and self.base == other.base
            and self.table == other.table
            and self.one == other.one
        )

    def __hash__(self) -> int:
        return hash((self.base, self.table, self.one))

    def __repr__(self) -> str:
        return f"CoeffAlgebra(p={self.base.p}, a={self.base.a}, rank={self.rank})"

    def to_json(self) -> dict:
        return {
            "p": self.base.p,
            "a": self.base.a,
            "rank": self.rank,
            "mul_table": [
                [[int(c) for c in row] for row in plane] for plane in self.table
            ],
            "one": [int(c) for c in self.one],
        }

    @staticmethod
    def from_json(doc: dict) -> "CoeffAlgebra":
        return CoeffAlgebra(
            PrimePower(doc["p"], doc["a"]), doc["mul_table"], doc["one"]
        )


def _rank_mod_p(mat: np.ndarray, p: int) -> int:
    m = mat.copy() % p
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % p
        r += 1
        if r == rows:
            break
    return r


@dataclass(frozen=True)
class AlgElem:
    """A coordinate vector in a coefficient algebra, with operator sugar."""

    algebra: CoeffAlgebra
    coords: tuple[int, ...]

    def __add__(self, other: "AlgElem") -> "AlgElem":
        return AlgElem(self.algebra, self.algebra.add(self.coords, other.coords))

    def __sub__(self, other: "AlgElem") -> "AlgElem":
        return AlgElem(self.algebra, self.algebra.sub(self.coords, other.coords))

    def __mul__(self, other: "AlgElem") -> "AlgElem":
        return AlgElem(self.algebra, self.algebra.mul(self.coords, other.coords))

    def __pow__(self, n: int) -> "AlgElem":
        return AlgElem(self.algebra, self.algebra.power(self.coords, n))

    def __neg__(self) -> "AlgElem":
        return AlgElem(self.algebra, self.algebra.neg(self.coords))

    def is_unit(self) -> bool:
        return self.algebra.is_unit(self.coords)

    def inverse(self) -> "AlgElem":
        return AlgElem(self.algebra, self.algebra.invert(self.coords))


# ----------------------------------------------------------------------
# convenient constructors


def zmod(p: int, a: int) -> CoeffAlgebra:
    """The rank-one algebra Z/p^a."""
    return CoeffAlgebra(PrimePower(p, a), (((1,),),), (1,))


def monogenic_algebra(p: int, a: int, relation) -> CoeffAlgebra:
    """(Z/p^a)[x]/(x^r - relation) for a relation of degree < r.

    ``relation`` lists the coordinates of x^r on the power basis, so for
    example ``monogenic_algebra(3, 1, (0, 0))`` is F_3[x]/(x^2) and
    ``monogenic_algebra(3, 1, (2, 0))`` is F_9 presented by x^2 = -1.
    """
    base = PrimePower(p, a)
    q = base.q
    r = len(relation)
    rel = tuple(int(c) % q for c in relation)
    # coordinates of x^k for k < 2r - 1
    powers = []
    cur = [0] * r
    cur[0] = 1
    for _ in range(2 * r - 1):
        powers.append(tuple(cur))
        nxt = [0] * r
        for i in range(r - 1):
            nxt[i + 1] = cur[i]
        if cur[r - 1]:
            for i in range(r):
                nxt[i] = (nxt[i] + cur[r - 1] * rel[i]) % q
        cur = nxt
    table = tuple(
        tuple(powers[i + j] for j in range(r)) for i in range(r)
    )
    return CoeffAlgebra(base, table, powers[0])


def product_algebra(a1: CoeffAlgebra, a2: CoeffAlgebra) -> CoeffAlgebra:
    """Direct product ring, coordinates concatenated."""
    if a1.base != a2.base:
        raise RingMismatch("factors live over different scalar rings")
    r1, r2 = a1.rank, a2.rank
    n = r1 + r2
    zero = [0] * n

    def emb(i, j):
        row = list(zero)
        if i < r1 and j < r1:
            for k, c in enumerate(a1.table[i][j]):
                row[k] = c
        elif i >= r1 and j >= r1:
            for k, c in enumerate(a2.table[i - r1][j - r1]):
                row[r1 + k] = c
        return tuple(row)

    table = tuple(tuple(emb(i, j) for j in range(n)) for i in range(n))
    one = tuple(list(a1.one) + list(a2.one))
    return CoeffAlgebra(a1.base, table, one)


# ----------------------------------------------------------------------
# ring homomorphisms


@dataclass(frozen=True)
class RingMap:
    """A ring homomorphism between coefficient algebras, given on generators.

    Scalars transport along Z/p^a -> Z/p^{a'}, so the target exponent may
    not exceed the source exponent.
    """

    src: CoeffAlgebra
    dst: CoeffAlgebra
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.src.base.p != self.dst.base.p:
            raise NotARingMap("source and target have different primes")
        if self.dst.base.a > self.src.base.a:
            raise NotARingMap("target exponent exceeds source exponent")
        if len(self.images) != self.src.rank:
            raise NotARingMap("one generator image required per generator")
        if self.apply(self.src.one) != self.dst.one:
            raise NotARingMap("unit element is not preserved")
        for i in range(self.src.rank):
            for j in range(i, self.src.rank):
                prod = self.src.mul(
                    self.src.basis_vector(i), self.src.basis_vector(j)
                )
                lhs = self.apply(prod)
                rhs = self.dst.mul(self.images[i], self.images[j])
                if lhs != rhs:
                    raise NotARingMap(
                        f"structure constants break at generators ({i}, {j})"
                    )

    def apply(self, x) -> tuple[int, ...]:
        out = self.dst.zero()
        for c, img in zip(x, self.images):
            if c:
                out = self.dst.add(out, self.dst.scalar(c, img))
        return out


def identity_map(a: CoeffAlgebra) -> RingMap:
    return RingMap(a, a, tuple(a.basis_vector(i) for i in range(a.rank)))


# ----------------------------------------------------------------------
# nilradical filtration


@dataclass(frozen=True)
class NilFiltration:
    """Powers of the nilradical I_0 = A > I_1 > ... > I_e = 0.

    ``levels[j]`` is a Howell basis of the j-th power of the nilradical
    (with p included in I_1 since p is nilpotent in A).  Each successive
    quotient I_j / I_{j+1} is killed by I_1, hence square-zero inside
    A / I_{j+1}, and A / I_1 is a product of finite fields.
    """

    algebra: CoeffAlgebra
    levels: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def nilpotency_index(self) -> int:
        return len(self.levels) - 1

    def membership(self, j: int, x) -> bool:
        if j <= 0:
            return True
        if j >= len(self.levels):
            return not any(x)
        return in_span(self.levels[j], x, self.algebra.base.p, self.algebra.base.a)

    def reduce(self, j: int, x) -> tuple[int, ...]:
        if j >= len(self.levels):
            return tuple(int(c) % self.algebra.base.q for c in x)
        return reduce_against(
            self.levels[j], x, self.algebra.base.p, self.algebra.base.a
        )

    def residue_size(self) -> int:
        """Cardinality of the residue ring A / I_1."""
        inner = span_size(self.levels[1], self.algebra.base.p, self.algebra.base.a)
        return self.algebra.size // inner


def nil_filtration(a: CoeffAlgebra) -> NilFiltration:
    if a._nil is not None:
        return a._nil
    p, exp = a.base.p, a.base.a
    n = a.rank
    # Frobenius z -> z^p is F_p-linear on A/p; the nilradical mod p is the
    # kernel of a sufficiently high power of it.
    frob_cols = [a.power(a.basis_vector(i), p) for i in range(n)]
    F = np.array(frob_cols, dtype=np.int64).T % p
    s = 1
    while p**s < n:
        s += 1
    Fs = np.eye(n, dtype=np.int64)
    for _ in range(s):
        Fs = (F @ Fs) % p
    ker = kernel_of(Fs, p, 1)
    gens = [tuple(int(c) for c in g) for g in ker.kernel]
    gens += [a.scalar(p, a.basis_vector(i)) for i in range(n)]
    level1 = howell_basis(gens, n, p, exp)
    levels = [howell_basis([a.basis_vector(i) for i in range(n)], n, p, exp)]
    levels.append(level1)
    while levels[-1]:
        prods = [a.mul(x, y) for x in levels[-1] for y in level1]
        levels.append(howell_basis(prods, n, p, exp))
    filt = NilFiltration(a, tuple(levels))
    a._nil = filt
    return filt


# ----------------------------------------------------------------------
# local decomposition


@dataclass(frozen=True)
class LocalFactor:
    """One local factor e*A of a coefficient algebra.

    ``section_rows[k]`` gives the coordinates inside A of the k-th basis
    vector of the factor, so projection followed by the section is
    multiplication by the idempotent.
    """

    idempotent: tuple[int, ...]
    algebra: CoeffAlgebra
    projection: RingMap
    section_rows: tuple[tuple[int, ...], ...]

    def embed(self, coords) -> tuple[int, ...]:
        amb = self.projection.src
        out = amb.zero()
        for c, row in zip(coords, self.section_rows):
            if c:
                out = amb.add(out, amb.scalar(c, row))
        return out


def local_decompose(a: CoeffAlgebra) -> tuple[LocalFactor, ...]:
    """Complete orthogonal idempotent decomposition into local factors."""
    if a._local is not None:
        return a._local
    p, exp = a.base.p, a.base.a
    n = a.rank
    idems_mod_p = _idempotents_mod_p(a)
    idems = [_hensel_idempotent(a, e) for e in idems_mod_p]
    idems.sort()
    total = a.zero()
    for e in idems:
        total = a.add(total, e)
        for f in idems:
            if e != f and any(a.mul(e, f)):
                raise MathError("idempotent family is not orthogonal")
    if total != a.one:
        raise MathError("idempotents do not sum to 1")
    factors = []
    for e in idems:
        rows = howell_basis(
            [a.mul(e, a.basis_vector(i)) for i in range(n)], n, p, exp
        )
        if any(
            p_valuation(r[_lead_index(r)], p, exp) != 0 for r in rows
        ):
            raise MathError("local factor is not a free Z/p^a-module")
        k = len(rows)
        # structure constants of the factor in the Howell basis
        table = []
        for i in range(k):
            plane = []
            for j in range(k):
                prod = a.mul(rows[i], rows[j])
                coeffs = express_in_basis(rows, prod, p, exp)
                if coeffs is None:
                    raise MathError("factor basis is not multiplicatively closed")
                plane.append(coeffs)
            table.append(tuple(plane))
        one_coords = express_in_basis(rows, e, p, exp)
        factor_alg = CoeffAlgebra(a.base, tuple(table), one_coords)
        proj_images = []
        for i in range(n):
            img = express_in_basis(rows, a.mul(e, a.basis_vector(i)), p, exp)
            proj_images.append(img)
        proj = RingMap(a, factor_alg, tuple(proj_images))
        factors.append(LocalFactor(e, factor_alg, proj, rows))
    a._local = tuple(factors)
    return a._local


def _lead_index(row) -> int:
    for i, x in enumerate(row):
        if x:
            return i
    return 0


def _idempotents_mod_p(a: CoeffAlgebra) -> list[tuple[int, ...]]:
    """Primitive idempotents of A/p by eigen-splitting Frobenius-fixed elements."""
    p = a.base.p
    n = a.rank

    def red(x):
        return tuple(c % p for c in x)

    def mul_p(x, y):
        return red(a.mul(x, y))

    frob_cols = [red(a.power(a.basis_vector(i), p)) for i in range(n)]
    F = np.array(frob_cols, dtype=np.int64).T % p
    fixed = kernel_of((F - np.eye(n, dtype=np.int64)) % p, p, 1)
    basis_fixed = [tuple(int(c) for c in g) for g in fixed.kernel]
    idems = [red(a.one)]
    for z in basis_fixed:
        refined = []
        for e in idems:
            w = mul_p(z, e)
            pieces = []
            for lam in range(p):
                # Lagrange projector onto the z = lam eigenspace; z^p = z
                # so multiplication by z is diagonalizable over F_p.
                proj = e
                denom = 1
                for mu in range(p):
                    if mu == lam:
                        continue
                    shift = red(a.sub(w, a.scalar(mu, e)))
                    proj = mul_p(proj, shift)
                    denom = (denom * (lam - mu)) % p
                proj = red(a.scalar(pow(denom, -1, p), proj))
                if any(proj):
                    pieces.append(proj)
            refined.extend(pieces if pieces else [e])
        idems = refined
    return idems


def _hensel_idempotent(a: CoeffAlgebra, e_bar) -> tuple[int, ...]:
    e = tuple(e_bar)
    for _ in range(8 * a.base.a + 8):
        sq = a.mul(e, e)
        if sq == e:
            return e
        # e <- 3e^2 - 2e^3 fixes idempotents and contracts the error
        e = a.sub(a.scalar(3, sq), a.scalar(2, a.mul(sq, e)))
    raise MathError("idempotent lift did not converge")


# ----------------------------------------------------------------------
# public wrappers for the operations named in the API


def invert_unit(a: CoeffAlgebra, x):
    """Inverse of a unit; raises NotAUnit with a residue-field witness."""
    if isinstance(x, AlgElem):
        return AlgElem(a, a.invert(x.coords))
    return a.invert(tuple(x))


# ----------------------------------------------------------------------
# polynomial utilities over F_p (coefficient lists, low degree first)


def _pnorm(f: list[int], p: int) -> list[int]:
    f = [c % p for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _pnorm(out, p)


def _pmod(f, g, p):
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg and f:
        c = (f[-1] * inv) % p
        shift = len(f) - 1 - dg
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - c * b) % p
        f = _pnorm(f, p)
        if not f:
            break
    return f


def _ppowmod(f, e, mod, p):
    result = [1]
    base = _pmod(list(f), mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def _pgcd(f, g, p):
    f, g = _pnorm(list(f), p), _pnorm(list(g), p)
    while g:
        f, g = g, _pmod(f, g, p)
    if f:
        inv = pow(f[-1], -1, p)
        f = [(c * inv) % p for c in f]
    return f


def _is_irreducible(f, p) -> bool:
    m = len(f) - 1
    if m < 1:
        return False
    x = [0, 1]
    xqm = _ppowmod(x, p**m, f, p)
    if _pnorm([a - b for a, b in zip_longest_pad(xqm, x)], p):
        return False
    for r in _prime_divisors(m):
        xq = _ppowmod(x, p ** (m // r), f, p)
        diff = _pnorm([a - b for a, b in zip_longest_pad(xq, x)], p)
        if len(_pgcd(f, diff, p)) > 1:
            return False
    return True


def zip_longest_pad(f, g):
    n = max(len(f), len(g))
    return zip(f + [0] * (n - len(f)), g + [0] * (n - len(g)))


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def canonical_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree m over F_p.

    Low coefficients are listed first and the order is ascending on the
    tuple (c_0, ..., c_{m-1}); the same integer tuple is reused verbatim as
    the lift to every Z/p^a, which keeps extension towers reproducible.
    """
    if m == 1:
        return (0,)
    for coeffs in itertools.product(range(p), repeat=m):
        f = list(coeffs) + [1]
        if _is_irreducible(f, p):
            return coeffs
    raise MathError(f"no irreducible of degree {m} over F_{p}")


# ----------------------------------------------------------------------
# Galois rings


class GaloisRing:
    """GR(p^a, m): the unramified degree-m extension of Z/p^a.

    Elements are coordinate tuples on the power basis of a monic degree-m
    polynomial whose reduction is irreducible over F_p.  The stored
    Frobenius is the unique ring automorphism reducing to x -> x^p; it
    fixes Z/p^a pointwise and has exact order m.
    """

    __slots__ = ("base", "degree", "modulus", "algebra", "frob_matrix", "_residue")

    def __init__(self, base: PrimePower, modulus: tuple[int, ...]):
        self.base = base
        self.degree = len(modulus)
        self.modulus = tuple(int(c) % base.q for c in modulus)
        if self.degree > 1 and not _is_irreducible(
            [c % base.p for c in self.modulus] + [1], base.p
        ):
            raise ValueError("modulus is not irreducible mod p")
        rel = tuple((-c) % base.q for c in self.modulus)
        self.algebra = monogenic_algebra(base.p, base.a, rel)
        self._residue = None
        self.frob_matrix = self._build_frobenius()

    @property
    def size(self) -> int:
        return self.base.q**self.degree

    @property
    def residue_size(self) -> int:
        return self.base.p**self.degree

    def zero(self):
        return self.algebra.zero()

    def one(self):
        return self.algebra.one

    def gen(self):
        if self.degree == 1:
            return self.algebra.zero()
        return self.algebra.basis_vector(1)

    def _build_frobenius(self):
        if self.degree == 1:
            return ((1,),)
        A = self.algebra
        r = A.power(self.gen(), self.base.p)
        # Newton-lift until r is an exact root of the modulus
        for _ in range(8 * self.base.a + 8):
            val = self._eval_modulus(r)
            if not any(val):
                break
            deriv = self._eval_modulus_derivative(r)
            r = A.sub(r, A.mul(val, A.invert(deriv)))
        else:
            raise MathError("Frobenius root lift did not converge")
        cols = []
        power = A.one
        for _ in range(self.degree):
            cols.append(power)
            power = A.mul(power, r)
        return tuple(
            tuple(cols[j][i] for j in range(self.degree))
            for i in range(self.degree)
        )

    def _eval_modulus(self, x):
        A = self.algebra
        acc = A.power(x, self.degree)
        power = A.one
        for c in self.modulus:
            if c:
                acc = A.add(acc, A.scalar(c, power))
            power = A.mul(power, x)
        return acc

    def _eval_modulus_derivative(self, x):
        A = self.algebra
        acc = A.scalar(self.degree, A.power(x, self.degree - 1))
        power = A.one
        for i, c in enumerate(self.modulus):
            if i >= 1 and c:
                acc = A.add(acc, A.scalar((i * c), A.power(x, i - 1)))
            power = A.mul(power, x)
        return acc

    def frobenius(self, x) -> tuple[int, ...]:
        q = self.base.q
        out = [0] * self.degree
        for j, c in enumerate(x):
            if c:
                for i in range(self.degree):
                    out[i] = (out[i] + c * self.frob_matrix[i][j]) % q
        return tuple(out)

    def frobenius_iter(self, x, k: int) -> tuple[int, ...]:
        for _ in range(k % self.degree):
            x = self.frobenius(x)
        return x

    def residue(self, x) -> tuple[int, ...]:
        return tuple(c % self.base.p for c in x)

    def residue_ring(self) -> "GaloisRing":
        if self._residue is None:
            if self.base.a == 1:
                self._residue = self
            else:
                self._residue = GaloisRing(
                    PrimePower(self.base.p, 1),
                    tuple(c % self.base.p for c in self.modulus),
                )
        return self._residue

    def __eq__(self, other):
        return (
            isinstance(other, GaloisRing)
            and self.base == other.base
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.base, self.modulus))

    def __repr__(self):
        return f"GaloisRing(p={self.base.p}, a={self.base.a}, m={self.degree})"


@lru_cache(maxsize=None)
def galois_ring(p: int, a: int, m: int) -> GaloisRing:
    return GaloisRing(PrimePower(p, a), canonical_irreducible(p, m))


def frobenius(ring, x):
    """The canonical Frobenius of a Galois ring or split Witt ring."""
    return ring.frobenius(x)


# ----------------------------------------------------------------------
# embeddings between Galois rings


def _roots_in_residue_field(R: GaloisRing, poly_fp: list[int]) -> list[tuple[int, ...]]:
    """All roots of a squarefree F_p-polynomial inside the residue field of R."""
    field = R.residue_ring()
    p = field.base.p
    if field.size <= 6561:
        roots = []
        for cand in field.algebra.elements():
            acc = field.zero()
            power = field.one()
            for c in poly_fp:
                if c:
                    acc = field.algebra.add(acc, field.algebra.scalar(c, power))
                power = field.algebra.mul(power, cand)
            if not any(acc):
                roots.append(cand)
        return sorted(roots)
    return sorted(_cz_roots(field, poly_fp))


def _cz_roots(field: GaloisRing, poly_fp: list[int]) -> list[tuple[int, ...]]:
    """Cantor-Zassenhaus root extraction over a large residue field."""
    A = field.algebra

    def c2e(c):
        return A.scalar(c, A.one)

    f = [c2e(c) for c in poly_fp]
    Q = field.size

    def deg(g):
        d = len(g) - 1
        while d >= 0 and not any(g[d]):
            d -= 1
        return d

    def norm(g):
        d = deg(g)
        if d < 0:
            return []
        inv = A.invert(g[d])
        return [A.mul(c, inv) for c in g[: d + 1]]

    def gmul(g, h):
        out = [A.zero()] * (len(g) + len(h) - 1)
        for i, x in enumerate(g):
            if any(x):
                for j, y in enumerate(h):
                    if any(y):
                        out[i + j] = A.add(out[i + j], A.mul(x, y))
        return out

    def gmod(g, h):
        g = list(g)
        dh = deg(h)
        inv = A.invert(h[dh])
        while deg(g) >= dh:
            dgg = deg(g)
            c = A.mul(g[dgg], inv)
            for i in range(dh + 1):
                g[dgg - dh + i] = A.sub(g[dgg - dh + i], A.mul(c, h[i]))
        return g[: max(deg(g) + 1, 0)]

    def ggcd(g, h):
        g, h = norm(g), norm(h)
        while h:
            g, h = h, norm(gmod(g, h))
        return g

    def gpow(g, e, mod):
        result = [A.one]
        base = norm(gmod(g, mod)) or [A.zero()]
        while e:
            if e & 1:
                result = gmod(gmul(result, base), mod)
            base = gmod(gmul(base, base), mod)
            e >>= 1
        return result

    rng = random.Random(0x51EC7 ^ field.degree)
    stack = [norm(f)]
    roots = []
    while stack:
        g = stack.pop()
        d = deg(g)
        if d <= 0:
            continue
        if d == 1:
            roots.append(A.neg(g[0]))
            continue
        while True:
            u = [
                tuple(rng.randrange(field.base.p) for _ in range(field.degree))
                for _ in range(d)
            ]
            w = gpow(u, (Q - 1) // 2, g)
            w = list(w) + [A.zero()]
            w[0] = A.sub(w[0], A.one)
            h = ggcd(g, w)
            if 0 < deg(h) < d:
                stack.append(h)
                quot = _gdiv(g, h, A, deg)
                stack.append(quot)
                break
    return roots


def _gdiv(g, h, A, deg):
    g = list(g)
    dh = deg(h)
    inv = A.invert(h[dh])
    quot = [A.zero()] * (deg(g) - dh + 1)
    while deg(g) >= dh:
        dgg = deg(g)
        c = A.mul(g[dgg], inv)
        quot[dgg - dh] = c
        for i in range(dh + 1):
            g[dgg - dh + i] = A.sub(g[dgg - dh + i], A.mul(c, h[i]))
    return quot


@lru_cache(maxsize=None)
def embed_galois(src: GaloisRing, dst: GaloisRing) -> RingMap:
    """Canonical embedding GR(p^a, m) -> GR(p^a, M) for m dividing M.

    The generator goes to the lexicographically least root of the source
    modulus, Hensel-lifted to full precision.
    """
    if src.base != dst.base:
        raise NoEmbedding("different scalar rings")
    if dst.degree % src.degree:
        raise NoEmbedding(
            f"degree {src.degree} does not divide {dst.degree}"
        )
    if src.degree == 1:
        return RingMap(src.algebra, dst.algebra, (dst.algebra.one,))
    poly = [c % src.base.p for c in src.modulus] + [1]
    roots = _roots_in_residue_field(dst, poly)
    if not roots:
        raise NoEmbedding("modulus has no root in the target residue field")
    root = _hensel_root(dst, src.modulus, roots[0])
    A = dst.algebra
    images = []
    power = A.one
    for _ in range(src.degree):
        images.append(power)
        power = A.mul(power, root)
    return RingMap(src.algebra, dst.algebra, tuple(images))


def _hensel_root(R: GaloisRing, modulus: tuple[int, ...], root_bar):
    A = R.algebra
    r = tuple(root_bar)
    m = len(modulus)
    for _ in range(8 * R.base.a + 8):
        val = A.power(r, m)
        deriv = A.scalar(m, A.power(r, m - 1))
        for i, c in enumerate(modulus):
            if c:
                val = A.add(val, A.scalar(c, A.power(r, i)))
                if i >= 1:
                    deriv = A.add(deriv, A.scalar(i * c, A.power(r, i - 1)))
        if not any(val):
            return r
        r = A.sub(r, A.mul(val, A.invert(deriv)))
    raise MathError("root lift did not converge")


# ----------------------------------------------------------------------
# the split Witt model A^f with cyclic-shift Frobenius


@dataclass(frozen=True)
class SplitWittRing:
    """The product ring A^f with Frobenius acting as the cyclic left shift.

    This is the canonical model of W(k) tensor A for k of degree f; when A
    carries a designated Galois-ring structure, ``split_witt_tensor``
    identifies it with the power-basis tensor form.
    """

    algebra: CoeffAlgebra
    length: int

    def one(self):
        return tuple(self.algebra.one for _ in range(self.length))

    def mul(self, x, y):
        return tuple(self.algebra.mul(u, v) for u, v in zip(x, y))

    def frobenius(self, x):
        return tuple(x[(i + 1) % self.length] for i in range(self.length))

    def is_unit(self, x) -> bool:
        return all(self.algebra.is_unit(c) for c in x)

    def invert(self, x):
        return tuple(self.algebra.invert(c) for c in x)

    def elements(self):
        return itertools.product(self.algebra.elements(), repeat=self.length)

    def units(self):
        return itertools.product(self.algebra.units(), repeat=self.length)

    def norm(self, x) -> tuple[int, ...]:
        if not self.is_unit(x):
            raise NotAUnit("norm is only evaluated on units")
        acc = self.algebra.one
        for c in x:
            acc = self.algebra.mul(acc, c)
        return acc


def norm_map(ring, x):
    """N(x) = x phi(x) ... phi^(f-1)(x), landing in the fixed subring."""
    if isinstance(ring, SplitWittRing):
        return ring.norm(x)
    if isinstance(ring, WittTensorRing):
        return ring.norm(x)
    if isinstance(ring, GaloisRing):
        acc = ring.one()
        y = x
        for _ in range(ring.degree):
            acc = ring.algebra.mul(acc, y)
            y = ring.frobenius(y)
        return acc
    raise TypeError(f"no norm on {type(ring).__name__}")


def solve_norm(ring: SplitWittRing, a):
    """Canonical norm preimage (a, 1, ..., 1) in split coordinates."""
    if not ring.algebra.is_unit(a):
        raise NotAUnit("norm preimages exist only for units")
    return (tuple(a),) + tuple(ring.algebra.one for _ in range(ring.length - 1))


def solve_norm_kernel(ring: SplitWittRing, u):
    """Solve u = phi(y)/y by telescoping cumulative products.

    Requires N(u) = 1; the y returned has y_0 = 1 and
    y_{i+1} = y_i * u_i, which makes phi(y)/y = u by the wraparound.
    """
    if not ring.is_unit(u):
        raise NotAUnit("kernel elements are units")
    if ring.norm(u) != ring.algebra.one:
        raise KernelConditionFailed("input does not have norm 1")
    ys = [ring.algebra.one]
    for i in range(ring.length - 1):
        ys.append(ring.algebra.mul(ys[-1], u[i]))
    return tuple(ys)


class WittTensorRing:
    """GR(p^a, f) tensor A on the power basis, Frobenius acting on the left.

    Elements are tuples of f coordinate vectors of A; multiplication uses
    the Galois-ring structure constants with A-valued coordinates.
    """

    __slots__ = ("gr", "algebra")

    def __init__(self, gr: GaloisRing, algebra: CoeffAlgebra):
        if gr.base.p != algebra.base.p or gr.base.a != algebra.base.a:
            raise RingMismatchError()
        self.gr = gr
        self.algebra = algebra

    @property
    def length(self) -> int:
        return self.gr.degree

    def zero(self):
        return tuple(self.algebra.zero() for _ in range(self.length))

    def one(self):
        one = [self.algebra.zero() for _ in range(self.length)]
        one[0] = self.algebra.one
        return tuple(one)

    def from_scalar_side(self, x):
        """x tensor 1 for x in the Galois ring."""
        return tuple(self.algebra.scalar(c, self.algebra.one) for c in x)

    def from_algebra_side(self, a):
        out = [self.algebra.zero() for _ in range(self.length)]
        out[0] = tuple(a)
        return tuple(out)

    def add(self, x, y):
        return tuple(self.algebra.add(u, v) for u, v in zip(x, y))

    def mul(self, x, y):
        A = self.algebra
        table = self.gr.algebra.table
        out = [A.zero() for _ in range(self.length)]
        for i, xi in enumerate(x):
            if A.is_zero(xi):
                continue
            for j, yj in enumerate(y):
                if A.is_zero(yj):
                    continue
                prod = A.mul(xi, yj)
                for k, c in enumerate(table[i][j]):
                    if c:
                        out[k] = A.add(out[k], A.scalar(c, prod))
        return tuple(out)

    def frobenius(self, x):
        A = self.algebra
        F = self.gr.frob_matrix
        out = [A.zero() for _ in range(self.length)]
        for j, xj in enumerate(x):
            if A.is_zero(xj):
                continue
            for i in range(self.length):
                if F[i][j]:
                    out[i] = A.add(out[i], A.scalar(F[i][j], xj))
        return tuple(out)

    def is_unit(self, x) -> bool:
        # multiplication matrix over A flattened to Z/p^a coordinates
        n = self.length * self.algebra.rank
        cols = []
        for j in range(self.length):
            for t in range(self.algebra.rank):
                basis = [self.algebra.zero() for _ in range(self.length)]
                basis[j] = self.algebra.basis_vector(t)
                img = self.mul(x, tuple(basis))
                cols.append([c for comp in img for c in comp])
        M = np.array(cols, dtype=np.int64).T % self.algebra.base.p
        return _rank_mod_p(M, self.algebra.base.p) == n

    def norm(self, x) -> tuple[int, ...]:
        acc = self.one()
        y = x
        for _ in range(self.length):
            acc = self.mul(acc, y)
            y = self.frobenius(y)
        if any(any(c) for c in acc[1:]):
            raise MathError("norm did not land in the coefficient ring")
        if not self.algebra.is_unit(acc[0]):
            raise NotAUnit("norm of a non-unit")
        return acc[0]

    def elements(self):
        return itertools.product(self.algebra.elements(), repeat=self.length)


@dataclass(frozen=True)
class SplitWittIso:
    """The A-algebra isomorphism GR(p^a, f) tensor A = A^f.

    ``split`` sends x tensor 1 to (i(x), i(phi x), ..., i(phi^{f-1} x)) for
    the designated embedding i, and transports Frobenius to the cyclic
    shift; ``unsplit`` is the exact inverse.
    """

    tensor: WittTensorRing
    model: SplitWittRing
    matrix: tuple[tuple[tuple[int, ...], ...], ...]
    inverse: tuple[tuple[tuple[int, ...], ...], ...]

    def split(self, x):
        A = self.model.algebra
        out = []
        for j in range(self.model.length):
            acc = A.zero()
            for i, xi in enumerate(x):
                if not A.is_zero(xi):
                    acc = A.add(acc, A.mul(self.matrix[j][i], xi))
            out.append(acc)
        return tuple(out)

    def unsplit(self, v):
        A = self.model.algebra
        out = []
        for i in range(self.model.length):
            acc = A.zero()
            for j, vj in enumerate(v):
                if not A.is_zero(vj):
                    acc = A.add(acc, A.mul(self.inverse[i][j], vj))
            out.append(acc)
        return tuple(out)


def split_witt_tensor(f, algebra: CoeffAlgebra, embedding=None) -> SplitWittIso:
    """Build the splitting isomorphism for a designated GR(p^a, f)-structure.

    ``f`` is either the residue degree (using the canonical Galois ring) or
    an explicit :class:`GaloisRing`.  ``embedding`` may give the image of
    the Galois-ring generator in A; when omitted it is searched for
    (lexicographically least root of the modulus).  Raises NoEmbedding when
    A has no such structure, e.g. when its residue fields are too small.
    """
    base = algebra.base
    if isinstance(f, GaloisRing):
        gr = f
        f = gr.degree
        if gr.base != base:
            raise RingMismatch("Galois ring and algebra have different scalars")
    else:
        gr = galois_ring(base.p, base.a, f)
    tensor = WittTensorRing(gr, algebra)
    model = SplitWittRing(algebra, f)
    if f == 1:
        ident = ((algebra.one,),)
        return SplitWittIso(tensor, model, ident, ident)
    if embedding is None:
        embedding = _find_embedding(gr, algebra)
    elif not _is_embedding_root(gr, algebra, embedding):
        raise NoEmbedding("designated element is not a root of the modulus")
    # conjugate generator images i(phi^j x), i evaluating power-basis
    # coordinates at the embedded generator
    conj = [tuple(embedding)]
    for j in range(1, f):
        img = algebra.zero()
        power = algebra.one
        cur = gr.frobenius_iter(gr.gen(), j)
        for c in cur:
            if c:
                img = algebra.add(img, algebra.scalar(c, power))
            power = algebra.mul(power, tuple(embedding))
        conj.append(img)
    matrix = []
    for j in range(f):
        row = []
        power = algebra.one
        for _ in range(f):
            row.append(power)
            power = algebra.mul(power, conj[j])
        matrix.append(tuple(row))
    inverse = _invert_matrix_over(algebra, matrix)
    iso = SplitWittIso(tensor, model, tuple(matrix), inverse)
    _check_split_iso(iso)
    return iso


def _is_embedding_root(gr: GaloisRing, algebra: CoeffAlgebra, cand) -> bool:
    acc = algebra.power(tuple(cand), gr.degree)
    power = algebra.one
    for c in gr.modulus:
        if c:
            acc = algebra.add(acc, algebra.scalar(c, power))
        power = algebra.mul(power, tuple(cand))
    return not any(acc)


def _find_embedding(gr: GaloisRing, algebra: CoeffAlgebra):
    if algebra.size > 100_000:
        raise NoEmbedding("embedding search budget exceeded")
    for cand in algebra.elements():
        if _is_embedding_root(gr, algebra, cand):
            return cand
    raise NoEmbedding(
        f"no GR({gr.base.q}, {gr.degree}) structure on this algebra "
        "(residue fields too small)"
    )


def _invert_matrix_over(algebra: CoeffAlgebra, matrix):
    n = len(matrix)
    det = algebra.zero()
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        prod = algebra.one
        for i in range(n):
            prod = algebra.mul(prod, matrix[i][perm[i]])
        det = algebra.add(det, algebra.scalar(sign, prod))
    det_inv = algebra.invert(det)
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [matrix[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            md = algebra.zero()
            for perm in itertools.permutations(range(n - 1)):
                sign = _perm_sign(perm)
                prod = algebra.one
                for r in range(n - 1):
                    prod = algebra.mul(prod, minor[r][perm[r]])
                md = algebra.add(md, algebra.scalar(sign, prod))
            sign = 1 if (i + j) % 2 == 0 else -1
            row.append(algebra.scalar(sign, algebra.mul(md, det_inv)))
        adj.append(tuple(row))
    return tuple(adj)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _check_split_iso(iso: SplitWittIso):
    # round trip, Frobenius naturality, and multiplicativity on generators
    tensor, model = iso.tensor, iso.model
    gens = []
    for i in range(tensor.length):
        basis = [tensor.algebra.zero() for _ in range(tensor.length)]
        basis[i] = tensor.algebra.one
        gens.append(tuple(basis))
    for x in gens:
        if iso.unsplit(iso.split(x)) != x:
            raise MathError("splitting round trip failed")
        if iso.split(tensor.frobenius(x)) != model.frobenius(iso.split(x)):
            raise MathError("splitting does not transport Frobenius to the shift")
        for y in gens:
            if iso.split(tensor.mul(x, y)) != model.mul(iso.split(x), iso.split(y)):
                raise MathError("splitting is not multiplicative")


# ----------------------------------------------------------------------
# Frobenius-equation solvers


@dataclass(frozen=True)
class SolverResult:
    """Solution of a Frobenius equation, possibly in an extension ring."""

    value: tuple[int, ...]
    ring: GaloisRing
    extension_degree: int


def _as_mod_p_solve(R: GaloisRing, cbar):
    """Solve phi(x) - x = cbar in the residue field, or return None."""
    p = R.base.p
    m = R.degree
    res = R.residue_ring()
    F = np.array(
        [res.frobenius(res.algebra.basis_vector(i)) for i in range(m)],
        dtype=np.int64,
    ).T
    M = (F - np.eye(m, dtype=np.int64)) % p
    sol = solve_linear_chain(M, list(cbar), p, 1)
    if sol.particular is None:
        return None
    # canonical representative: lexicographically least over the F_p kernel
    best = tuple(sol.particular)
    candidates = [best]
    for t in range(1, p):
        shifted = tuple(
            (c + t * o) % p for c, o in zip(sol.particular, res.algebra.one)
        )
        candidates.append(shifted)
    return min(candidates)


def solve_artin_schreier(R: GaloisRing, c) -> SolverResult:
    """Solve phi(x) - x = c, extending the Galois ring as needed.

    Works level by level in the p-adic filtration: each layer is a fresh
    residue-field equation, solvable there exactly when the absolute trace
    vanishes, and in a degree-p extension otherwise.  The total extension
    degree is reported so callers can embed results compatibly.
    """
    p, a = R.base.p, R.base.a
    S = R
    target = tuple(c)
    x = S.zero()
    for layer in range(a):
        A = S.algebra
        resid = A.sub(target, A.sub(S.frobenius(x), x))
        if all(v % p ** (layer + 1) == 0 for v in resid):
            continue
        if any(v % p**layer for v in resid):
            raise MathError("layer residual lost divisibility")
        cbar = tuple((v // p**layer) % p for v in resid)
        sol = _as_mod_p_solve(S, cbar)
        if sol is None:
            S2 = galois_ring(p, a, S.degree * p)
            emb = embed_galois(S, S2)
            x = emb.apply(x)
            target = emb.apply(target)
            S = S2
            cbar2 = tuple(
                (v // p**layer) % p
                for v in S.algebra.sub(
                    target, S.algebra.sub(S.frobenius(x), x)
                )
            )
            sol = _as_mod_p_solve(S, cbar2)
            if sol is None:
                raise MathError("Artin-Schreier equation unsolvable after extension")
        lift = tuple((p**layer) * v for v in sol)
        x = S.algebra.add(x, lift)
    final = S.algebra.sub(S.frobenius(x), x)
    if final != tuple(v % S.base.q for v in target):
        raise MathError("Artin-Schreier verification failed")
    return SolverResult(x, S, S.degree // R.degree)


def solve_artin_schreier_tensor(R: GaloisRing, algebra: CoeffAlgebra, c):
    """Coordinate-wise Artin-Schreier solve over GR(p^a, m) tensor A.

    The equation is A-linear, so it decomposes along the module basis of A;
    every slot is solved separately and re-embedded into a common ring.
    """
    slots = []
    for t in range(algebra.rank):
        ct = tuple(comp[t] for comp in c)
        slots.append(solve_artin_schreier(R, ct))
    big = max((s.ring for s in slots), key=lambda r: r.degree)
    values = []
    for s in slots:
        if s.ring == big:
            values.append(s.value)
        else:
            values.append(embed_galois(s.ring, big).apply(s.value))
    tensor_value = tuple(
        tuple(values[t][i] for t in range(algebra.rank))
        for i in range(big.degree)
    )
    return tensor_value, big, big.degree // R.degree


@lru_cache(maxsize=None)
def _multiplicative_generator(field: GaloisRing) -> tuple[int, ...]:
    """Lexicographically least generator of the residue field units."""
    Q = field.size
    if Q > 10_000:
        raise MathError("generator search budget exceeded")
    order = Q - 1
    primes = _prime_divisors(order)
    for cand in field.algebra.elements():
        if not any(cand):
            continue
        if not field.algebra.is_unit(cand):
            continue
        if all(
            field.algebra.power(cand, order // r) != field.algebra.one
            for r in primes
        ):
            return cand
    raise MathError("no multiplicative generator found")


def solve_lang(R: GaloisRing, c) -> SolverResult:
    """Solve the multiplicative twist phi(h) = c h for a unit c.

    Mod p this is the (p-1)-th root equation h^(p-1) = c, solved by
    discrete logarithm in the smallest residue extension that contains the
    root; each further p-adic layer reduces to one additive
    Artin-Schreier equation on the square-zero correction.
    """
    p, a = R.base.p, R.base.a
    if not R.algebra.is_unit(c):
        raise NotAUnit("the Lang equation needs a unit right-hand side")
    # minimal residue extension degree
    res = R.residue_ring()
    cbar = R.residue(c)
    q = res.size
    order = 1
    acc = cbar
    while acc != res.algebra.one:
        acc = res.algebra.mul(acc, cbar)
        order += 1
    d = 1
    while (q**d - 1) // (p - 1) % order != 0:
        d += 1
        if d > p - 1:
            raise MathError("no residue extension solves the Lang equation")
    S = R
    if d > 1:
        S = galois_ring(p, a, R.degree * d)
        c = embed_galois(R, S).apply(c)
    # discrete logarithm in the residue field of S
    fld = S.residue_ring()
    Q = fld.size
    g = _multiplicative_generator(fld)
    cbar = S.residue(c)
    k = 0
    acc = fld.algebra.one
    while acc != cbar:
        acc = fld.algebra.mul(acc, g)
        k += 1
        if k >= Q:
            raise MathError("discrete logarithm failed")
    if k % (p - 1):
        raise MathError("right-hand side is not a (p-1)-th power as expected")
    s = k // (p - 1)
    hbar = fld.algebra.power(g, s)
    mu = fld.algebra.power(g, (Q - 1) // (p - 1))
    best = hbar
    cur = hbar
    for _ in range(p - 2):
        cur = fld.algebra.mul(cur, mu)
        best = min(best, cur)
    h = tuple(best)
    # p-adic layers via Artin-Schreier corrections
    for layer in range(1, a):
        A = S.algebra
        lhs = S.frobenius(h)
        rhs = A.mul(c, h)
        ratio = A.mul(lhs, A.invert(rhs))
        diff = A.sub(ratio, A.one)
        if all(v % p ** (layer + 1) == 0 for v in diff):
            continue
        u = tuple((v // p**layer) % p for v in diff)
        asr = solve_artin_schreier(
            S.residue_ring(), tuple((-v) % p for v in u)
        )
        if asr.extension_degree > 1:
            S2 = galois_ring(p, a, S.degree * asr.extension_degree)
            emb = embed_galois(S, S2)
            h = emb.apply(h)
            c = emb.apply(c)
            S = S2
        t = asr.value
        correction = S.algebra.add(
            S.algebra.one, tuple((p**layer) * v for v in t)
        )
        h = S.algebra.mul(h, correction)
    if S.algebra.mul(c, h) != S.frobenius(h):
        raise MathError("Lang verification failed")
    if not S.algebra.is_unit(h):
        raise NotAUnit("Lang solution is not a unit")
    return SolverResult(h, S, S.degree // R.degree)
