"""Truncated Laurent series over a coefficient algebra.

Elements carry finitely many coefficients in degrees [v, prec) where
``prec`` is the per-element "exact below" bound: every operation computes
coefficients exactly in the degrees it reports and shrinks ``prec``
conservatively when unknown tails could contaminate lower degrees.  Since
p^a kills the coefficients, a finite negative tail always suffices, which
is the truncated shadow of the p-adic completion of the Laurent series
ring.

The semilinear operators live here too: ``phi_op`` substitutes
T -> (1+T)^p - 1 (optionally composing with a coefficient Frobenius for
split Witt coefficients) and ``gamma_op`` substitutes T -> (1+T)^c - 1
for a p-adic unit c, with binomial coefficients evaluated exactly at the
working modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import MathError, NotAUnit, PrecisionUnderflow, RingMismatch
from .rings import CoeffAlgebra, RingMap, local_decompose, nil_filtration

PLUS_INFINITY = math.inf


def _binomial_digits(p: int, a: int, n_max: int) -> int:
    """Digits of a p-adic exponent needed for exact binomials mod p^a.

    C(-, n) is a degree-n polynomial whose coefficients have valuation
    >= -v_p(n!), so a residue accurate mod p^(a + v_p(n!)) pins the
    binomial mod p^a.  One extra digit is carried as a safety margin.
    """
    v = 0
    k = p
    while k <= max(n_max, 1):
        v += max(n_max, 1) // k
        k *= p
    return a + v + 1


@dataclass(frozen=True)
class PadicScalar:
    """A p-adic integer known either exactly or to a stated digit count."""

    p: int
    residue: int
    digits: int
    exact: int | None = None

    @staticmethod
    def from_int(p: int, value: int, digits: int = 64) -> "PadicScalar":
        return PadicScalar(p, value % p**digits, digits, exact=value)

    @staticmethod
    def from_residue(p: int, residue: int, digits: int) -> "PadicScalar":
        return PadicScalar(p, residue % p**digits, digits)

    @property
    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def residue_mod(self, k: int) -> int:
        if self.exact is None and k > self.digits:
            raise MathError(
                f"scalar known to {self.digits} digits, {k} requested"
            )
        if self.exact is not None:
            return self.exact % self.p**k
        return self.residue % self.p**k

    def mul(self, other: "PadicScalar") -> "PadicScalar":
        if self.p != other.p:
            raise RingMismatch("scalars over different primes")
        if self.exact is not None and other.exact is not None:
            return PadicScalar.from_int(
                self.p, self.exact * other.exact, min(self.digits, other.digits)
            )
        d = min(self.digits, other.digits)
        return PadicScalar.from_residue(self.p, self.residue * other.residue, d)

    def inverse(self) -> "PadicScalar":
        if not self.is_unit:
            raise NotAUnit("cannot invert a non-unit p-adic scalar")
        if self.exact in (1, -1):
            return PadicScalar.from_int(self.p, self.exact, self.digits)
        mod = self.p**self.digits
        return PadicScalar.from_residue(
            self.p, pow(self.residue, -1, mod), self.digits
        )

    def binomial(self, n: int, modulus: int) -> int:
        """C(self, n) mod ``modulus`` (a power of p covered by the digits)."""
        if n == 0:
            return 1 % modulus
        if self.exact is not None:
            c = self.exact
            if c >= 0:
                return math.comb(c, n) % modulus
            return ((-1) ** n * math.comb(-c + n - 1, n)) % modulus
        return math.comb(self.residue, n) % modulus

    def key(self) -> tuple:
        return (self.p, self.exact, self.residue, self.digits)


def teichmuller_scalar(p: int, digits: int = 64) -> PadicScalar:
    """The Teichmueller lift of the least primitive root mod p.

    This is the canonical torsion generator of Z_p^x used as the exponent
    of the torsion substitution operator.
    """
    g = _least_primitive_root(p)
    mod = p**digits
    x = g % mod
    for _ in range(digits + 4):
        nxt = pow(x, p, mod)
        if nxt == x:
            break
        x = nxt
    return PadicScalar.from_residue(p, x, digits)


@lru_cache(maxsize=None)
def _least_primitive_root(p: int) -> int:
    order = p - 1
    primes = []
    n, d = order, 2
    while d * d <= n:
        if n % d == 0:
            primes.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        primes.append(n)
    for g in range(2, p):
        if all(pow(g, order // r, p) != 1 for r in primes):
            return g
    raise MathError(f"no primitive root mod {p}")


class SeriesRing:
    """Truncated Laurent series ring over a coefficient algebra.

    ``trunc`` is the exclusive default upper degree bound and ``floor`` the
    hard lower bound: computations that would need coefficients below it
    raise PrecisionUnderflow rather than silently truncate.  An optional
    ``coeff_frobenius`` ring automorphism is composed into ``phi_op`` for
    split Witt coefficients.
    """

    __slots__ = (
        "algebra",
        "trunc",
        "floor",
        "coeff_frobenius",
        "_subst_cache",
        "_gamma_series",
        "_factor_rings",
        "_zeta",
    )

    def __init__(
        self,
        algebra: CoeffAlgebra,
        trunc: int = 27,
        floor: int = -64,
        coeff_frobenius: RingMap | None = None,
    ):
        if trunc < 1:
            raise ValueError("truncation bound must be at least 1")
        if floor >= 0:
            raise ValueError("the support floor must be negative")
        self.algebra = algebra
        self.trunc = trunc
        self.floor = floor
        self.coeff_frobenius = coeff_frobenius
        self._subst_cache = {}
        self._gamma_series = {}
        self._factor_rings = None
        self._zeta = None

    # -- constructors ---------------------------------------------------

    def series(
        self, items, prec: int | None = None, exact: bool | None = None
    ) -> "LaurentSeries":
        prec = self.trunc if prec is None else min(prec, self.trunc)
        coeffs = {}
        clipped = False
        for deg, co in dict(items).items():
            co = tuple(int(c) % self.algebra.base.q for c in co)
            if any(co):
                if deg < self.floor:
                    raise PrecisionUnderflow(
                        f"coefficient at degree {deg} below floor {self.floor}"
                    )
                if deg < prec:
                    coeffs[int(deg)] = co
                else:
                    clipped = True
        if exact is None:
            exact = not clipped
        return LaurentSeries(self, coeffs, prec, exact and not clipped)

    def zero(self, prec: int | None = None) -> "LaurentSeries":
        return self.series({}, prec)

    def one(self) -> "LaurentSeries":
        return self.series({0: self.algebra.one})

    def constant(self, coords) -> "LaurentSeries":
        return self.series({0: tuple(coords)})

    def monomial(self, deg: int, coords=None) -> "LaurentSeries":
        return self.series({deg: self.algebra.one if coords is None else coords})

    def tvar(self) -> "LaurentSeries":
        return self.monomial(1)

    def zeta_scalar(self) -> PadicScalar:
        if self._zeta is None:
            digits = _binomial_digits(
                self.algebra.base.p, self.algebra.base.a, 4 * self.trunc
            )
            self._zeta = teichmuller_scalar(self.algebra.base.p, digits + 4)
        return self._zeta

    def one_unit_scalar(self) -> PadicScalar:
        return PadicScalar.from_int(self.algebra.base.p, 1 + self.algebra.base.p)

    # -- identity --------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SeriesRing)
            and self.algebra == other.algebra
            and self.trunc == other.trunc
            and self.floor == other.floor
            and self.coeff_frobenius is other.coeff_frobenius
        )

    def __hash__(self) -> int:
        return hash((self.algebra, self.trunc, self.floor))

    def __repr__(self) -> str:
        return (
            f"SeriesRing({self.algebra!r}, trunc={self.trunc}, floor={self.floor})"
        )


class LaurentSeries:
    """A truncated Laurent series: exact coefficients below ``prec``.

    Stored coefficients are nonzero coordinate tuples; degrees at or above
    ``prec`` are unknown rather than zero, except when ``exact`` is set, in
    which case the series is literally the stored Laurent polynomial and
    behaves as if its precision were infinite.
    """

    __slots__ = ("ring", "coeffs", "prec", "exact")

    def __init__(self, ring: SeriesRing, coeffs: dict, prec: int, exact: bool = False):
        self.ring = ring
        self.coeffs = coeffs
        self.prec = prec
        self.exact = exact

    def eff_prec(self) -> float:
        return PLUS_INFINITY if self.exact else self.prec

    # -- inspection -------------------------------------------------------

    def min_deg(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def coefficient(self, deg: int) -> tuple[int, ...]:
        return self.coeffs.get(deg, self.ring.algebra.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    def __repr__(self) -> str:
        terms = ", ".join(f"{d}:{c}" for d, c in self.items())
        tag = " exact" if self.exact else ""
        return f"<series {{{terms}}} prec={self.prec}{tag}>"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentSeries)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
            and self.prec == other.prec
            and self.exact == other.exact
        )

    def __hash__(self):
        return hash((tuple(self.items()), self.prec, self.exact))

    # -- ring operations ---------------------------------------------------

    def _check_ring(self, other: "LaurentSeries"):
        if self.ring != other.ring:
            raise RingMismatch("series from different rings")

    def add(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_ring(other)
        A = self.ring.algebra
        exact = self.exact and other.exact
        prec = self.ring.trunc if exact else int(min(self.eff_prec(), other.eff_prec()))
        out = {}
        for d in set(self.coeffs) | set(other.coeffs):
            if d >= prec:
                continue
            c = A.add(self.coefficient(d), other.coefficient(d))
            if any(c):
                out[d] = c
        return LaurentSeries(self.ring, out, prec, exact)

    def neg(self) -> "LaurentSeries":
        A = self.ring.algebra
        return LaurentSeries(
            self.ring,
            {d: A.neg(c) for d, c in self.coeffs.items()},
            self.prec,
            self.exact,
        )

    def sub(self, other: "LaurentSeries") -> "LaurentSeries":
        return self.add(other.neg())

    def scale(self, coords) -> "LaurentSeries":
        """Multiply by a constant from the coefficient algebra."""
        A = self.ring.algebra
        out = {}
        for d, c in self.coeffs.items():
            v = A.mul(c, tuple(coords))
            if any(v):
                out[d] = v
        return LaurentSeries(self.ring, out, self.prec, self.exact)

    def scalar(self, n: int) -> "LaurentSeries":
        A = self.ring.algebra
        out = {}
        for d, c in self.coeffs.items():
            v = A.scalar(n, c)
            if any(v):
                out[d] = v
        return LaurentSeries(self.ring, out, self.prec, self.exact)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by T^k."""
        if not self.coeffs:
            prec = self.ring.trunc if self.exact else min(self.prec + k, self.ring.trunc)
            return LaurentSeries(self.ring, {}, prec, self.exact)
        if min(self.coeffs) + k < self.ring.floor:
            raise PrecisionUnderflow("shift crosses the support floor")
        if self.exact and max(self.coeffs) + k < self.ring.trunc:
            return LaurentSeries(
                self.ring,
                {d + k: c for d, c in self.coeffs.items()},
                self.ring.trunc,
                True,
            )
        prec = min(int(min(self.eff_prec() + k, self.ring.trunc)), self.ring.trunc)
        return LaurentSeries(
            self.ring,
            {d + k: c for d, c in self.coeffs.items() if d + k < prec},
            prec,
        )

    def mul(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_ring(other)
        A = self.ring.algebra
        vx = self.min_deg()
        vy = other.min_deg()
        if vx is None or vy is None:
            if self.exact and other.exact:
                return LaurentSeries(self.ring, {}, self.ring.trunc, True)
            prec = min(
                self.eff_prec() + (vy if vy is not None else 0),
                other.eff_prec() + (vx if vx is not None else 0),
                self.ring.trunc,
            )
            return LaurentSeries(
                self.ring, {}, int(max(prec, self.ring.floor + 1))
            )
        exact = (
            self.exact
            and other.exact
            and max(self.coeffs) + max(other.coeffs) < self.ring.trunc
        )
        prec = int(
            min(self.eff_prec() + vy, other.eff_prec() + vx, self.ring.trunc)
        )
        if vx + vy < self.ring.floor:
            raise PrecisionUnderflow("product support crosses the floor")
        out = {}
        rank1 = A.rank == 1
        q = A.base.q
        for dx, cx in self.coeffs.items():
            for dy, cy in other.coeffs.items():
                d = dx + dy
                if d >= prec:
                    continue
                if rank1:
                    v = (cx[0] * cy[0]) % q
                    if d in out:
                        out[d] = ((out[d][0] + v) % q,)
                    else:
                        out[d] = (v,)
                else:
                    v = A.mul(cx, cy)
                    if d in out:
                        out[d] = A.add(out[d], v)
                    else:
                        out[d] = v
        return LaurentSeries(
            self.ring, {d: c for d, c in out.items() if any(c)}, prec, exact
        )

    def power(self, n: int) -> "LaurentSeries":
        if n < 0:
            return invert_series(self).power(-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return result

    def truncate(self, new_prec: int) -> "LaurentSeries":
        prec = int(min(self.eff_prec(), new_prec))
        kept = {d: c for d, c in self.coeffs.items() if d < prec}
        exact = self.exact and len(kept) == len(self.coeffs)
        return LaurentSeries(self.ring, kept, prec, exact)

    def map_coefficients(self, rmap: RingMap, target: SeriesRing) -> "LaurentSeries":
        out = {}
        clipped = False
        for d, c in self.coeffs.items():
            v = rmap.apply(c)
            if any(v):
                if d < target.trunc:
                    out[d] = v
                else:
                    clipped = True
        if self.exact and not clipped:
            return LaurentSeries(target, out, target.trunc, True)
        prec = int(min(self.eff_prec(), target.trunc))
        return LaurentSeries(target, {d: c for d, c in out.items() if d < prec}, prec)


# ----------------------------------------------------------------------
# free functions named in the API


def mul(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    return x.mul(y)


def t_valuation(x: LaurentSeries):
    """Least degree with a nonzero coefficient; PLUS_INFINITY for zero."""
    v = x.min_deg()
    return PLUS_INFINITY if v is None else v


def residue_t_valuation(x: LaurentSeries, factor: int = 0):
    """Valuation of the reduction in the residue field of a local factor."""
    factors = local_decompose(x.ring.algebra)
    loc = factors[factor]
    filt = nil_filtration(loc.algebra)
    degs = [
        d
        for d, c in x.coeffs.items()
        if not filt.membership(1, loc.projection.apply(c))
    ]
    return min(degs) if degs else PLUS_INFINITY


def invert_series(x: LaurentSeries) -> LaurentSeries:
    """Inverse of a unit, exact below a conservatively shrunk precision.

    A unit reduces to c T^n (1 + higher) in every residue field; the
    inverse is assembled per local factor by peeling that leading monomial
    and summing the finite geometric series of the remaining correction,
    which terminates by nilpotence and positivity.
    """
    ring = x.ring
    A = ring.algebra
    factors = local_decompose(A)
    bounds = []
    if len(factors) == 1 and factors[0].algebra == A:
        y, n = _invert_local(x, None)
        bounds.append((y.min_deg() if y.coeffs else 0, n))
    else:
        parts = []
        for idx, fac in enumerate(factors):
            sub = _factor_ring(ring, idx)
            xi = x.map_coefficients(fac.projection, sub)
            yi, n = _invert_local(xi, idx)
            bounds.append((yi.min_deg() if yi.coeffs else 0, n))
            back = {}
            for d, c in yi.coeffs.items():
                v = fac.embed(c)
                if any(v):
                    back[d] = v
            parts.append(LaurentSeries(ring, back, yi.prec, yi.exact))
        y = parts[0]
        for part in parts[1:]:
            y = y.add(part)
    if x.exact:
        eps = _exact_product_minus_one(x, y)
        if not eps:
            return LaurentSeries(ring, dict(y.coeffs), ring.trunc, True)
        # the true inverse differs from y by -x^{-1} eps, so y is exact
        # strictly below v(y) + v(eps)
        vy = y.min_deg() or 0
        prec = int(min(min(eps) + vy, ring.trunc))
        return y.truncate(prec)
    # perturbing the unknown tail of x changes y by -y dx y; one of the
    # two y-factors contributes its unit-part valuation -n, the other at
    # worst its full (nilpotent) depth, and two nilpotent tails annihilate
    prec = x.eff_prec()
    for vy, n in bounds:
        prec = min(prec, x.eff_prec() + min(0, vy) + min(0, -n))
    return y.truncate(int(min(prec, ring.trunc)))


def _exact_product_minus_one(x: LaurentSeries, y: LaurentSeries) -> dict:
    """Nonzero coefficients of the untruncated polynomial x*y - 1."""
    A = x.ring.algebra
    out: dict = {}
    for dx, cx in x.coeffs.items():
        for dy, cy in y.coeffs.items():
            d = dx + dy
            v = A.mul(cx, cy)
            if d in out:
                out[d] = A.add(out[d], v)
            else:
                out[d] = v
    out[0] = A.sub(out.get(0, A.zero()), A.one)
    return {d: c for d, c in out.items() if any(c)}


def _factor_ring(ring: SeriesRing, idx: int) -> SeriesRing:
    if ring._factor_rings is None:
        ring._factor_rings = {}
    if idx not in ring._factor_rings:
        fac = local_decompose(ring.algebra)[idx]
        ring._factor_rings[idx] = SeriesRing(
            fac.algebra, ring.trunc, ring.floor
        )
    return ring._factor_rings[idx]


def _invert_local(x: LaurentSeries, witness) -> LaurentSeries:
    ring = x.ring
    A = ring.algebra
    filt = nil_filtration(A)
    lead = [d for d, c in x.coeffs.items() if not filt.membership(1, c)]
    if not lead:
        raise NotAUnit(
            "series is not a unit"
            + ("" if witness is None else f" (vanishes in residue factor {witness})")
        )
    n = min(lead)
    c = x.coeffs[n]
    z = x.shift(-n).scale(A.invert(c))
    w = z.sub(ring.one().truncate(z.prec))
    # geometric series sum_k (-w)^k; nilpotent coefficients kill deep
    # negative contributions, positive valuation kills high ones
    e = filt.nilpotency_index
    vw = w.min_deg()
    neg = -min(0, vw if vw is not None else 0)
    bound = max(ring.trunc + (max(e, 1) - 1) * (1 + neg), 1)
    # raw polynomial Horner for the fixed point acc = 1 - w acc; the
    # caller judges the exactness of the result globally, since per-step
    # precision tracking would wrongly compound the single unknown tail
    acc = {0: A.one}
    wc = w.coeffs
    for _ in range(bound):
        if not wc:
            break
        prod: dict = {}
        for dw, cw in wc.items():
            for da, ca in acc.items():
                d = dw + da
                if d >= ring.trunc:
                    continue
                v = A.mul(cw, ca)
                if d in prod:
                    prod[d] = A.add(prod[d], v)
                else:
                    prod[d] = v
        nxt = {d: A.neg(cv) for d, cv in prod.items() if any(cv)}
        nxt[0] = A.add(nxt.get(0, A.zero()), A.one)
        nxt = {d: cv for d, cv in nxt.items() if any(cv)}
        if nxt == acc:
            break
        acc = nxt
    series_acc = LaurentSeries(ring, acc, ring.trunc, False)
    inv = series_acc.shift(-n).scale(A.invert(c))
    return inv, n


def substitute(x: LaurentSeries, s: LaurentSeries) -> LaurentSeries:
    """Evaluate x at s for s = T * unit with positive T-adic valuation."""
    if x.ring.algebra != s.ring.algebra:
        raise RingMismatch("substitution target over a different algebra")
    vs = s.min_deg()
    if vs is None or vs < 1:
        raise MathError("substitution series must have valuation at least 1")
    ring = x.ring
    vx = x.min_deg()
    if vx is None:
        return LaurentSeries(ring, {}, x.prec, x.exact)
    out = LaurentSeries(ring, {}, ring.trunc, True)
    s_pows = _power_table(ring, s)
    for d, c in x.items():
        term = s_pows(d).scale(c)
        out = out.add(term)
    # the unknown tail of x enters at valuation >= prec(x) since v(s) >= 1
    cap = int(min(x.eff_prec(), ring.trunc))
    if out.exact and x.exact and cap >= ring.trunc:
        return out
    return out.truncate(min(int(min(out.eff_prec(), cap)), ring.trunc))


def _power_table(ring: SeriesRing, s: LaurentSeries):
    key = (tuple(s.items()), s.prec)
    cache = ring._subst_cache.setdefault(key, {})

    def power(d: int) -> LaurentSeries:
        if d in cache:
            return cache[d]
        if d == 0:
            val = ring.one()
        elif d > 0:
            val = power(d - 1).mul(s)
        else:
            if -1 not in cache:
                cache[-1] = invert_series(s)
            val = power(d + 1).mul(cache[-1]) if d < -1 else cache[-1]
        cache[d] = val
        return val

    return power


def phi_series(ring: SeriesRing) -> LaurentSeries:
    """(1+T)^p - 1 at the ring truncation."""
    p = ring.algebra.base.p
    coeffs = {}
    for k in range(1, p + 1):
        coeffs[k] = ring.algebra.scalar(math.comb(p, k), ring.algebra.one)
    return ring.series(coeffs)


def phi_op(x: LaurentSeries) -> LaurentSeries:
    """The Frobenius substitution T -> (1+T)^p - 1.

    Trivial on plain coefficient algebras; composes with the designated
    coefficient Frobenius when the ring carries split Witt coefficients.
    """
    ring = x.ring
    if ring.coeff_frobenius is not None:
        x = x.map_coefficients(ring.coeff_frobenius, ring)
    return substitute(x, phi_series(ring))


def gamma_series(ring: SeriesRing, c: PadicScalar) -> LaurentSeries:
    key = c.key()
    if key not in ring._gamma_series:
        p, a = ring.algebra.base.p, ring.algebra.base.a
        q = ring.algebra.base.q
        need = _binomial_digits(p, a, ring.trunc - 1)
        if c.exact is None and c.digits < need:
            raise MathError(
                f"gamma exponent needs {need} digits, has {c.digits}"
            )
        coeffs = {}
        for n in range(1, ring.trunc):
            b = c.binomial(n, q)
            if b:
                coeffs[n] = ring.algebra.scalar(b, ring.algebra.one)
        ring._gamma_series[key] = ring.series(coeffs, exact=False)
    return ring._gamma_series[key]


def gamma_op(x: LaurentSeries, c: PadicScalar) -> LaurentSeries:
    """The substitution T -> (1+T)^c - 1 for a p-adic integer exponent c.

    A ring automorphism when c is a unit; gamma_op(-, 1) is the identity
    and exponents compose multiplicatively at matched truncation.
    """
    ring = x.ring
    if c.p != ring.algebra.base.p:
        raise RingMismatch("exponent lives over a different prime")
    if c.exact == 1:
        return x
    return substitute(x, gamma_series(ring, c))


def as_exact_polynomial(x: LaurentSeries) -> LaurentSeries:
    """Reinterpret the stored coefficients as an exact Laurent polynomial.

    Legitimate whenever the caller is free to choose any representative in
    a congruence class: the returned object is a definite polynomial, and
    downstream checks judge whatever it produces.
    """
    return LaurentSeries(x.ring, dict(x.coeffs), x.ring.trunc, True)


def series_equal(x: LaurentSeries, y: LaurentSeries) -> bool:
    """Agreement of all coefficients below the joint precision."""
    prec = min(x.prec, y.prec)
    return x.truncate(prec).sub(y.truncate(prec)).is_zero()


def first_discrepancy(x: LaurentSeries, y: LaurentSeries):
    diff = x.truncate(min(x.prec, y.prec)).sub(y.truncate(min(x.prec, y.prec)))
    if diff.is_zero():
        return None
    d = diff.min_deg()
    return d, diff.coefficient(d)
