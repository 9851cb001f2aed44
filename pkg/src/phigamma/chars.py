"""Characters of Q_p^x with values in the units of a finite coefficient ring.

Local class field theory identifies Q_p^x with the abelianized Weil group,
so a continuous character into A^x is pinned down by its values on the
uniformizer p, on the Teichmueller generator of the (p-1)-torsion, and on
the pro-p generator 1+p.  For a finite discrete A, continuity on the pro-p
part means exactly that the value at 1+p has p-power order; the torsion
constraint at the Teichmueller generator is exact.

The normalization sends the uniformizer to a geometric Frobenius, so the
unramified character ur_a takes the value a at p.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MathError, NotAUnit, NotProP, RingMismatch, TorsionViolation
from .rings import CoeffAlgebra, RingMap, nil_filtration
from .series import PadicScalar


@dataclass(frozen=True)
class Character:
    """A character stored by its values on the three generators."""

    algebra: CoeffAlgebra
    value_p: tuple[int, ...]
    value_teich: tuple[int, ...]
    value_oneunit: tuple[int, ...]

    def key(self) -> tuple:
        return (self.value_p, self.value_teich, self.value_oneunit)

    def __repr__(self) -> str:
        return (
            f"Character(p->{self.value_p}, zeta->{self.value_teich}, "
            f"1+p->{self.value_oneunit})"
        )


@dataclass(frozen=True)
class WeilPoint:
    """A point p^n zeta^t (1+p)^u of Q_p^x, u a p-adic integer."""

    valuation: int
    teich_exponent: int
    oneunit_exponent: PadicScalar


def _oneunit_order_exponent(a: CoeffAlgebra, x) -> int | None:
    """Least M with x^(p^M) = 1, or None if x is not p-power torsion."""
    p = a.base.p
    bound = a.base.a + nil_filtration(a).nilpotency_index + 2
    cur = tuple(x)
    for m in range(bound + 1):
        if cur == a.one:
            return m
        cur = a.power(cur, p)
    return None


def make_character(a: CoeffAlgebra, value_p, value_teich, value_oneunit) -> Character:
    """Validate generator values and assemble a character.

    Rejects non-units, torsion violations at the Teichmueller generator,
    and values at 1+p whose order is not a power of p (the continuity
    criterion for finite discrete coefficients).
    """
    vp = tuple(int(c) % a.base.q for c in value_p)
    vt = tuple(int(c) % a.base.q for c in value_teich)
    vu = tuple(int(c) % a.base.q for c in value_oneunit)
    for name, v in (("p", vp), ("teich", vt), ("oneunit", vu)):
        if not a.is_unit(v):
            raise NotAUnit(f"character value at {name} is not a unit: {v}")
    if a.power(vt, a.base.p - 1) != a.one:
        raise TorsionViolation(
            f"value at the torsion generator is not (p-1)-torsion: {vt}"
        )
    if _oneunit_order_exponent(a, vu) is None:
        raise NotProP(f"value at 1+p does not have p-power order: {vu}")
    return Character(a, vp, vt, vu)


def char_mul(d1: Character, d2: Character) -> Character:
    if d1.algebra != d2.algebra:
        raise RingMismatch("characters over different rings")
    a = d1.algebra
    return Character(
        a,
        a.mul(d1.value_p, d2.value_p),
        a.mul(d1.value_teich, d2.value_teich),
        a.mul(d1.value_oneunit, d2.value_oneunit),
    )


def char_inv(d: Character) -> Character:
    a = d.algebra
    return Character(
        a,
        a.invert(d.value_p),
        a.invert(d.value_teich),
        a.invert(d.value_oneunit),
    )


def trivial_character(a: CoeffAlgebra) -> Character:
    return Character(a, a.one, a.one, a.one)


def unramified_character(a: CoeffAlgebra, value) -> Character:
    """ur_a: trivial on units, sending p (geometric Frobenius) to ``value``."""
    return make_character(a, value, a.one, a.one)


def eval_character(d: Character, x: WeilPoint) -> tuple[int, ...]:
    """Evaluate on p^n zeta^t (1+p)^u by multiplying generator values."""
    a = d.algebra
    out = a.power(d.value_p, x.valuation)
    out = a.mul(out, a.power(d.value_teich, x.teich_exponent % (a.base.p - 1)))
    m = _oneunit_order_exponent(a, d.value_oneunit)
    if m is None:
        raise NotProP("character value at 1+p lost p-power torsion")
    u = x.oneunit_exponent.residue_mod(m) if m else 0
    out = a.mul(out, a.power(d.value_oneunit, u))
    return out


def push_character(d: Character, rmap: RingMap) -> Character:
    """Base change along a ring map, revalidating on the target."""
    if rmap.src != d.algebra:
        raise RingMismatch("ring map source does not match the character")
    return make_character(
        rmap.dst,
        rmap.apply(d.value_p),
        rmap.apply(d.value_teich),
        rmap.apply(d.value_oneunit),
    )


def enumerate_characters(a: CoeffAlgebra) -> list[Character]:
    """All continuous characters, by direct enumeration of generator values."""
    if a.size > 100_000:
        raise MathError("character enumeration budget exceeded")
    units = a.units()
    teich = [u for u in units if a.power(u, a.base.p - 1) == a.one]
    pro_p = [u for u in units if _oneunit_order_exponent(a, u) is not None]
    out = []
    for vp in units:
        for vt in teich:
            for vu in pro_p:
                out.append(Character(a, vp, vt, vu))
    return out


def count_characters_into(a: CoeffAlgebra, subgroup_rows) -> int:
    """Number of continuous characters valued in 1 + span(subgroup_rows).

    Used as the independent cardinality oracle for cohomology checks: the
    generator values range over the units of the form 1 + i subject to the
    torsion and pro-p constraints.
    """
    from .linalg import in_span

    p, exp = a.base.p, a.base.a
    candidates = []
    for x in a.elements():
        diff = a.sub(x, a.one)
        if in_span(subgroup_rows, diff, p, exp) and a.is_unit(x):
            candidates.append(x)
    n_p = len(candidates)
    n_teich = sum(1 for u in candidates if a.power(u, p - 1) == a.one)
    n_pro = sum(1 for u in candidates if _oneunit_order_exponent(a, u) is not None)
    return n_p * n_teich * n_pro
