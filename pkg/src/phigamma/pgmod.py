"""Rank-one etale modules over the truncated Laurent-series ring.

A module is presented by the unit f acting as Frobenius on a basis vector
together with the units g_teich and g_gamma giving the actions of the two
substitution generators (the torsion one and the pro-p one).  Validity is
the etale condition (all three are units) plus the commutation cocycles

    gamma(f)/f = phi(g)/g            for both generators g,
    gammaz(g_gamma)/g_gamma = gamma0(g_teich)/g_teich,

and the order-(p-1) coherence of the torsion generator, all checked to the
tracked precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CocycleViolation,
    NotAUnit,
    NotEtale,
    PrecisionUnstable,
    RingMismatch,
)
from .chars import Character
from .rings import RingMap
from .series import (
    LaurentSeries,
    SeriesRing,
    first_discrepancy,
    gamma_op,
    invert_series,
    phi_op,
)

#: A basis change is just a unit series; it transforms the module data by
#: f -> f phi(b)/b and g -> g gamma(b)/b.
BasisChange = LaurentSeries


@dataclass(frozen=True)
class RankOneModule:
    """Cocycle data (f, g_teich, g_gamma) of a rank-one etale module."""

    ring: SeriesRing
    f: LaurentSeries
    g_teich: LaurentSeries
    g_gamma: LaurentSeries

    def operators(self):
        """The three semilinear operators acting on series coordinates."""
        ring = self.ring
        zeta = ring.zeta_scalar()
        chi = ring.one_unit_scalar()

        def op_phi(x):
            return self.f.mul(phi_op(x))

        def op_teich(x):
            return self.g_teich.mul(gamma_op(x, zeta))

        def op_gamma(x):
            return self.g_gamma.mul(gamma_op(x, chi))

        return op_phi, op_teich, op_gamma

    def data(self):
        return self.f, self.g_teich, self.g_gamma


def default_margin_floor(ring: SeriesRing, slack: int | None = None) -> int:
    """Residuals must vanish below this degree for checks to count.

    The default slack p^2 reproduces a floor of trunc - p^3, clipped so a
    check always inspects at least the degrees below 1.
    """
    p = ring.algebra.base.p
    slack = p * p if slack is None else slack
    return min(ring.trunc - p * slack, 1)


def _require_zero(residual: LaurentSeries, relation: str, floor: int):
    if residual.prec < floor:
        raise PrecisionUnstable(
            f"check of {relation!r} only reaches degree {residual.prec}, "
            f"margin floor is {floor}"
        )
    if not residual.is_zero():
        d = residual.min_deg()
        raise CocycleViolation(relation, d, residual.coefficient(d))


def validate_module(
    ring: SeriesRing,
    f: LaurentSeries,
    g_teich: LaurentSeries,
    g_gamma: LaurentSeries,
    slack: int | None = None,
):
    p = ring.algebra.base.p
    try:
        invert_series(f)
    except NotAUnit as exc:
        raise NotEtale(f"phi-matrix is not a unit: {exc}") from exc
    for name, g in (("g_teich", g_teich), ("g_gamma", g_gamma)):
        if g.is_zero():
            raise NotAUnit(f"{name} is zero")
        invert_series(g)
    zeta = ring.zeta_scalar()
    chi = ring.one_unit_scalar()
    floor = default_margin_floor(ring, slack)
    checks = [
        ("phi/teich", gamma_op(f, zeta).mul(g_teich).sub(phi_op(g_teich).mul(f))),
        ("phi/gamma", gamma_op(f, chi).mul(g_gamma).sub(phi_op(g_gamma).mul(f))),
        (
            "teich/gamma",
            gamma_op(g_gamma, zeta).mul(g_teich).sub(
                gamma_op(g_teich, chi).mul(g_gamma)
            ),
        ),
    ]
    prod = g_teich
    twisted = g_teich
    for _ in range(p - 2):
        twisted = gamma_op(twisted, zeta)
        prod = prod.mul(twisted)
    checks.append(("teich-order", prod.sub(ring.one().truncate(prod.prec))))
    for relation, residual in checks:
        _require_zero(residual, relation, floor)


def make_module(
    ring: SeriesRing,
    f: LaurentSeries,
    g_teich: LaurentSeries,
    g_gamma: LaurentSeries,
    check: bool = True,
    slack: int | None = None,
) -> RankOneModule:
    """Validate the etale and cocycle conditions and build the module."""
    for s in (f, g_teich, g_gamma):
        if s.ring != ring:
            raise RingMismatch("module data from a different series ring")
    if check:
        validate_module(ring, f, g_teich, g_gamma, slack)
    return RankOneModule(ring, f, g_teich, g_gamma)


def module_of_character(delta: Character, ring: SeriesRing) -> RankOneModule:
    """The constant module with phi acting by delta(p) and the generators
    by delta(zeta) and delta(1+p); constants satisfy every cocycle."""
    if delta.algebra != ring.algebra:
        raise RingMismatch("character over a different coefficient ring")
    return RankOneModule(
        ring,
        ring.constant(delta.value_p),
        ring.constant(delta.value_teich),
        ring.constant(delta.value_oneunit),
    )


def twist_by_basis(
    m: RankOneModule, b: BasisChange, check: bool = True
) -> RankOneModule:
    """Change basis by a unit b: an isomorphic module with
    f' = f phi(b)/b and g' = g gamma(b)/b for each generator."""
    ring = m.ring
    if b.ring != ring:
        raise RingMismatch("basis change from a different series ring")
    binv = invert_series(b)
    zeta = ring.zeta_scalar()
    chi = ring.one_unit_scalar()
    f = m.f.mul(phi_op(b)).mul(binv)
    gt = m.g_teich.mul(gamma_op(b, zeta)).mul(binv)
    gg = m.g_gamma.mul(gamma_op(b, chi)).mul(binv)
    return make_module(ring, f, gt, gg, check=check)


def tensor(m1: RankOneModule, m2: RankOneModule) -> RankOneModule:
    if m1.ring != m2.ring:
        raise RingMismatch("tensor factors over different rings")
    return RankOneModule(
        m1.ring,
        m1.f.mul(m2.f),
        m1.g_teich.mul(m2.g_teich),
        m1.g_gamma.mul(m2.g_gamma),
    )


def dual(m: RankOneModule) -> RankOneModule:
    return RankOneModule(
        m.ring,
        invert_series(m.f),
        invert_series(m.g_teich),
        invert_series(m.g_gamma),
    )


def base_change(
    m: RankOneModule, rmap: RingMap, target: SeriesRing | None = None
) -> RankOneModule:
    """Push the coefficients through a ring map; validity is preserved."""
    if rmap.src != m.ring.algebra:
        raise RingMismatch("ring map source does not match the module")
    if target is None:
        target = SeriesRing(rmap.dst, m.ring.trunc, m.ring.floor)
    return make_module(
        target,
        m.f.map_coefficients(rmap, target),
        m.g_teich.map_coefficients(rmap, target),
        m.g_gamma.map_coefficients(rmap, target),
    )


def modules_equal(m1: RankOneModule, m2: RankOneModule) -> bool:
    return all(
        first_discrepancy(a, b) is None
        for a, b in zip(m1.data(), m2.data())
    )


def is_isomorphic(m1: RankOneModule, m2: RankOneModule):
    """A verified basis-change witness from m1 to m2, or None.

    Classifies both modules and compares the recovered characters; on a
    match the witness is composed from the two classification witnesses.
    """
    from .classify import classify_rank_one

    if m1.ring != m2.ring:
        raise RingMismatch("modules over different rings")
    c1 = classify_rank_one(m1)
    c2 = classify_rank_one(m2)
    if c1.character_key() != c2.character_key():
        return None
    # twist(A(delta), w_i) = m_i, so m2 = twist(m1, w1^{-1} w2)
    w1 = c1.witness()
    w2 = c2.witness()
    b = invert_series(w1).mul(w2)
    if not modules_equal(twist_by_basis(m1, b, check=False), m2):
        raise PrecisionUnstable("isomorphism witness failed verification")
    return b


@dataclass(frozen=True)
class AutomorphismReport:
    """Joint fixed vectors of the three operators on a window.

    For a valid module these are exactly the constants, so the unit group
    of the coefficient ring; ``is_scalars`` records that the computation
    confirmed it and ``unit_count`` the resulting automorphism count.
    """

    fixed_basis: tuple[LaurentSeries, ...]
    fixed_count: int
    is_scalars: bool
    unit_count: int


def automorphisms(m: RankOneModule, window=None) -> AutomorphismReport:
    """Solve phi(b) = b, gamma(b) = b on a window and report the result."""
    from .linalg import kernel_of
    from .windows import Window

    ring = m.ring
    p = ring.algebra.base.p
    if window is None:
        window = (max(ring.floor, -2 * p * p), min(ring.trunc, 4 * p * p))
    lo, hi = window

    def run(lo, hi):
        win = Window(ring, lo, hi)
        op_phi, op_teich, op_gamma = m.operators()
        eye = np.eye(win.dim, dtype=np.int64)
        mats = [
            (win.operator_matrix(op) - eye) % ring.algebra.base.q
            for op in (op_phi, op_teich, op_gamma)
        ]
        stacked = np.concatenate(mats, axis=0)
        sol = kernel_of(stacked, ring.algebra.base.p, ring.algebra.base.a)
        return win, sol

    win, sol = run(lo, hi)
    lo2 = max(ring.floor, lo - (hi - lo) // 2)
    hi2 = min(ring.trunc, hi)
    win2, sol2 = run(lo2, hi2)
    if sol.kernel_size != sol2.kernel_size:
        raise PrecisionUnstable("automorphism kernel depends on the window")
    basis = tuple(win.to_series(k) for k in sol.kernel)
    constants = all(set(b.support()) <= {0} for b in basis)
    is_scalars = constants and sol.kernel_size == ring.algebra.size
    units = len(ring.algebra.units())
    return AutomorphismReport(basis, sol.kernel_size, is_scalars, units)
