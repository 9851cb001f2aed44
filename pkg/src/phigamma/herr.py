"""Herr-complex cohomology of rank-one modules at finite precision.

The full substitution group is torsion times pro-p; since p-1 is
invertible, averaging over the torsion part is an exact projector onto its
invariants, and the cohomology is computed from the two-term procyclic
complex

    C0 --(phi-1, gamma-1)--> C1 + C1 --(gamma-1, 1-phi)--> C2

on those invariants.  Degrees are truncated to windows.  A single shared
window would force the alternating size count to vanish identically, so
the three terms live on nested windows whose negative ends widen by a
factor of p per level; this keeps every negative-degree image inside its
codomain, while the positive ends share the ring truncation (the T-adic
completion makes the positive tail harmless).  No a-priori window bound
certifies convergence, so every computation is re-run on an enlarged
window and flagged unstable on disagreement.

The transgression solver recovers the character constants hiding in a
square-zero cocycle class; it is the engine of the lifting stage of the
classification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoSolution, PrecisionUnstable
from .linalg import howell_basis, in_span, kernel_of, span_size
from .pgmod import RankOneModule
from .series import LaurentSeries, SeriesRing, gamma_op, phi_op
from .windows import Window


@dataclass(frozen=True)
class HerrClass:
    """A 1-cochain (x_phi, x_teich, x_gamma) with coefficients in an ideal.

    The procyclic pair is (x_phi, x_gamma); the torsion component is
    carried so the transgression can enforce its order constraint.
    """

    x_phi: LaurentSeries
    x_teich: LaurentSeries | None
    x_gamma: LaurentSeries


class HerrComplex:
    """Window realization of the Herr complex of a module (or of an ideal
    multiple of the trivial module)."""

    def __init__(
        self,
        module: RankOneModule,
        window: tuple[int, int] | None = None,
        ideal_rows=None,
    ):
        ring = module.ring
        p = ring.algebra.base.p
        if window is None:
            window = (max(-2 * p * p, ring.floor), min(4 * p * p, ring.trunc))
        self.module = module
        self.window = window
        self.ideal_rows = None if ideal_rows is None else tuple(
            tuple(r) for r in ideal_rows
        )

    def coefficient_rows(self):
        ring = self.module.ring
        if self.ideal_rows is not None:
            return list(self.ideal_rows)
        return [
            ring.algebra.basis_vector(i) for i in range(ring.algebra.rank)
        ]


def delta_average(x: LaurentSeries, module: RankOneModule | None = None):
    """The idempotent projector onto torsion invariants.

    e = (p-1)^{-1} sum of the torsion-generator powers; p odd makes the
    averaging exact.  With a module, the twisted operator is averaged.
    """
    ring = x.ring
    p = ring.algebra.base.p
    zeta = ring.zeta_scalar()
    if module is None:
        def op(y):
            return gamma_op(y, zeta)
    else:
        op = module.operators()[1]
    acc = x
    cur = x
    for _ in range(p - 2):
        cur = op(cur)
        acc = acc.add(cur)
    inv = pow(p - 1, -1, ring.algebra.base.q)
    return acc.scalar(inv)


# ----------------------------------------------------------------------
# window machinery


def _matrix_between(op, dom: Window, cod: Window, allow_drop: bool = False) -> np.ndarray:
    """Columns are codomain vectors of op applied to the domain basis.

    Negative-degree overflow past the codomain means the windows were too
    small and raises unless ``allow_drop`` makes this an honest projection;
    the positive end is reduced mod T^hi by design.
    """
    cols = []
    n_rows = len(cod.rows)
    for b in dom.basis_series():
        img = op(b)
        col = np.zeros(cod.dim, dtype=np.int64)
        for d, c in img.coeffs.items():
            if d >= cod.hi:
                continue
            if d < cod.lo:
                if allow_drop:
                    continue
                raise PrecisionUnstable(
                    f"operator image reaches degree {d} below the window {cod.lo}"
                )
            coords = cod._express(c)
            if coords is None:
                raise PrecisionUnstable("image leaves the coefficient span")
            base = (d - cod.lo) * n_rows
            for i, v in enumerate(coords):
                col[base + i] = v
        cols.append(col)
    return np.stack(cols, axis=1)


def _invariant_params(complex_: HerrComplex, win: Window) -> np.ndarray:
    """Columns parametrizing the torsion invariants of the span window."""
    ring = complex_.module.ring
    q = ring.algebra.base.q
    p = ring.algebra.base.p
    op_teich = complex_.module.operators()[1]
    Z = _matrix_between(op_teich, win, win)
    acc = np.eye(win.dim, dtype=np.int64)
    power = np.eye(win.dim, dtype=np.int64)
    for _ in range(p - 2):
        power = (Z @ power) % q
        acc = (acc + power) % q
    P = (acc * pow(p - 1, -1, q)) % q
    return P


@dataclass(frozen=True)
class HerrReport:
    """Sizes, prime-field dimensions and representatives per degree."""

    sizes: tuple[int, int, int]
    dims: tuple[int, int, int]
    window: tuple[int, int]
    stable: bool
    representatives: tuple

    def to_json(self) -> dict:
        return {
            "h0": self.dims[0],
            "h1": self.dims[1],
            "h2": self.dims[2],
            "sizes": list(self.sizes),
            "window": list(self.window),
            "stable": self.stable,
            "representatives": [
                [
                    {
                        "deg": d,
                        "coeff": list(c),
                    }
                    for d, c in rep
                ]
                for rep in self.representatives
            ],
        }


def _deep_ring(ring: SeriesRing, lo: int) -> SeriesRing:
    if lo - 1 >= ring.floor:
        return ring
    return SeriesRing(ring.algebra, ring.trunc, lo - 1, ring.coeff_frobenius)


def _retag(module: RankOneModule, ring: SeriesRing) -> RankOneModule:
    if module.ring == ring:
        return module
    def move(x):
        return LaurentSeries(ring, dict(x.coeffs), x.prec, x.exact)
    return RankOneModule(
        ring, move(module.f), move(module.g_teich), move(module.g_gamma)
    )


def _nodrop_floor(ops, ring, rows, target_lo: int) -> int:
    """Deepest degree whose operator images stay at or above target_lo."""
    d = 0
    while d - 1 >= ring.floor + 1:
        ok = True
        for r in rows:
            probe = ring.series({d - 1: r}, exact=True)
            for op in ops:
                md = op(probe).min_deg()
                if md is not None and md < target_lo:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            break
        d -= 1
    return d


def _image_floor(ops, ring, rows, lo: int) -> int:
    """Deepest degree reached by operator images of the window floor."""
    out = lo
    for r in rows:
        probe = ring.series({lo: r}, exact=True)
        for op in ops:
            md = op(probe).min_deg()
            if md is not None:
                out = min(out, md)
    return out


def _cohomology_once(complex_: HerrComplex, window):
    ring0 = complex_.module.ring
    p = ring0.algebra.base.p
    q = ring0.algebra.base.q
    a = ring0.algebra.base.a
    lo1, hi = window
    # work ring: gamma powers at depth |lo| erode roughly one degree of
    # precision per power, so carry that much extra truncation
    probe_ring = _deep_ring(ring0, p * (p * lo1))
    probe_mod = _retag(complex_.module, probe_ring)
    rows = HerrComplex(probe_mod, window, complex_.ideal_rows).coefficient_rows()
    ops_probe = probe_mod.operators()
    lo2 = _image_floor(
        [ops_probe[0], ops_probe[2]], probe_ring, rows, lo1
    )
    work_trunc = hi + abs(lo2) + 8
    ring = SeriesRing(
        ring0.algebra, work_trunc, min(ring0.floor, lo2 - 4),
        ring0.coeff_frobenius,
    )
    module = _retag(complex_.module, ring)
    cx = HerrComplex(module, window, complex_.ideal_rows)
    op_phi, op_teich, op_gamma = module.operators()
    lo0 = _nodrop_floor([op_phi, op_gamma], ring, rows, lo1)

    w0 = Window(ring, lo0, hi, rows)
    w1 = Window(ring, lo1, hi, rows)
    w2 = Window(ring, lo2, hi, rows)

    # coordinates over the rows are only defined modulo the common
    # annihilator exponent of the generators
    a_eff = _effective_exponent(ring, rows)
    qe = p**a_eff

    G0 = _invariant_params(cx, w0) % qe
    G1 = _invariant_params(cx, w1) % qe

    inc01 = _inclusion(w0, w1)
    phi0 = (_matrix_between(op_phi, w0, w1) - inc01) % q
    gam0 = (_matrix_between(op_gamma, w0, w1) - inc01) % q
    inc12 = _inclusion(w1, w2)
    phi1 = (_matrix_between(op_phi, w1, w2) - inc12) % q
    gam1 = (_matrix_between(op_gamma, w1, w2) - inc12) % q

    D1G = np.concatenate([(phi0 @ G0) % qe, (gam0 @ G0) % qe], axis=0)
    # cocycle pairs are tested in the wide third window (no projection)
    D2G = np.concatenate([(gam1 @ G1) % qe, (-(phi1 @ G1)) % qe], axis=1)

    kerG0 = kernel_of(G0, p, a_eff).kernel_size
    kerG1 = kernel_of(G1, p, a_eff).kernel_size
    k0 = G0.shape[1]
    sol1 = kernel_of(D1G, p, a_eff)
    solK = kernel_of(D2G, p, a_eff)
    h0 = sol1.kernel_size // kerG0
    im1 = qe**k0 // sol1.kernel_size
    ker2 = solK.kernel_size // (kerG1 * kerG1)
    h1 = ker2 // im1
    # the cokernel is measured against the small-window invariants without
    # truncating the images: truncation would destroy the unbounded
    # residue functionals that detect nontrivial classes, so the index of
    # the image span inside (image + small invariants) is taken in the
    # wide coordinates
    inc02 = _inclusion(w0, w2)
    targets = (inc02 @ G0) % qe
    im_size = _image_size(D2G, p, a_eff)
    joint_size = _image_size(np.concatenate([D2G, targets], axis=1), p, a_eff)
    h2 = joint_size // im_size
    reps = _h1_representatives(w1, G1, solK, D1G, p, a_eff)
    return (h0, h1, h2), reps


def _effective_exponent(ring, rows) -> int:
    from .linalg import p_valuation

    A = ring.algebra
    p, a = A.base.p, A.base.a
    vals = set()
    for r in rows:
        lead = next(v for v in r if v)
        vals.add(p_valuation(lead, p, a))
    if len(vals) > 1:
        raise PrecisionUnstable(
            "ideal generators with mixed annihilators are not supported "
            "by the window model"
        )
    return a - vals.pop()


def _projection(big: Window, small: Window) -> np.ndarray:
    out = np.zeros((small.dim, big.dim), dtype=np.int64)
    n = len(big.rows)
    for idx in range(big.dim):
        d = big.lo + idx // n
        if small.lo <= d < small.hi:
            out[(d - small.lo) * n + idx % n, idx] = 1
    return out


def _inclusion(small: Window, big: Window) -> np.ndarray:
    out = np.zeros((big.dim, small.dim), dtype=np.int64)
    n = len(small.rows)
    for idx in range(small.dim):
        d = small.lo + idx // n
        i = idx % n
        out[(d - big.lo) * n + i, idx] = 1
    return out


def _image_size(G: np.ndarray, p: int, a: int) -> int:
    rows = [tuple(int(v) for v in col) for col in G.T]
    basis = howell_basis(rows, G.shape[0], p, a)
    return span_size(basis, p, a)


def _h1_representatives(w1: Window, G1, solK, D1G, p, a, cap: int = 8):
    """Kernel generators reduced to ones independent modulo coboundaries."""
    q = p**a
    k1 = G1.shape[1]
    image_rows = [tuple(int(v) for v in col) for col in D1G.T]
    kept = []
    kept_rows = list(image_rows)
    basis = howell_basis(kept_rows, D1G.shape[0], p, a) if kept_rows else ()
    for gen in solK.kernel:
        u = np.array(gen[:k1], dtype=np.int64)
        v = np.array(gen[k1:], dtype=np.int64)
        xg = (G1 @ u) % q
        yg = (G1 @ v) % q
        vec = tuple(int(t) for t in np.concatenate([xg, yg]))
        if not any(vec):
            continue
        if basis and in_span(basis, vec, p, a):
            continue
        kept.append((w1.to_series(xg), w1.to_series(yg)))
        kept_rows.append(vec)
        basis = howell_basis(kept_rows, len(vec), p, a)
        if len(kept) >= cap:
            break
    return tuple(
        (tuple(x.items()), tuple(y.items())) for x, y in kept
    )


def herr_cohomology(complex_: HerrComplex, degree: int | None = None):
    """Cohomology with a doubled-window stability certificate.

    Returns a :class:`HerrReport`; with ``degree`` given, just the pair
    (prime-field dimension, representatives) in that degree.
    """
    lo, hi = complex_.window
    sizes, reps = _cohomology_once(complex_, (lo, hi))
    retries = 0
    cur = (lo, hi)
    stable = False
    while retries < 3:
        bigger = (cur[0] * 2, min(cur[1] * 2, complex_.module.ring.trunc))
        sizes2, _ = _cohomology_once(complex_, bigger)
        if sizes2 == sizes:
            stable = True
            break
        sizes = sizes2
        cur = bigger
        retries += 1
    if not stable:
        raise PrecisionUnstable(
            f"cohomology sizes kept changing, last {sizes} at window {cur}"
        )
    p = complex_.module.ring.algebra.base.p
    dims = tuple(_plog(s, p) for s in sizes)
    report = HerrReport(tuple(sizes), dims, (lo, hi), stable, reps)
    if degree is None:
        return report
    return dims[degree], reps if degree == 1 else ()


def _plog(size: int, p: int) -> int:
    d = 0
    while size > 1:
        if size % p:
            raise PrecisionUnstable(f"cohomology size {size} is not a p-power")
        size //= p
        d += 1
    return d


# ----------------------------------------------------------------------
# transgression


@dataclass(frozen=True)
class Transgression:
    """Constants and corrector splitting a square-zero cocycle class.

    The class equals the character class of the constants plus the
    coboundary of the corrector: x_phi - c_phi = (phi - 1) h and likewise
    for both substitution generators; the torsion constant is forced to
    vanish by the order constraint.
    """

    c_phi: tuple[int, ...]
    c_teich: tuple[int, ...]
    c_gamma: tuple[int, ...]
    corrector: LaurentSeries


def _solve_phi_minus_one(y: LaurentSeries) -> LaurentSeries:
    """Unique h with (phi-1)h = y and h_0 = 0, in the square-zero model.

    Modulo the next filtration step phi acts on monomials by T^d -> T^{pd},
    so the equation splits along multiplication-by-p orbits of degrees and
    back-substitutes outward from zero.
    """
    ring = y.ring
    p = ring.algebra.base.p
    A = ring.algebra
    if y.is_zero():
        return ring.zero(prec=y.prec)
    lo = min(y.min_deg(), 0)
    hi = y.prec
    h: dict[int, tuple] = {}
    for m in sorted(range(lo, hi), key=lambda d: (abs(d), d)):
        if m == 0:
            continue
        base = h.get(m // p, A.zero()) if m % p == 0 else A.zero()
        val = A.sub(base, y.coefficient(m))
        if any(val):
            h[m] = val
    # the corrector is a chosen polynomial, not a truncation of anything
    return ring.series(h, prec=hi, exact=True)


def transgress(
    ideal_rows,
    cls: HerrClass,
    modulo_rows=(),
) -> Transgression:
    """Split a square-zero cocycle into character constants plus a
    coboundary, modulo the span of ``modulo_rows``.

    The constants are unique because the only constants in the image of
    (phi - 1) or (gamma - 1) are zero; failure of the residual checks
    certifies an invalid cocycle (or an inadequate window) as NoSolution.
    """
    ring = cls.x_phi.ring
    A = ring.algebra
    p, a = A.base.p, A.base.a
    mod_basis = howell_basis(
        list(modulo_rows), A.rank, p, a
    ) if modulo_rows else ()

    def in_modulo(coords) -> bool:
        if not any(coords):
            return True
        return bool(mod_basis) and in_span(mod_basis, coords, p, a)

    if cls.x_teich is None:
        raise NoSolution("transgression needs all three components")
    # the corrector can only be solved from the degrees all three
    # components actually know, so everything is capped at their joint
    # precision
    p_star = min(cls.x_phi.prec, cls.x_teich.prec, cls.x_gamma.prec)
    x_phi = cls.x_phi.truncate(p_star)
    x_teich = cls.x_teich.truncate(p_star)
    x_gamma = cls.x_gamma.truncate(p_star)
    ideal_basis = howell_basis(list(ideal_rows), A.rank, p, a)
    for name, x in (("phi", x_phi), ("teich", x_teich), ("gamma", x_gamma)):
        for d, c in x.coeffs.items():
            if not in_span(ideal_basis, c, p, a):
                raise NoSolution(
                    f"{name}-component has a coefficient outside the ideal "
                    f"at degree {d}"
                )
    c_phi = x_phi.coefficient(0)
    y = x_phi.sub(ring.constant(c_phi).truncate(x_phi.prec))
    h = _solve_phi_minus_one(y)
    # verify with the full operator, then read off the other constants
    resid_phi = y.sub(phi_op(h).sub(h)).truncate(p_star)
    _check_residual(resid_phi, in_modulo, "phi")
    zeta = ring.zeta_scalar()
    chi = ring.one_unit_scalar()
    r_teich = x_teich.sub(gamma_op(h, zeta).sub(h)).truncate(p_star)
    c_teich = r_teich.coefficient(0)
    _check_residual(
        r_teich.sub(ring.constant(c_teich).truncate(r_teich.prec)),
        in_modulo,
        "teich",
    )
    if not in_modulo(c_teich):
        raise NoSolution(
            "torsion constant does not vanish; the class violates the "
            "order constraint"
        )
    r_gamma = x_gamma.sub(gamma_op(h, chi).sub(h)).truncate(p_star)
    c_gamma = r_gamma.coefficient(0)
    _check_residual(
        r_gamma.sub(ring.constant(c_gamma).truncate(r_gamma.prec)),
        in_modulo,
        "gamma",
    )
    return Transgression(c_phi, A.zero(), c_gamma, h)


def _check_residual(residual: LaurentSeries, in_modulo, name: str):
    for d, c in residual.coeffs.items():
        if not in_modulo(c):
            raise NoSolution(
                f"{name}-residual is nonzero at degree {d}: {c}"
            )
