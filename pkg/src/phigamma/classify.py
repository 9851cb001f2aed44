"""Classification of rank-one etale modules into characters.

Every rank-one module over a finite coefficient ring is, up to a basis
change, the constant module of a unique continuous character.  The
algorithm mirrors the structure of that statement:

* split the coefficient ring into local factors (the invertible-module
  ambiguity is trivial there, recorded as "free");
* over each factor, normalize modulo the nilradical: peel the Frobenius
  valuation (a multiple of p-1, else the input was no module), then make
  the Frobenius matrix constant by a convergent product whose terms gain a
  factor p of valuation per step, which forces the substitution matrices
  to become constants as well;
* climb back up the nilradical filtration: each square-zero step twists
  the module into the shape 1 + (ideal class), and the transgression
  solver splits that class into character corrections plus a coboundary;
* verify the accumulated witness exactly and read off the tame (Serre
  weight) label of the residue character.

The groupoid census is the brute-force shadow of faithfulness: it
enumerates all valid cocycle triples over a window, buckets them by
classified character, and compares against the independent character
count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    MathError,
    NotAUnit,
    PrecisionUnstable,
    ValuationObstruction,
    VerificationFailed,
)
from .chars import Character, enumerate_characters, make_character
from .herr import HerrClass, transgress
from .linalg import howell_basis, solve_linear_chain
from .pgmod import (
    RankOneModule,
    default_margin_floor,
    make_module,
    module_of_character,
    modules_equal,
    twist_by_basis,
)
from .rings import CoeffAlgebra, local_decompose, nil_filtration
from .series import (
    LaurentSeries,
    SeriesRing,
    as_exact_polynomial,
    first_discrepancy,
    gamma_op,
    invert_series,
    phi_op,
)


@dataclass(frozen=True)
class FactorClassification:
    character: Character
    witness: LaurentSeries
    serre_weight: int
    stable: bool
    verified: bool


@dataclass(frozen=True)
class Classification:
    """Per-local-factor characters with verified basis-change witnesses.

    The invertible module is free on every local factor (finite rings have
    trivial Picard group), recorded rather than computed.
    """

    ring: SeriesRing
    factors: tuple[FactorClassification, ...]
    line_module: str = "free"

    def character_key(self) -> tuple:
        return tuple(f.character.key() for f in self.factors)

    def witness(self) -> LaurentSeries:
        """Witness over the full ring, recombined through the idempotents."""
        if len(self.factors) == 1:
            return self.factors[0].witness
        facs = local_decompose(self.ring.algebra)
        out = self.ring.zero()
        for fac, fc in zip(facs, self.factors):
            part = {}
            for d, c in fc.witness.coeffs.items():
                v = fac.embed(c)
                if any(v):
                    part[d] = v
            out = out.add(
                LaurentSeries(self.ring, part, fc.witness.prec, fc.witness.exact)
            )
        return out

    def to_json(self) -> dict:
        from .jsonio import series_to_json

        return {
            "factors": [
                {
                    "delta": {
                        "delta_p": list(f.character.value_p),
                        "delta_teich": list(f.character.value_teich),
                        "delta_oneunit": list(f.character.value_oneunit),
                    },
                    "witness": series_to_json(f.witness),
                    "serre_weight": f.serre_weight,
                    "stable": f.stable,
                }
                for f in self.factors
            ],
            "L": self.line_module,
        }


def _residue_valuation(x: LaurentSeries, membership) -> int | None:
    degs = [d for d, c in x.coeffs.items() if not membership(c)]
    return min(degs) if degs else None


def residue_normalize(m: RankOneModule):
    """Classify a module over a finite field: (residue character, witness).

    Exposed for field coefficients; the classification pipeline runs the
    same normalization modulo the nilradical of each local factor.
    """
    filt = nil_filtration(m.ring.algebra)
    if filt.nilpotency_index != 1:
        raise MathError("residue normalization expects field coefficients")
    delta, b, _ = _normalize_modulo_nilradical(m, filt)
    character = make_character(m.ring.algebra, *delta)
    return character, invert_series(b)


def _normalize_modulo_nilradical(m: RankOneModule, filt):
    """Twist until the module data is constant modulo the nilradical.

    Returns the character values (exact ring elements), the accumulated
    basis change b with twist(m, b) congruent to those constants, and the
    twisted module data.
    """
    ring = m.ring
    A = ring.algebra
    p = A.base.p

    def in_nil(c):
        return filt.membership(1, c)

    v = _residue_valuation(m.f, in_nil)
    if v is None:
        raise NotAUnit("Frobenius matrix vanishes modulo the nilradical")
    if v % (p - 1):
        raise ValuationObstruction(
            f"Frobenius valuation {v} is not a multiple of {p - 1}; "
            "the input is not a valid module"
        )
    shift = v // (p - 1)
    b = ring.monomial(-shift) if shift else ring.one()
    data = twist_by_basis(m, b, check=False) if shift else m
    c0 = data.f.coefficient(0)
    if in_nil(c0):
        raise PrecisionUnstable(
            "constant term not a unit after peeling; window too small"
        )
    u = data.f.scale(A.invert(c0))
    # the normalizer is only needed up to nilradical congruence (any unit
    # in the same residue class twists equally well), so nilpotent tails
    # are pruned before each Frobenius step; otherwise their junk depth
    # would grow geometrically
    w = _drop_nil_negative(invert_series(u), filt)
    h = w
    term = w
    for _ in range(64):
        if _is_one_mod(term, filt):
            break
        term = _drop_nil_negative(phi_op(term), filt)
        h = h.mul(term)
    else:
        raise PrecisionUnstable("Frobenius normalization did not converge")
    b1 = invert_series(h)
    data = twist_by_basis(data, b1, check=False)
    b = b.mul(b1)
    # modulo the nilradical the twisted data must now be constant
    for name, s in (("f", data.f), ("g_teich", data.g_teich), ("g_gamma", data.g_gamma)):
        for d, c in s.coeffs.items():
            if d != 0 and not in_nil(c):
                raise PrecisionUnstable(
                    f"{name} is not constant modulo the nilradical at degree {d}"
                )
    d_p = data.f.coefficient(0)
    d_teich = _teichmuller_lift(A, filt, data.g_teich.coefficient(0))
    d_one = data.g_gamma.coefficient(0)
    return (d_p, d_teich, d_one), b, data


def _drop_nil_negative(x: LaurentSeries, filt) -> LaurentSeries:
    coeffs = {
        d: c
        for d, c in x.coeffs.items()
        if d >= 0 or not filt.membership(1, c)
    }
    if len(coeffs) == len(x.coeffs):
        return x
    return LaurentSeries(x.ring, coeffs, x.prec, x.exact)


def _is_one_mod(x: LaurentSeries, filt) -> bool:
    for d, c in x.coeffs.items():
        target = filt.algebra.sub(c, filt.algebra.one) if d == 0 else c
        if not filt.membership(1, target):
            return False
    return True


def _teichmuller_lift(A: CoeffAlgebra, filt, x):
    """The unique prime-to-p torsion lift of a residue unit.

    Iterating the residue-cardinality power map fixes the torsion part and
    kills the 1-units, so the limit is exact (p-1)-torsion whenever the
    residue value is.
    """
    qres = filt.residue_size()
    cur = tuple(x)
    for _ in range(64):
        nxt = A.power(cur, qres)
        if nxt == cur:
            return cur
        cur = nxt
    raise MathError("Teichmueller iteration did not stabilize")


def serre_weight_label(character: Character) -> int:
    """Tame exponent mod (p-1) of the residue of the torsion value.

    Unramified twists do not change it; it labels the residue component
    the module sits on.
    """
    A = character.algebra
    p = A.base.p
    filt = nil_filtration(A)
    zeta_res = _teichmuller_scalar_in(A)
    cur = A.one
    for i in range(p - 1):
        if filt.membership(1, A.sub(character.value_teich, cur)):
            return i
        cur = A.mul(cur, zeta_res)
    raise MathError("torsion value is not a power of the Teichmueller generator")


def _teichmuller_scalar_in(A: CoeffAlgebra):
    from .series import teichmuller_scalar

    z = teichmuller_scalar(A.base.p, A.base.a + 2)
    return A.scalar(z.residue_mod(A.base.a), A.one)


def _classify_local(m: RankOneModule, slack: int | None = None) -> FactorClassification:
    ring = m.ring
    A = ring.algebra
    filt = nil_filtration(A)
    (d_p, d_teich, d_one), b, data = _normalize_modulo_nilradical(m, filt)
    e = filt.nilpotency_index
    floor = default_margin_floor(ring, slack)
    for j in range(1, e):
        level = filt.levels[j]
        nxt = filt.levels[j + 1] if j + 1 < len(filt.levels) else ()
        F = data.f.scale(A.invert(d_p))
        G_t = data.g_teich.scale(A.invert(d_teich))
        G_g = data.g_gamma.scale(A.invert(d_one))
        if min(F.prec, G_t.prec, G_g.prec) < max(floor, 1):
            raise PrecisionUnstable(
                f"layer {j} data only known below degree "
                f"{min(F.prec, G_t.prec, G_g.prec)}"
            )
        one = ring.one()
        cls = HerrClass(
            F.sub(one.truncate(F.prec)),
            G_t.sub(one.truncate(G_t.prec)),
            G_g.sub(one.truncate(G_g.prec)),
        )
        tr = transgress(level, cls, modulo_rows=nxt)
        d_p = A.mul(d_p, A.add(A.one, tr.c_phi))
        d_one = A.mul(d_one, A.add(A.one, tr.c_gamma))
        if not tr.corrector.is_zero():
            # (1 + h)^{-1} = 1 - h modulo the next filtration step, so the
            # twist stays an exact polynomial
            u = one.sub(tr.corrector)
            data = twist_by_basis(data, u, check=False)
            b = b.mul(u)
    character = make_character(A, d_p, d_teich, d_one)
    witness = invert_series(b)
    expected = twist_by_basis(
        module_of_character(character, ring), witness, check=False
    )
    verified = modules_equal(expected, m)
    if not verified:
        raise VerificationFailed(
            f"final twist check missed: {first_discrepancy(expected.f, m.f)}"
        )
    floor = default_margin_floor(ring, slack)
    stable = all(
        s.prec >= max(floor, 1)
        for s in (expected.f, expected.g_teich, expected.g_gamma)
    )
    return FactorClassification(
        character, witness, serre_weight_label(character), stable, verified
    )


def classify_rank_one(m: RankOneModule, slack: int | None = None) -> Classification:
    """Recover the unique character and a verified witness per local factor."""
    ring = m.ring
    factors = local_decompose(ring.algebra)
    if len(factors) == 1:
        return Classification(ring, (_classify_local(m, slack),))
    out = []
    for idx, fac in enumerate(factors):
        sub = SeriesRing(fac.algebra, ring.trunc, ring.floor)
        local = RankOneModule(
            sub,
            m.f.map_coefficients(fac.projection, sub),
            m.g_teich.map_coefficients(fac.projection, sub),
            m.g_gamma.map_coefficients(fac.projection, sub),
        )
        out.append(_classify_local(local, slack))
    return Classification(ring, tuple(out))


# ----------------------------------------------------------------------
# groupoid census


@dataclass(frozen=True)
class GroupoidCensus:
    """Counts from independent enumeration over a support window."""

    support: tuple
    candidate_units: int
    valid_triples: int
    discontinuous: int
    iso_classes: int
    characters: int
    units: int
    match: bool

    def to_json(self) -> dict:
        return {
            "support": [list(s) for s in self.support],
            "candidate_units": self.candidate_units,
            "valid_triples": self.valid_triples,
            "discontinuous": self.discontinuous,
            "iso_classes": self.iso_classes,
            "characters": self.characters,
            "units": self.units,
            "match": self.match,
        }


def _support_elements(A: CoeffAlgebra, support):
    """Iterate all coefficient assignments over the support description.

    ``support`` maps degrees to generator rows of the allowed coefficient
    submodule at that degree (defaulting to the whole ring).
    """
    degs = sorted(support)
    spaces = []
    for d in degs:
        rows = support[d]
        if rows is None:
            vals = [tuple(x) for x in A.elements()]
        else:
            basis = howell_basis(rows, A.rank, A.base.p, A.base.a)
            vals = sorted(
                {
                    _combo(A, basis, coeffs)
                    for coeffs in itertools.product(
                        range(A.base.q), repeat=len(basis)
                    )
                }
            )
        spaces.append(vals)
    for assignment in itertools.product(*spaces):
        yield dict(zip(degs, assignment))


def _combo(A: CoeffAlgebra, rows, coeffs):
    out = A.zero()
    for c, r in zip(coeffs, rows):
        if c:
            out = A.add(out, A.scalar(c, r))
    return out


def _is_unit_series(ring: SeriesRing, coeffs: dict) -> bool:
    from .rings import nil_filtration as nf

    for fac in local_decompose(ring.algebra):
        filt = nf(fac.algebra)
        if not any(
            not filt.membership(1, fac.projection.apply(c))
            for c in coeffs.values()
        ):
            return False
    return True


def enumerate_groupoid(
    algebra: CoeffAlgebra,
    support,
    trunc: int = 27,
    budget: int = 1_000_000,
    floor: int = -64,
) -> GroupoidCensus:
    """Enumerate valid cocycle triples over a window and bucket them by
    classified character; the bucket count must match the character count.

    ``support`` is a list of degrees, or a mapping from degree to generator
    rows of the allowed coefficient submodule (None meaning the full ring).
    The candidate count is guarded by ``budget`` before any enumeration.
    """
    if not isinstance(support, dict):
        support = {int(d): None for d in support}
    ring = SeriesRing(algebra, trunc, floor)
    units = []
    for coeffs in _support_elements(algebra, support):
        coeffs = {d: c for d, c in coeffs.items() if any(c)}
        if coeffs and _is_unit_series(ring, coeffs):
            units.append(ring.series(coeffs, exact=True))
    if len(units) ** 3 > budget:
        raise BudgetExceeded(
            f"{len(units)}^3 candidate triples exceed the budget {budget}"
        )
    zeta = ring.zeta_scalar()
    chi = ring.one_unit_scalar()
    valid = 0
    discontinuous = 0
    buckets: dict = {}
    for f in units:
        finv = invert_series(f)
        g_candidates = {}
        for name, scalar in (("teich", zeta), ("gamma", chi)):
            u = gamma_op(f, scalar).mul(finv)
            g_candidates[name] = _twist_eigenvectors(ring, support, u, units)
        for gt in g_candidates["teich"]:
            for gg in g_candidates["gamma"]:
                try:
                    module = make_module(ring, f, gt, gg)
                except MathError:
                    continue
                try:
                    cl = classify_rank_one(module)
                except (MathError, PrecisionUnstable):
                    discontinuous += 1
                    continue
                valid += 1
                buckets.setdefault(cl.character_key(), 0)
                buckets[cl.character_key()] += 1
    characters = enumerate_characters(algebra)
    match = len(buckets) == len(characters)
    return GroupoidCensus(
        support=tuple(sorted((d, tuple(r) if r else ()) for d, r in support.items())),
        candidate_units=len(units),
        valid_triples=valid,
        discontinuous=discontinuous,
        iso_classes=len(buckets),
        characters=len(characters),
        units=len(algebra.units()),
        match=match,
    )


def _twist_eigenvectors(ring: SeriesRing, support, u: LaurentSeries, units):
    """All unit solutions g with phi(g) = u g supported in the window.

    The condition is linear in g, so the support space is sliced by the
    kernel of the corresponding matrix and the survivors are unit-filtered.
    """
    A = ring.algebra
    p, a = A.base.p, A.base.a
    degs = sorted(support)
    gens = []
    for d in degs:
        rows = support[d]
        if rows is None:
            rows = [A.basis_vector(i) for i in range(A.rank)]
        else:
            rows = howell_basis(rows, A.rank, p, a)
        for r in rows:
            gens.append((d, tuple(r)))
    if not gens:
        return []
    images = []
    out_degs = set()
    for d, r in gens:
        g = ring.series({d: r}, exact=True)
        img = phi_op(g).sub(u.mul(g))
        images.append(img)
        out_degs.update(img.coeffs)
    out_degs = sorted(out_degs)
    rows_mat = []
    rank = A.rank
    for od in out_degs:
        for i in range(rank):
            rows_mat.append([img.coefficient(od)[i] for img in images])
    if not rows_mat:
        sol_kernel = [
            tuple(1 if i == j else 0 for i in range(len(gens)))
            for j in range(len(gens))
        ]
    else:
        sol = solve_linear_chain(
            rows_mat, [0] * len(rows_mat), p, a
        )
        sol_kernel = sol.kernel
    seen = set()
    results = []
    for combo in itertools.product(range(A.base.q), repeat=len(sol_kernel)):
        vec = [0] * len(gens)
        for c, k in zip(combo, sol_kernel):
            if c:
                vec = [(v + c * kv) % A.base.q for v, kv in zip(vec, k)]
        key = tuple(vec)
        if key in seen:
            continue
        seen.add(key)
        coeffs: dict = {}
        for (d, r), c in zip(gens, vec):
            if c:
                term = A.scalar(c, r)
                coeffs[d] = A.add(coeffs.get(d, A.zero()), term)
        coeffs = {d: c for d, c in coeffs.items() if any(c)}
        if coeffs and _is_unit_series(ring, coeffs):
            results.append(ring.series(coeffs, exact=True))
    return results
