"""Steenrod squares on presented algebras, Milnor primitives, and the
mod-2 bookkeeping for odd integral operations beta∘Sq^{2k}.

A SqAction stores Sq^i only on generators; products are always expanded
through the Cartan formula Sq^k(ab) = sum_{i+j=k} Sq^i(a) Sq^j(b), so
the unstable axioms on generators propagate to everything.  Validation
is eager: an action whose table is incompatible with the algebra's
relations (some Sq^i(r) nonzero in the quotient) is rejected at load,
since a silently inconsistent table would poison every differential
computed from it.

Integral statements are never decided on integral cohomology itself;
they are decided through mod-2 representatives plus a declared
"integral image" subspace (the span of reductions of integral classes),
with a three-valued verdict when the data cannot decide.
"""

from __future__ import annotations

import enum
from typing import Mapping, Sequence

from . import gf2
from .errors import (
    ActionNotCheckedError,
    NotIntegralError,
    ValidationError,
)
from .f2alg import (
    LAURENT,
    AlgebraMap,
    GradedElement,
    Monomial,
    PresentedAlgebra,
    ZERO,
)


class TriState(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class SqAction:
    """Table of Sq^i on generators, extended by Cartan and additivity.

    table maps a generator name to {i: element} for 0 < i < |g|; the
    endpoints are forced (Sq^0 = id, Sq^{|g|} = squaring) and entries
    above the degree are zero.
    """

    def __init__(self, algebra: PresentedAlgebra,
                 table: Mapping[str, Mapping[int, GradedElement]] | None = None,
                 _validate: bool = True):
        if any(g.kind == LAURENT for g in algebra.generators):
            raise ValidationError(
                "Sq actions are defined on coefficient-free algebras only")
        self.algebra = algebra
        table = dict(table or {})
        self._table: dict[str, dict[int, GradedElement]] = {}
        for g in algebra.generators:
            row = {int(i): algebra.reduce(e) for i, e in table.pop(g.name, {}).items()}
            for i in sorted(row):
                e = row[i]
                if i == 0 or i == g.degree:
                    # endpoints are forced; tolerate redundant declarations
                    gen = algebra.generator(g.name)
                    forced = gen if i == 0 else algebra.mul(gen, gen)
                    if e != forced:
                        raise ValidationError(
                            f"Sq^{i}({g.name}) is forced to {forced}, got {e}")
                    del row[i]
                    continue
                if i < 0 or i > g.degree:
                    raise ValidationError(
                        f"Sq^{i}({g.name}) vanishes for i > {g.degree}; do not declare it")
                if e and algebra.degree_of(e) != g.degree + i:
                    raise ValidationError(
                        f"Sq^{i}({g.name}) must be homogeneous of degree {g.degree + i}")
            self._table[g.name] = row
        if table:
            raise ValidationError(f"Sq table for unknown generators: {sorted(table)}")
        self._total_cache: dict[Monomial, GradedElement] = {}
        self._power_cache: dict[tuple[str, int], GradedElement] = {}
        self.validated = False
        if _validate:
            self._check_relations()
            self.validated = True

    @classmethod
    def unchecked(cls, algebra: PresentedAlgebra,
                  table: Mapping[str, Mapping[int, GradedElement]] | None = None
                  ) -> "SqAction":
        """Build without relation validation; sq() will refuse to run."""
        return cls(algebra, table, _validate=False)

    def generator_sq(self, name: str, i: int) -> GradedElement:
        g = self.algebra._gen(name)
        if i < 0 or i > g.degree:
            return ZERO
        if i == 0:
            return self.algebra.generator(name)
        if i == g.degree:
            gen = self.algebra.generator(name)
            return self.algebra.mul(gen, gen)
        return self._table[name].get(i, ZERO)

    def _total_sq_power(self, name: str, exp: int) -> GradedElement:
        """Total square of g^exp, all degrees mixed into one element."""
        key = (name, exp)
        if key not in self._power_cache:
            if exp == 0:
                out = self.algebra.one
            else:
                half = self._total_sq_power(name, exp // 2)
                out = self.algebra.mul(half, half)
                if exp % 2:
                    g = self.algebra._gen(name)
                    total = ZERO
                    for i in range(g.degree + 1):
                        total = total + self.generator_sq(name, i)
                    out = self.algebra.mul(out, total)
            self._power_cache[key] = out
        return self._power_cache[key]

    def total_sq_monomial(self, m: Monomial) -> GradedElement:
        if m not in self._total_cache:
            out = self.algebra.one
            for name, exp in m:
                out = self.algebra.mul(out, self._total_sq_power(name, exp))
            self._total_cache[m] = out
        return self._total_cache[m]

    def _check_relations(self):
        for r in self.algebra.relations:
            d = self.algebra.degree_of(r)
            for i in range(d + 1):
                if sq(i, r, self, _skip_check=True) != ZERO:
                    raise ValidationError(
                        f"action does not descend to the quotient: "
                        f"Sq^{i}({r}) is nonzero")


def sq(i: int, e: GradedElement, action: SqAction, *,
       _skip_check: bool = False) -> GradedElement:
    """Sq^i extended additively and by Cartan from the generator table."""
    if not _skip_check and not action.validated:
        raise ActionNotCheckedError("Sq action has not passed validation")
    if i < 0:
        raise ValidationError("Sq index must be nonnegative")
    alg = action.algebra
    out: set[Monomial] = set()
    for m in e.terms:
        target = alg.monomial_degree(m) + i
        if target > alg.degree_cap:
            continue
        total = action.total_sq_monomial(m)
        for mono in total.terms:
            if alg.monomial_degree(mono) == target:
                out ^= {mono}
    return alg.reduce(GradedElement(frozenset(out)))


def milnor_q(j: int, e: GradedElement, action: SqAction) -> GradedElement:
    """Milnor primitive Q_j, raising degree by 2^{j+1} - 1.

    Q_0 = Sq^1 and Q_j = Sq^{2^j} Q_{j-1} + Q_{j-1} Sq^{2^j}; the
    commutator step uses the square matching Q_j's degree shift, so the
    shift telescopes to 2^j + (2^j - 1).
    """
    if j < 0:
        raise ValidationError("Milnor index must be nonnegative")
    if j == 0:
        return sq(1, e, action)
    s = 1 << j
    return sq(s, milnor_q(j - 1, e, action), action) + \
        milnor_q(j - 1, sq(s, e, action), action)


def check_derivation(j: int, a: GradedElement, b: GradedElement,
                     action: SqAction) -> bool:
    """Whether Q_j(ab) = Q_j(a)b + aQ_j(b) holds for this pair."""
    alg = action.algebra
    lhs = milnor_q(j, alg.mul(a, b), action)
    rhs = alg.mul(milnor_q(j, a, action), b) + alg.mul(a, milnor_q(j, b, action))
    return alg.reduce(lhs + rhs) == ZERO


def adem_spot_check(action: SqAction, max_degree: int | None = None) -> bool:
    """Sq^1 Sq^1 = 0 and Sq^1 Sq^2 = Sq^3 on all basis elements."""
    alg = action.algebra
    top = alg.degree_cap - 3 if max_degree is None else max_degree
    for d in range(top + 1):
        for e in alg.basis_elements(d):
            if sq(1, sq(1, e, action), action) != ZERO:
                return False
            if sq(1, sq(2, e, action), action) != sq(3, e, action):
                return False
    return True


class IntegralityData:
    """Declared span of mod-2 reductions of integral classes, per degree.

    The unit is always integral.  Validation enforces that the span is
    killed by Sq^1 (reductions of integral classes are) and that it is
    closed under products, both within the degree window.
    """

    def __init__(self, action: SqAction,
                 spans: Mapping[int, Sequence[GradedElement]] | None = None):
        self.action = action
        self.algebra = action.algebra
        self._rows: dict[int, list[int]] = {}
        spans = spans or {}
        elements: dict[int, list[GradedElement]] = {0: [self.algebra.one]}
        for d, elems in spans.items():
            for e in elems:
                e = self.algebra.reduce(e)
                if not e:
                    continue
                if self.algebra.degree_of(e) != d:
                    raise ValidationError(
                        f"integral-image entry of wrong degree: {e} declared in {d}")
                elements.setdefault(d, []).append(e)
        self._elements = elements
        for d, elems in elements.items():
            rows = [self._vector(e, d) for e in elems]
            self._rows[d] = gf2.reduce_rows(rows)
        self._validate()

    def _vector(self, e: GradedElement, d: int) -> int:
        return self.algebra.express_bits(e, d)

    def contains(self, e: GradedElement) -> bool:
        e = self.algebra.reduce(e)
        for d in self.algebra.degrees_of(e):
            vec = self.algebra.express_bits(e, d)
            if not gf2.in_span(vec, self._rows.get(d, [])):
                return False
        return True

    def _validate(self):
        cap = self.algebra.degree_cap
        for d, elems in self._elements.items():
            for e in elems:
                if sq(1, e, self.action) != ZERO:
                    raise ValidationError(
                        f"integral-image entry not killed by Sq^1: {e}")
        degrees = sorted(self._elements)
        for d1 in degrees:
            for d2 in degrees:
                if d1 + d2 > cap or (d1 == 0 or d2 == 0):
                    continue
                for a in self._elements[d1]:
                    for b in self._elements[d2]:
                        prod = self.algebra.mul(a, b)
                        if prod and not self.contains(prod):
                            raise ValidationError(
                                "integral image is not closed under products: "
                                f"({a})*({b}) escapes")


def sq_z(k: int, e: GradedElement, action: SqAction,
         integ: IntegralityData) -> tuple[GradedElement, TriState]:
    """Mod-2 shadow and vanishing certificate of the odd operation
    beta∘Sq^{2k} on (the integral lift of) e.

    The representative is Sq^1(Sq^{2k}(e)).  The integral class is zero
    exactly when Sq^{2k}(e) lifts integrally, i.e. lies in the declared
    integral image; a nonzero shadow certifies nonvanishing; anything
    else is undecided by mod-2 data.
    """
    if k < 0:
        raise ValidationError("index must be nonnegative")
    e = action.algebra.reduce(e)
    if not integ.contains(e):
        raise NotIntegralError(f"class is not in the declared integral image: {e}")
    inner = sq(2 * k, e, action)
    rep = sq(1, inner, action)
    if integ.contains(inner):
        verdict = TriState.YES
    elif rep != ZERO:
        verdict = TriState.NO
    else:
        verdict = TriState.UNKNOWN
    return rep, verdict


def commutes_with_sq(fmap: AlgebraMap, source_action: SqAction,
                     target_action: SqAction) -> bool:
    """Whether f(Sq^i g) = Sq^i f(g) for every generator and index."""
    for g in fmap.source.generators:
        for i in range(g.degree + 1):
            lhs = fmap.apply(source_action.generator_sq(g.name, i))
            rhs = sq(i, fmap.images[g.name], target_action)
            if fmap.target.reduce(lhs + rhs) != ZERO:
                return False
    return True
