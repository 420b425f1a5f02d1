"""Graded-commutative F2 algebras presented by generators and relations.

Elements are F2-sums of monomials; a monomial is a sorted tuple of
(generator name, exponent) pairs, so presence of a monomial means
coefficient 1 and addition is symmetric difference.  Exterior
generators square to zero, and an algebra may carry one designated
invertible (laurent) generator whose exponents may be negative; it
plays the role of the periodicity class of the coefficient ring.

Quotient bases are computed one degree at a time by GF(2) linear
algebra on the span of relation multiples.  Every algebra carries a
hard degree cap ``D``: monomials whose total degree or whose
laurent-free degree exceeds ``D`` are truncated away, which keeps each
degree window finite and exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import gf2
from .errors import (
    DegreeCapExceededError,
    IllFormedElementError,
    InvalidPairError,
    ParseError,
    ValidationError,
)

POLYNOMIAL = "polynomial"
EXTERIOR = "exterior"
LAURENT = "laurent-unit"

_KINDS = (POLYNOMIAL, EXTERIOR, LAURENT)

Monomial = tuple  # tuple[(name, exponent), ...] sorted by name


@dataclass(frozen=True)
class GradedGenerator:
    name: str
    degree: int
    kind: str = POLYNOMIAL

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name):
            raise ValidationError(f"bad generator name {self.name!r}")
        if self.degree < 1:
            # degree-0 generators have no finite degreewise bases; the
            # truncated series types carry their own truncation instead
            raise ValidationError(
                f"generator {self.name} must have degree >= 1 (got {self.degree})")


@dataclass(frozen=True)
class GradedElement:
    """F2 linear combination of monomials (presence = coefficient 1)."""

    terms: frozenset

    def __add__(self, other: "GradedElement") -> "GradedElement":
        return GradedElement(self.terms ^ other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(format_monomial(m) for m in sorted(self.terms, key=_plain_key))

    __repr__ = __str__

    @staticmethod
    def from_monomials(monos: Iterable[Monomial]) -> "GradedElement":
        return GradedElement(frozenset(monos))


ZERO = GradedElement(frozenset())
ONE = GradedElement(frozenset({()}))


def monomial(*pairs: tuple[str, int]) -> Monomial:
    merged: dict[str, int] = {}
    for name, exp in pairs:
        merged[name] = merged.get(name, 0) + exp
    return tuple(sorted((n, e) for n, e in merged.items() if e != 0))


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


def _plain_key(m: Monomial):
    return m


# -- element expression parsing ----------------------------------------------

_FACTOR_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_element(text: str, line: int | None = None) -> GradedElement:
    """Parse a sum-of-monomials expression like ``t^3 + v*b0``."""
    text = text.strip()
    if not text:
        raise ParseError("empty expression", line)
    terms: set[Monomial] = set()
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if chunk == "0":
            continue
        pairs: list[tuple[str, int]] = []
        for factor in chunk.split("*"):
            factor = factor.strip()
            if factor == "1":
                continue
            match = _FACTOR_RE.fullmatch(factor)
            if not match:
                raise ParseError(f"bad monomial factor {factor!r}", line)
            pairs.append((match.group(1), int(match.group(2) or 1)))
        mono = monomial(*pairs)
        terms ^= {mono}
    return GradedElement(frozenset(terms))


class PresentedAlgebra:
    """Generators, homogeneous relations and a degree cap.

    Monomials of a given degree are ordered by (laurent-free part,
    laurent exponent); the per-degree quotient basis consists of the
    monomials not eliminated by relation multiples, eliminating the
    largest monomial of each relation row so that the surviving
    representatives are lexicographically least.
    """

    def __init__(self, generators: Sequence[GradedGenerator],
                 relations: Sequence[GradedElement] = (),
                 degree_cap: int = 16):
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ValidationError("generator names must be unique")
        if degree_cap < 0:
            raise ValidationError("degree cap must be nonnegative")
        laurent = [g for g in generators if g.kind == LAURENT]
        if len(laurent) > 1:
            raise ValidationError("at most one laurent-unit generator is supported")
        self.generators = tuple(generators)
        self.degree_cap = degree_cap
        self.laurent = laurent[0] if laurent else None
        self._by_name = {g.name: g for g in generators}
        self.relations = tuple(self._normalize_relation(r) for r in relations)
        self._degree_cache: dict[int, _DegreeData] = {}
        self._reduced_relations_ok()

    # -- basic queries --------------------------------------------------

    def generator(self, name: str) -> GradedElement:
        if name not in self._by_name:
            raise IllFormedElementError(f"unknown generator {name!r}")
        return GradedElement(frozenset({((name, 1),)}))

    def element(self, text: str) -> GradedElement:
        return self.reduce(parse_element(text))

    @property
    def zero(self) -> GradedElement:
        return ZERO

    @property
    def one(self) -> GradedElement:
        return ONE

    def monomial_degree(self, m: Monomial) -> int:
        return sum(self._gen(n).degree * e for n, e in m)

    def laurent_free_degree(self, m: Monomial) -> int:
        return sum(self._gen(n).degree * e for n, e in m
                   if self._gen(n).kind != LAURENT)

    def monomial_key(self, m: Monomial):
        plain = tuple(p for p in m if self._gen(p[0]).kind != LAURENT)
        lexp = sum(e for n, e in m if self._gen(n).kind == LAURENT)
        return (plain, lexp)

    def degrees_of(self, e: GradedElement) -> set[int]:
        return {self.monomial_degree(m) for m in e.terms}

    def degree_of(self, e: GradedElement) -> int | None:
        """Degree of a homogeneous element, None for 0."""
        degs = self.degrees_of(e)
        if not degs:
            return None
        if len(degs) > 1:
            raise IllFormedElementError(f"element is not homogeneous: {e}")
        return degs.pop()

    def is_homogeneous(self, e: GradedElement) -> bool:
        return len(self.degrees_of(e)) <= 1

    # -- canonical form ---------------------------------------------------

    def _gen(self, name: str) -> GradedGenerator:
        try:
            return self._by_name[name]
        except KeyError:
            raise IllFormedElementError(f"unknown generator {name!r}") from None

    def _check_monomial(self, m: Monomial) -> bool:
        """Validate exponents; returns False if the monomial is zero."""
        for name, exp in m:
            g = self._gen(name)
            if exp < 0 and g.kind != LAURENT:
                raise IllFormedElementError(
                    f"negative exponent on non-invertible generator {name}")
            if g.kind == EXTERIOR and exp >= 2:
                return False
        return True

    def _in_window(self, m: Monomial) -> bool:
        total = self.monomial_degree(m)
        return 0 <= total <= self.degree_cap and \
            self.laurent_free_degree(m) <= self.degree_cap

    def reduce(self, e: GradedElement) -> GradedElement:
        """Canonical form: truncate, then reduce modulo relations."""
        by_degree: dict[int, set[Monomial]] = {}
        for m in e.terms:
            if not self._check_monomial(m):
                continue
            if not self._in_window(m):
                continue
            by_degree.setdefault(self.monomial_degree(m), set()).add(m)
        out: set[Monomial] = set()
        for d, monos in by_degree.items():
            data = self._deg_data(d)
            vec = 0
            for m in monos:
                vec ^= 1 << data.index[m]
            vec = gf2.reduce_vector(vec, data.rel_rows)
            out.update(data.candidates[i] for i in gf2.bits(vec))
        return GradedElement(frozenset(out))

    def mul(self, a: GradedElement, b: GradedElement) -> GradedElement:
        """Product in the quotient, truncated above the degree cap."""
        raw: set[Monomial] = set()
        for ma in a.terms:
            for mb in b.terms:
                m = monomial(*ma, *mb)
                if not self._check_monomial(m):
                    continue
                if self._in_window(m):
                    raw ^= {m}
        return self.reduce(GradedElement(frozenset(raw)))

    def power(self, e: GradedElement, k: int) -> GradedElement:
        out = ONE
        for _ in range(k):
            out = self.mul(out, e)
        return out

    def equal(self, a: GradedElement, b: GradedElement) -> bool:
        return self.reduce(a + b) == ZERO

    # -- degreewise linear algebra ----------------------------------------

    def basis(self, d: int) -> tuple[Monomial, ...]:
        """Deterministic monomial basis of the degree-d quotient space."""
        if d < 0 or d > self.degree_cap:
            raise DegreeCapExceededError(
                f"degree {d} outside window [0, {self.degree_cap}]")
        data = self._deg_data(d)
        return tuple(data.candidates[i] for i in data.basis_indices)

    def basis_elements(self, d: int) -> tuple[GradedElement, ...]:
        return tuple(GradedElement(frozenset({m})) for m in self.basis(d))

    def express(self, e: GradedElement) -> dict[int, tuple[int, ...]]:
        """Coordinates of the canonical form, one vector per degree."""
        e = self.reduce(e)
        out: dict[int, tuple[int, ...]] = {}
        for d in sorted(self.degrees_of(e)):
            data = self._deg_data(d)
            vec = 0
            for m in e.terms:
                if self.monomial_degree(m) == d:
                    vec ^= 1 << data.index[m]
            out[d] = tuple((vec >> i) & 1 for i in data.basis_indices)
        return out

    def express_bits(self, e: GradedElement, d: int) -> int:
        """Coordinates in degree d as a bitmask over basis(d)."""
        e = self.reduce(e)
        data = self._deg_data(d)
        vec = 0
        for m in e.terms:
            if self.monomial_degree(m) == d:
                vec ^= 1 << data.index[m]
        out = 0
        for pos, i in enumerate(data.basis_indices):
            if (vec >> i) & 1:
                out |= 1 << pos
        return out

    def element_from_bits(self, d: int, coords: int) -> GradedElement:
        basis = self.basis(d)
        return GradedElement(frozenset(basis[i] for i in gf2.bits(coords)))

    # -- internals ----------------------------------------------------------

    def _normalize_relation(self, r: GradedElement) -> GradedElement:
        degs = {self.monomial_degree(m) for m in r.terms}
        if len(degs) != 1:
            raise ValidationError(f"relation must be homogeneous and nonzero: {r}")
        d = degs.pop()
        if d > self.degree_cap:
            raise ValidationError(
                f"relation degree {d} exceeds cap {self.degree_cap}: {r}")
        for m in r.terms:
            if not self._check_monomial(m):
                raise ValidationError(f"relation contains an exterior square: {r}")
            if self.laurent_free_degree(m) > self.degree_cap:
                raise ValidationError(f"relation term outside window: {r}")
        return r

    def _reduced_relations_ok(self):
        for r in self.relations:
            if self.reduce(r) != ZERO:
                raise ValidationError(f"relation does not reduce to zero: {r}")

    def _deg_data(self, d: int) -> "_DegreeData":
        if d not in self._degree_cache:
            self._degree_cache[d] = self._build_degree(d)
        return self._degree_cache[d]

    def _plain_monomials(self, d: int) -> list[Monomial]:
        """Laurent-free monomials of exact degree d (within the cap)."""
        gens = [g for g in self.generators if g.kind != LAURENT]
        out: list[Monomial] = []

        def rec(idx: int, remaining: int, acc: list):
            if remaining == 0:
                out.append(tuple(sorted(acc)))
                return
            if idx == len(gens):
                return
            g = gens[idx]
            max_exp = remaining // g.degree
            if g.kind == EXTERIOR:
                max_exp = min(max_exp, 1)
            for e in range(max_exp + 1):
                if e:
                    acc.append((g.name, e))
                rec(idx + 1, remaining - e * g.degree, acc)
                if e:
                    acc.pop()

        if 0 <= d <= self.degree_cap:
            rec(0, d, [])
        return out

    def _monomials_of_degree(self, d: int) -> list[Monomial]:
        """All window monomials of total degree d, laurent powers included."""
        if self.laurent is None:
            return self._plain_monomials(d) if d >= 0 else []
        v, w = self.laurent.name, self.laurent.degree
        out: list[Monomial] = []
        for plain_deg in range(d % w, self.degree_cap + 1, w):
            e = (d - plain_deg) // w
            for m in self._plain_monomials(plain_deg):
                out.append(monomial(*m, (v, e)) if e else m)
        return out

    def _build_degree(self, d: int) -> "_DegreeData":
        candidates = sorted(self._monomials_of_degree(d), key=self.monomial_key)
        index = {m: i for i, m in enumerate(candidates)}
        rows = []
        for r in self.relations:
            dr = self.degree_of(GradedElement(r.terms))
            for mult in self._multiplier_monomials(d - dr):
                vec = self._relation_multiple(mult, r, index)
                if vec:
                    rows.append(vec)
        rel_rows = gf2.reduce_rows(rows)
        piv = gf2.pivots(rel_rows)
        basis_indices = tuple(i for i in range(len(candidates)) if i not in piv)
        return _DegreeData(candidates, index, rel_rows, basis_indices)

    def _multiplier_monomials(self, d: int) -> list[Monomial]:
        """Monomials usable as relation multipliers in degree d."""
        return self._monomials_of_degree(d)

    def _relation_multiple(self, mult: Monomial, r: GradedElement,
                           index: Mapping[Monomial, int]) -> int | None:
        """Bit vector of mult*r over the candidate monomials.

        Returns None when a product term would leave the truncation
        window: including a clipped multiple would impose a wrong
        relation, so the whole row is skipped.
        """
        vec = 0
        for term in r.terms:
            m = monomial(*mult, *term)
            if not self._check_monomial(m):
                continue  # exterior square: the term is genuinely zero
            if self.laurent_free_degree(m) > self.degree_cap:
                return None
            vec ^= 1 << index[m]
        return vec


class _DegreeData:
    __slots__ = ("candidates", "index", "rel_rows", "basis_indices")

    def __init__(self, candidates, index, rel_rows, basis_indices):
        self.candidates = tuple(candidates)
        self.index = dict(index)
        self.rel_rows = list(rel_rows)
        self.basis_indices = tuple(basis_indices)


class AlgebraMap:
    """Degree-preserving algebra map given on generators.

    Validated to carry every relation of the source to zero; used for
    naturality of pages and for boundary restriction maps.
    """

    def __init__(self, source: PresentedAlgebra, target: PresentedAlgebra,
                 images: Mapping[str, GradedElement]):
        self.source = source
        self.target = target
        self.images = {}
        for g in source.generators:
            if g.kind == LAURENT:
                raise InvalidPairError("maps of coefficient units are not modelled")
            if g.name not in images:
                raise InvalidPairError(f"no image supplied for generator {g.name}")
            img = target.reduce(images[g.name])
            if img and target.degree_of(img) != g.degree:
                raise InvalidPairError(
                    f"image of {g.name} is not homogeneous of degree {g.degree}")
            self.images[g.name] = img
        for r in source.relations:
            if self.apply(r) != target.zero:
                raise InvalidPairError(f"relation {r} is not carried to zero")

    def apply(self, e: GradedElement) -> GradedElement:
        out = ZERO
        for m in e.terms:
            term = ONE
            for name, exp in m:
                term = self.target.mul(term, self.target.power(self.images[name], exp))
            out = out + term
        return self.target.reduce(out)
