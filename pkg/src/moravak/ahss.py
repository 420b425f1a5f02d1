"""The twisted Atiyah-Hirzebruch page at its first nontrivial differential.

The coefficient ring is a graded field on one invertible class v of
degree w = 2^{n+1} - 2, so a page is determined by one fundamental
strip: for each column p we store a basis of the cell and one
differential matrix into column p + (2^{n+1} - 1); every other row of
the page is the v-power translate of the strip, and the differential
sends the v-exponent e to e - 1.

The differential on the starting page is
    d(m * v^e) = (Q_n(m) + m * phi) * v^{e-1},
where phi is the degree-(2^{n+1}-1) class obtained from the twist by
applying Q_{n-1} ... Q_1 (the twist itself at n = 1).  Turning the page
takes kernel mod image per column with deterministic representatives.

Columns whose outgoing differential would leave a truncated window are
flagged edge-incomplete instead of being reported as ranks: the kernel
there depends on classes the model does not contain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import gf2
from .errors import (
    DifferentialNotFilledError,
    InconsistentActionError,
    IntegralDataRequiredError,
    NotIntegralError,
    ValidationError,
    WrongTwistDegreeError,
)
from .f2alg import GradedElement, PresentedAlgebra, ZERO
from .rbk import v_degree
from .steenrod import IntegralityData, SqAction, TriState, milnor_q, sq


@dataclass
class SpaceModel:
    """A space as its presented mod-2 cohomology with a Steenrod action.

    top_degree is the dimension: when it sits strictly below the degree
    cap the model asserts that cohomology vanishes above it (validated),
    and page windows are then complete; when it equals the cap the model
    is a truncation and boundary columns are flagged.
    """

    algebra: PresentedAlgebra
    action: SqAction
    integ: Optional[IntegralityData] = None
    top_degree: Optional[int] = None

    def __post_init__(self):
        if self.action.algebra is not self.algebra:
            raise ValidationError("action is attached to a different algebra")
        if self.top_degree is None:
            self.top_degree = self.algebra.degree_cap
        if self.top_degree > self.algebra.degree_cap:
            raise ValidationError("top degree exceeds the degree cap")
        if self.top_degree < self.algebra.degree_cap:
            for d in range(self.top_degree + 1, self.algebra.degree_cap + 1):
                if self.algebra.basis(d):
                    raise ValidationError(
                        f"model of dimension {self.top_degree} has classes in degree {d}")

    @property
    def closed_window(self) -> bool:
        return self.top_degree < self.algebra.degree_cap


@dataclass(frozen=True)
class TwistClass:
    """A degree-(n+2) class twisting the theory; the flag records that it
    is declared to reduce from an integral class."""

    element: GradedElement
    integral: bool = True


class Page:
    """One fundamental strip of a bigraded page plus its differential."""

    def __init__(self, n: int, algebra: PresentedAlgebra,
                 bases: Mapping[int, tuple[GradedElement, ...]],
                 diff: Optional[Mapping[int, tuple[int, ...]]],
                 incomplete: frozenset, label: str):
        self.n = n
        self.algebra = algebra
        self.bases = dict(bases)
        self.diff = dict(diff) if diff is not None else None
        self.incomplete = frozenset(incomplete)
        self.label = label

    @property
    def step(self) -> int:
        """Column shift of the differential, 2^{n+1} - 1."""
        return 2 ** (self.n + 1) - 1

    @property
    def v_width(self) -> int:
        return v_degree(self.n)

    @property
    def window(self) -> range:
        return range(0, self.algebra.degree_cap + 1)

    def rank(self, p: int) -> int:
        return len(self.bases.get(p, ()))

    def is_incomplete(self, p: int) -> bool:
        return p in self.incomplete

    def cell(self, p: int, q: int) -> tuple[tuple[GradedElement, int], ...]:
        """Basis of E^{p,q}: pairs (class, v-exponent), empty off the
        nonzero rows q = e * (2^{n+1}-2)."""
        if q % self.v_width:
            return ()
        e = q // self.v_width
        return tuple((b, e) for b in self.bases.get(p, ()))

    def differential_matrix(self, p: int, q: int = 0) -> tuple[int, ...] | None:
        """Columns of d at (p, q); independent of q by v-linearity."""
        if q % self.v_width:
            raise ValidationError("no cell on that row")
        if self.diff is None:
            return None
        return self.diff.get(p)

    def ranks(self) -> dict[int, int]:
        return {p: self.rank(p) for p in self.window}


def twist_term(space: SpaceModel, twist: TwistClass, n: int) -> GradedElement:
    """The degree-(2^{n+1}-1) class Q_{n-1}...Q_1 applied to the twist;
    at n = 1 the twist itself."""
    h = space.algebra.reduce(twist.element)
    if h and space.algebra.degree_of(h) != n + 2:
        raise WrongTwistDegreeError(
            f"twist must be homogeneous of degree {n + 2}")
    phi = h
    for j in range(1, n):
        phi = milnor_q(j, phi, space.action)
    return phi


def e2_page(space: SpaceModel, n: int) -> Page:
    """Starting page: column p carries the degree-p quotient basis."""
    if n < 1:
        raise ValidationError("height must be >= 1")
    bases = {p: space.algebra.basis_elements(p)
             for p in range(space.algebra.degree_cap + 1)}
    return Page(n, space.algebra, bases, None, frozenset(), "E2")


def first_differential(page: Page, space: SpaceModel, twist: TwistClass) -> Page:
    """Fill d(m v^e) = (Q_n(m) + m.phi) v^{e-1} and verify d^2 = 0."""
    if page.diff is not None:
        raise ValidationError("differential is already filled on this page")
    if page.algebra is not space.algebra:
        raise ValidationError("page was built from a different space")
    n, R = page.n, page.step
    cap = space.algebra.degree_cap
    phi = twist_term(space, twist, n)
    diff: dict[int, tuple[int, ...]] = {}
    incomplete: set[int] = set()
    for p in page.window:
        if p + R <= cap:
            cols = []
            for m in page.bases[p]:
                image = milnor_q(n, m, space.action) + space.algebra.mul(m, phi)
                cols.append(space.algebra.express_bits(image, p + R))
            diff[p] = tuple(cols)
        elif space.closed_window:
            # target degree exceeds the dimension: the map is honestly zero
            diff[p] = tuple(0 for _ in page.bases[p])
        else:
            incomplete.add(p)
    for p in page.window:
        if p in diff and (p + R) in diff:
            down = diff[p + R]
            for col in diff[p]:
                if gf2.apply_columns(down, col):
                    raise InconsistentActionError(
                        f"d^2 != 0 out of column {p}; the Sq table is inconsistent")
    return Page(n, page.algebra, page.bases, diff, frozenset(incomplete), page.label)


def turn_page(page: Page) -> Page:
    """Homology of the differential, with deterministic representatives.

    Surviving classes in column p are kernel-mod-image vectors reduced to
    their lexicographically least form; incomplete columns keep their old
    basis and stay flagged, since their kernel is not computable inside
    the window.
    """
    if page.diff is None:
        raise DifferentialNotFilledError("fill the differential before turning")
    R = page.step
    new_bases: dict[int, tuple[GradedElement, ...]] = {}
    for p in page.window:
        old = page.bases.get(p, ())
        if p in page.incomplete:
            new_bases[p] = old
            continue
        dim = len(old)
        kernel = gf2.kernel_basis(list(page.diff[p]), dim)
        image = list(page.diff[p - R]) if p - R >= 0 else []
        reps = gf2.quotient_representatives(kernel, image)
        elems = []
        for rep in reps:
            e = ZERO
            for i in gf2.bits(rep):
                e = e + old[i]
            elems.append(e)
        new_bases[p] = tuple(elems)
    zero_diff = {p: tuple(0 for _ in new_bases[p])
                 for p in page.window if p not in page.incomplete}
    label = f"E{2 ** (page.n + 1)}" if page.label == "E2" \
        else page.label + "+ (upper bound)"
    return Page(page.n, page.algebra, new_bases, zero_diff,
                page.incomplete, label)


@dataclass(frozen=True)
class IntegralPageResult:
    """Mod-2 shadow of the integral differential plus, for every matrix
    column, a three-valued certificate for vanishing of the underlying
    integral class."""

    page: Page
    certificates: dict

    def certificate(self, p: int, i: int) -> TriState:
        return self.certificates[p][i]


def integral_first_differential(page: Page, space: SpaceModel,
                                twist: TwistClass) -> IntegralPageResult:
    """Shadow of the integral first differential with vanishing certificates.

    The shadow matrix agrees with the mod-2 differential.  A nonzero
    shadow certifies integral nonvanishing.  A zero shadow upgrades to a
    vanishing certificate only when the beta-certificates resolve: the
    leading term of the integral lift of Q_n is beta Sq^{2^{n+1}-2}, so
    the source class must have Sq^{2^{n+1}-2} inside the declared
    integral image, and the twist contribution must vanish integrally
    (zero twist, or Sq^2 of the twist inside the image, which kills the
    innermost factor of the composite).  Everything else is unknown.
    """
    if not twist.integral:
        raise NotIntegralError("the twist must be flagged integral")
    if space.integ is None:
        raise IntegralDataRequiredError("the space carries no integral-image data")
    integ = space.integ
    filled = first_differential(page, space, twist)
    h = space.algebra.reduce(twist.element)
    if h == ZERO:
        twist_ok = True
    elif page.n >= 2:
        twist_ok = integ.contains(sq(2, h, space.action))
    else:
        twist_ok = False
    certificates: dict[int, tuple] = {}
    for p in filled.window:
        if p in filled.incomplete:
            continue
        cols = filled.diff[p]
        verdicts = []
        for m, col in zip(filled.bases[p], cols):
            if col:
                verdicts.append(TriState.NO)
            else:
                qn_ok = integ.contains(sq(filled.v_width, m, space.action))
                verdicts.append(TriState.YES if (qn_ok and twist_ok)
                                else TriState.UNKNOWN)
        certificates[p] = tuple(verdicts)
    return IntegralPageResult(filled, certificates)
