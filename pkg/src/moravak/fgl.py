"""Truncated formal group law arithmetic over Z/2^r coefficients.

Laws are stored as 2-variable truncated polynomials F(y, z) with
unitality, commutativity and (to the truncation order) associativity
checked at load.  The operations in scope: the 2-series [2](x) = F(x,x),
solving [2](x) = formal-sum of theta_i x^{2^i} degree by degree, height
detection from the leading 2-series exponent, and the grouplike test
alpha(F(y,z)) = alpha(y) alpha(z) that characterizes series inducing
ring-level characters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ComputationError, Not2TypicalError, ValidationError

DEFAULT_TRUNCATION = 16


class Series:
    """Truncated multivariate polynomial over Z/2^r.

    coeffs maps exponent tuples (one entry per variable) to nonzero
    residues; all terms have total degree <= trunc.
    """

    __slots__ = ("nvars", "trunc", "modulus", "coeffs")

    def __init__(self, nvars: int, trunc: int, modulus: int,
                 coeffs: Mapping[tuple, int] | None = None):
        self.nvars = nvars
        self.trunc = trunc
        self.modulus = modulus
        data = {}
        for mono, c in (coeffs or {}).items():
            c %= modulus
            if c and sum(mono) <= trunc:
                data[tuple(mono)] = c
        self.coeffs = data

    @classmethod
    def zero(cls, nvars: int, trunc: int, modulus: int) -> "Series":
        return cls(nvars, trunc, modulus)

    @classmethod
    def const(cls, value: int, nvars: int, trunc: int, modulus: int) -> "Series":
        return cls(nvars, trunc, modulus, {(0,) * nvars: value})

    @classmethod
    def variable(cls, i: int, nvars: int, trunc: int, modulus: int) -> "Series":
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, trunc, modulus, {mono: 1})

    def _like(self, coeffs) -> "Series":
        return Series(self.nvars, self.trunc, self.modulus, coeffs)

    def __eq__(self, other) -> bool:
        return (self.nvars, self.trunc, self.modulus, self.coeffs) == \
            (other.nvars, other.trunc, other.modulus, other.coeffs)

    def __hash__(self):
        return hash((self.nvars, self.trunc, self.modulus,
                     tuple(sorted(self.coeffs.items()))))

    def __add__(self, other: "Series") -> "Series":
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            out[mono] = (out.get(mono, 0) + c) % self.modulus
        return self._like(out)

    def __sub__(self, other: "Series") -> "Series":
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            out[mono] = (out.get(mono, 0) - c) % self.modulus
        return self._like(out)

    def __mul__(self, other: "Series") -> "Series":
        out: dict[tuple, int] = {}
        for m1, c1 in self.coeffs.items():
            d1 = sum(m1)
            for m2, c2 in other.coeffs.items():
                if d1 + sum(m2) > self.trunc:
                    continue
                mono = tuple(a + b for a, b in zip(m1, m2))
                out[mono] = (out.get(mono, 0) + c1 * c2) % self.modulus
        return self._like(out)

    def scale(self, c: int) -> "Series":
        return self._like({m: v * c for m, v in self.coeffs.items()})

    def pow(self, k: int) -> "Series":
        out = Series.const(1, self.nvars, self.trunc, self.modulus)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def compose(self, args: Sequence["Series"]) -> "Series":
        """Substitute args[i] for variable i; args share a variable space."""
        if len(args) != self.nvars:
            raise ValidationError("wrong number of substitution arguments")
        proto = args[0] if args else None
        nvars = proto.nvars if proto else 0
        out = Series.zero(nvars, self.trunc, self.modulus)
        pow_cache: dict[tuple[int, int], Series] = {}

        def arg_pow(i: int, k: int) -> Series:
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = args[i].pow(k)
            return pow_cache[key]

        for mono, c in self.coeffs.items():
            term = Series.const(c, nvars, self.trunc, self.modulus)
            for i, e in enumerate(mono):
                if e:
                    term = term * arg_pow(i, e)
            out = out + term
        return out

    def coefficient(self, mono: tuple) -> int:
        return self.coeffs.get(tuple(mono), 0)

    def lowest_term(self) -> tuple[tuple, int] | None:
        if not self.coeffs:
            return None
        mono = min(self.coeffs, key=lambda m: (sum(m), m))
        return mono, self.coeffs[mono]

    def is_zero(self) -> bool:
        return not self.coeffs

    def compositional_inverse(self) -> "Series":
        """Inverse under substitution for 1-variable series with unit
        linear coefficient and zero constant term."""
        if self.nvars != 1:
            raise ValidationError("compositional inverse needs one variable")
        if self.coefficient((0,)) != 0:
            raise ValidationError("series must have zero constant term")
        lin = self.coefficient((1,))
        if lin % 2 == 0:
            raise ValidationError("linear coefficient must be invertible")
        lin_inv = pow(lin, -1, self.modulus)
        x = Series.variable(0, 1, self.trunc, self.modulus)
        h = x.scale(lin_inv)
        for k in range(2, self.trunc + 1):
            resid = self.compose([h]) - x
            c = resid.coefficient((k,))
            if c:
                h = h - Series(1, self.trunc, self.modulus, {(k,): c * lin_inv})
        if not (self.compose([h]) - x).is_zero():
            raise ComputationError("compositional inverse failed within truncation")
        return h

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        names = "xyzw"
        parts = []
        for mono, c in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            factors = [] if c == 1 and any(mono) else [str(c)]
            for i, e in enumerate(mono):
                if e == 1:
                    factors.append(names[i])
                elif e > 1:
                    factors.append(f"{names[i]}^{e}")
            parts.append("*".join(factors) if factors else str(c))
        return " + ".join(parts)

    __repr__ = __str__


def series_from_coefficients(coeffs: Sequence[int], trunc: int = DEFAULT_TRUNCATION,
                             modulus: int = 2) -> Series:
    """1-variable series from the list [c_0, c_1, ...]."""
    return Series(1, trunc, modulus, {(i,): c for i, c in enumerate(coeffs)})


@dataclass(frozen=True)
class ThetaAssignment:
    """Solved coefficients theta_1..theta_I of the 2-series expansion."""

    values: tuple[int, ...]

    def __getitem__(self, i: int) -> int:
        if i < 1 or i > len(self.values):
            raise IndexError(f"theta index {i} out of range")
        return self.values[i - 1]


class FGL:
    """A commutative one-dimensional formal group law, truncated."""

    def __init__(self, law: Series):
        if law.nvars != 2:
            raise ValidationError("a formal group law has two variables")
        self.law = law
        self.trunc = law.trunc
        self.modulus = law.modulus
        self._validate()

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[tuple[int, int], int],
                          trunc: int = DEFAULT_TRUNCATION, modulus: int = 2) -> "FGL":
        return cls(Series(2, trunc, modulus, dict(coeffs)))

    @classmethod
    def multiplicative(cls, trunc: int = DEFAULT_TRUNCATION, modulus: int = 2) -> "FGL":
        """F(y, z) = y + z + yz."""
        return cls.from_coefficients({(1, 0): 1, (0, 1): 1, (1, 1): 1}, trunc, modulus)

    @classmethod
    def additive(cls, trunc: int = DEFAULT_TRUNCATION, modulus: int = 2) -> "FGL":
        return cls.from_coefficients({(1, 0): 1, (0, 1): 1}, trunc, modulus)

    def _validate(self):
        law = self.law
        for (i, j), c in law.coeffs.items():
            if (i == 0 or j == 0) and c:
                if (i, j) not in ((1, 0), (0, 1)):
                    raise ValidationError(
                        f"unitality fails: coefficient at y^{i} z^{j} must vanish")
        if law.coefficient((1, 0)) != 1 or law.coefficient((0, 1)) != 1:
            raise ValidationError("unitality fails: F(y,0) = y and F(0,z) = z required")
        for (i, j), c in law.coeffs.items():
            if law.coefficient((j, i)) != c:
                raise ValidationError("commutativity fails")
        if not self._associative():
            raise ValidationError("associativity fails within the truncation order")

    def _associative(self) -> bool:
        t, mod = self.trunc, self.modulus
        y = Series.variable(0, 3, t, mod)
        z = Series.variable(1, 3, t, mod)
        w = Series.variable(2, 3, t, mod)
        fyz = self.law.compose([y, z])
        fzw = self.law.compose([z, w])
        return (self.law.compose([fyz, w]) - self.law.compose([y, fzw])).is_zero()

    def formal_sum(self, terms: Sequence[Series]) -> Series:
        """Left-fold a_1 +_F a_2 +_F ... of 1-variable series."""
        if not terms:
            return Series.zero(1, self.trunc, self.modulus)
        acc = terms[0]
        for t in terms[1:]:
            acc = self.law.compose([acc, t])
        return acc


def two_series(F: FGL) -> Series:
    """[2](x) = F(x, x)."""
    x = Series.variable(0, 1, F.trunc, F.modulus)
    return F.law.compose([x, x])


def solve_theta(F: FGL, count: int, target: Series | None = None,
                linear_coeff: int | None = None) -> ThetaAssignment:
    """Solve target = (linear term) +_F sum_F theta_i x^{2^i} for theta.

    The default target is F's own 2-series.  theta_i is read off degree
    2^i of the residual because mixed formal-sum terms start strictly
    higher; after count steps the match must be exact up to the
    truncation order, else the law is rejected as not 2-typical at the
    first unmatched degree.
    """
    if target is None:
        target = two_series(F)
    lin = target.coefficient((1,))
    if linear_coeff is None:
        if lin % 2 != 0 and F.modulus > 2:
            raise Not2TypicalError(1, "2-series has a unit linear term; "
                                      "supply linear_coeff explicitly")
        linear_coeff = lin
    thetas: list[int] = []

    def folded(values: list[int]) -> Series:
        terms = []
        if linear_coeff:
            terms.append(Series(1, F.trunc, F.modulus, {(1,): linear_coeff}))
        for i, v in enumerate(values, start=1):
            if v:
                terms.append(Series(1, F.trunc, F.modulus, {(1 << i,): v}))
        return F.formal_sum(terms)

    for i in range(1, count + 1):
        resid = target - folded(thetas)
        thetas.append(resid.coefficient((1 << i,)))
    resid = target - folded(thetas)
    low = resid.lowest_term()
    if low is not None:
        raise Not2TypicalError(sum(low[0]))
    return ThetaAssignment(tuple(thetas))


def height(F: FGL) -> int | None:
    """log2 of the leading 2-series exponent; None when [2] = 0 to the
    truncation order (height at least log2 of the truncation)."""
    if F.modulus != 2:
        raise ValidationError("height detection requires characteristic 2")
    low = two_series(F).lowest_term()
    if low is None:
        return None
    exp = low[0][0]
    if exp & (exp - 1):
        raise ComputationError(
            f"leading 2-series exponent {exp} is not a power of 2")
    return exp.bit_length() - 1


def grouplike_check(alpha: Series | Sequence[int], F: FGL) -> bool:
    """Whether alpha(F(y,z)) = alpha(y) alpha(z) to the truncation order."""
    if not isinstance(alpha, Series):
        alpha = series_from_coefficients(alpha, F.trunc, F.modulus)
    if alpha.coefficient((0,)) != 1:
        raise ValidationError("grouplike candidates have constant term 1")
    y = Series.variable(0, 2, F.trunc, F.modulus)
    z = Series.variable(1, 2, F.trunc, F.modulus)
    lhs = alpha.compose([F.law])
    rhs = alpha.compose([y]) * alpha.compose([z])
    return (lhs - rhs).is_zero()


def change_coordinates(F: FGL, g: Series) -> FGL:
    """Conjugate by a coordinate change x -> g(x) = x + higher terms."""
    if g.coefficient((1,)) % 2 == 0 or g.coefficient((0,)) != 0:
        raise ValidationError("coordinate changes fix the origin with unit slope")
    g_inv = g.compositional_inverse()
    y = Series.variable(0, 2, F.trunc, F.modulus)
    z = Series.variable(1, 2, F.trunc, F.modulus)
    inner = F.law.compose([g.compose([y]), g.compose([z])])
    return FGL(g_inv.compose([inner]))
