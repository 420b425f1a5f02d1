"""Module theory over R(b_k) = K(n)_*[b_k]/(b_k^2 - v^{2^k} b_k) and over
truncated tensor products of these rings.

Modules are finite-rank free over the coefficient ring F2[v^{+-1}], so
after normalizing the forced v-power out of every matrix entry the
operator b_k becomes a plain F2 matrix B with B^2 = B, and all kernel,
image and cokernel computations are exact GF(2) linear algebra.  The
defining relation makes B idempotent, which is what drives the
vanishing of all higher Tor groups against the two cyclic quotients
M_k (b_k acts by 0) and N_k (b_k acts by v^{2^k}).

Two independent computational routes are kept deliberately separate:
Tor via the explicit 2-periodic resolution and the bar-page via an
honest multicomplex, against the one-shot stacked-cokernel quotient.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from . import gf2
from .errors import (
    InvalidIndexError,
    InvalidTensorModuleError,
    ValidationError,
)
from .twistgroup import AlgebraHom

DEFAULT_TENSOR_TRUNCATION = 6


def v_degree(n: int) -> int:
    """Degree of the periodicity class at height n."""
    return 2 ** (n + 1) - 2


def b_degree(n: int, k: int) -> int:
    return 2**k * v_degree(n)


class StandardModule(enum.Enum):
    M = "M"  # R(b_k)/(b_k)
    N = "N"  # R(b_k)/(b_k - v^{2^k})
    R = "R"  # R(b_k) as a module over itself


def _check_operator(cols: Sequence[int], degrees: Sequence[int], n: int,
                    what: str) -> tuple[int, ...]:
    r = len(degrees)
    if len(cols) != r:
        raise ValidationError(f"{what}: operator must be {r}x{r}")
    w = v_degree(n)
    mask_rows = [sum(1 << i for i in range(r) if degrees[i] % w == degrees[j] % w)
                 for j in range(r)]
    for j, col in enumerate(cols):
        if col >> r:
            raise ValidationError(f"{what}: column {j} has out-of-range bits")
        if col & ~mask_rows[j]:
            raise ValidationError(
                f"{what}: entry mixes generator degrees that differ mod |v| = {w}")
    squared = gf2.compose_columns(cols, cols)
    if list(squared) != list(cols):
        raise ValidationError(
            f"{what}: defining relation fails, B^2 != v^(2^k) B in normalized form")
    return tuple(cols)


@dataclass(frozen=True)
class RbkModule:
    """Finite-rank free module over the height-n coefficients with one
    operator B_k; entries are stored v-normalized, so B is over F2."""

    n: int
    k: int
    degrees: tuple[int, ...]
    operator: tuple[int, ...]  # columns as bitmasks

    def __post_init__(self):
        if self.n < 1 or self.k < 0:
            raise ValidationError("need height n >= 1 and factor index k >= 0")
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "operator",
                           _check_operator(self.operator, self.degrees, self.n,
                                           f"R(b_{self.k})-module"))

    @property
    def rank(self) -> int:
        return len(self.degrees)


@dataclass(frozen=True)
class TensorModule:
    """Module over the truncated tensor of R(b_k), 0 <= k < truncation,
    with commuting idempotent (normalized) operators."""

    n: int
    truncation: int
    degrees: tuple[int, ...]
    operators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("need height n >= 1")
        if len(self.operators) != self.truncation:
            raise ValidationError("one operator per tensor factor is required")
        object.__setattr__(self, "degrees", tuple(self.degrees))
        ops = []
        for k, cols in enumerate(self.operators):
            try:
                ops.append(_check_operator(cols, self.degrees, self.n, f"factor {k}"))
            except ValidationError as err:
                raise InvalidTensorModuleError(str(err)) from None
        for a in range(len(ops)):
            for b in range(a + 1, len(ops)):
                ab = gf2.compose_columns(ops[a], ops[b])
                ba = gf2.compose_columns(ops[b], ops[a])
                if ab != ba:
                    raise InvalidTensorModuleError(
                        f"operators {a} and {b} do not commute")
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def factor(self, k: int) -> RbkModule:
        return RbkModule(self.n, k, self.degrees, self.operators[k])

    @classmethod
    def from_single(cls, module: RbkModule,
                    truncation: int = DEFAULT_TENSOR_TRUNCATION) -> "TensorModule":
        """Place one R(b_k)-module in a tensor context; other factors act by 0."""
        zero = tuple(0 for _ in module.degrees)
        ops = [zero] * truncation
        if module.k >= truncation:
            raise ValidationError("factor index at or above the tensor truncation")
        ops[module.k] = module.operator
        return cls(module.n, truncation, module.degrees, tuple(ops))

    @classmethod
    def point(cls, n: int, truncation: int = DEFAULT_TENSOR_TRUNCATION) -> "TensorModule":
        """Rank one, every operator zero."""
        return cls(n, truncation, (0,), tuple((0,) for _ in range(truncation)))


@dataclass(frozen=True)
class GradedKnModule:
    """Free graded module over the height-n coefficient ring, recorded by
    generator degrees; degrees are only meaningful mod |v|."""

    n: int
    degree_classes: tuple[int, ...]

    def __post_init__(self):
        w = v_degree(self.n)
        object.__setattr__(self, "degree_classes",
                           tuple(sorted(d % w for d in self.degree_classes)))

    @property
    def rank(self) -> int:
        return len(self.degree_classes)

    @property
    def is_zero(self) -> bool:
        return not self.degree_classes


def standard_module(which: StandardModule | str, n: int, k: int) -> RbkModule:
    """The cyclic quotients M_k, N_k and the free rank-2 module R_k."""
    which = StandardModule(which)
    if which is StandardModule.M:
        return RbkModule(n, k, (0,), (0,))
    if which is StandardModule.N:
        return RbkModule(n, k, (0,), (1,))
    # free module on 1 and b_k; multiplication by b_k sends 1 -> b_k
    # and b_k -> v^{2^k} b_k
    return RbkModule(n, k, (0, b_degree(n, k)), (0b10, 0b10))


def _resolution_map(operator: tuple[int, ...], rank: int, against: StandardModule,
                    position: int) -> list[int]:
    """Map at the given position of the 2-periodic resolution, normalized.

    Against M_k the maps alternate (b, b - v^{2^k}, b, ...) starting at
    position 1; against N_k the two alternate in the other order.
    """
    identity = [1 << i for i in range(rank)]
    b = list(operator)
    b_minus_v = [b[i] ^ identity[i] for i in range(rank)]
    odd = b if against is StandardModule.M else b_minus_v
    even = b_minus_v if against is StandardModule.M else b
    return odd if position % 2 == 1 else even


def _quotient_module(n: int, degrees: Sequence[int], kernel: Sequence[int],
                     image: Sequence[int]) -> GradedKnModule:
    reps = gf2.quotient_representatives(kernel, image)
    classes = []
    w = v_degree(n)
    for rep in reps:
        support = gf2.bits(rep)
        cls = {degrees[i] % w for i in support}
        if len(cls) != 1:
            raise ValidationError("representative mixes degree classes")
        classes.append(cls.pop())
    return GradedKnModule(n, tuple(classes))


def tor(P: RbkModule, against: StandardModule | str, i: int) -> GradedKnModule:
    """Tor_i of P against M_k or N_k via the explicit periodic resolution."""
    against = StandardModule(against)
    if against is StandardModule.R:
        raise ValidationError("Tor is computed against the cyclic quotients M or N")
    if i < 0:
        raise InvalidIndexError(f"homological index must be nonnegative: {i}")
    rank = P.rank
    full = [1 << j for j in range(rank)]
    if i == 0:
        image = _resolution_map(P.operator, rank, against, 1)
        return _quotient_module(P.n, P.degrees, full, image)
    kernel = gf2.kernel_basis(_resolution_map(P.operator, rank, against, i), rank)
    image = _resolution_map(P.operator, rank, against, i + 1)
    return _quotient_module(P.n, P.degrees, kernel, image)


def _factor_kind(hom: AlgebraHom, k: int) -> StandardModule:
    """Which cyclic quotient the hom turns the coefficients into at factor k."""
    return StandardModule.N if hom.assignment(k) is not None else StandardModule.M


def bar_e2(P: TensorModule, hom: AlgebraHom,
           max_degree: int = 4) -> list[GradedKnModule]:
    """Homological-degree decomposition of the bar page E_2 = Tor over
    the tensor ring, computed from the tensored periodic resolutions.

    The total complex in degree m is a direct sum of copies of P over
    multi-indices alpha with |alpha| = m, with the k-th differential
    alternating along the k-th resolution; its homology is returned per
    degree.  With valid inputs everything above degree 0 vanishes.

    Only the universal hom computes twisted homology; other homs are
    accepted as experimental coefficient structures.
    """
    if hom.height != P.n:
        raise ValidationError("hom height does not match the module height")
    if hom.truncation != P.truncation:
        raise ValidationError("hom truncation does not match the module truncation")
    K, r = P.truncation, P.rank
    kinds = [_factor_kind(hom, k) for k in range(K)]

    def multi_indices(total: int):
        def rec(pos: int, remaining: int, acc: tuple):
            if pos == K:
                if remaining == 0:
                    yield acc
                return
            for a in range(remaining + 1):
                yield from rec(pos + 1, remaining - a, acc + (a,))
        yield from rec(0, total, ())

    layers = [sorted(multi_indices(m)) for m in range(max_degree + 2)]
    offsets = [{alpha: idx * r for idx, alpha in enumerate(layer)}
               for layer in layers]

    def boundary(m: int) -> list[int]:
        """Columns of d: T_m -> T_{m-1}."""
        cols = [0] * (len(layers[m]) * r)
        for alpha in layers[m]:
            src = offsets[m][alpha]
            for k in range(K):
                if alpha[k] == 0:
                    continue
                beta = alpha[:k] + (alpha[k] - 1,) + alpha[k + 1:]
                dst = offsets[m - 1][beta]
                op = _resolution_map(P.operators[k], r, kinds[k], alpha[k])
                for j in range(r):
                    shifted = op[j] << dst
                    cols[src + j] ^= shifted
        return cols

    out: list[GradedKnModule] = []
    for m in range(max_degree + 1):
        dim_m = len(layers[m]) * r
        degrees = [P.degrees[i % r] for i in range(dim_m)]
        if m == 0:
            kernel = [1 << i for i in range(dim_m)]
        else:
            kernel = gf2.kernel_basis(boundary(m), dim_m)
        image = gf2.image_basis(boundary(m + 1))
        out.append(_quotient_module(P.n, degrees, kernel, image))
    return out


def khorami_quotient(P: TensorModule) -> GradedKnModule:
    """Quotient of P by (b_0 - v, b_1, b_2, ...): the stacked cokernel.

    This is the closed-form answer for the homology twisted by the
    universal twist, and must agree with the degree-0 bar page entry.
    """
    r = P.rank
    identity = [1 << i for i in range(r)]
    stacked: list[int] = []
    for k in range(P.truncation):
        cols = list(P.operators[k])
        if k == 0:
            cols = [cols[i] ^ identity[i] for i in range(r)]
        stacked.extend(cols)
    full = [1 << i for i in range(r)]
    return _quotient_module(P.n, P.degrees, full, stacked)
