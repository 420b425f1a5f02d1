"""GF(2) linear algebra on int bitsets.

Vectors are Python ints (bit i = coordinate i).  A linear map is stored
by columns: ``cols[j]`` is the image of source basis vector ``e_j``.
Row reduction always pivots on the *highest* set bit, so reduced
representatives are supported on the lowest possible coordinates; with
coordinates sorted in increasing monomial order this yields the
lexicographically least representatives everywhere downstream.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def reduce_rows(rows: Iterable[int]) -> list[int]:
    """Row-reduce, pivoting on highest set bits; returns nonzero rows."""
    basis: list[int] = []  # each with a distinct highest bit
    for row in rows:
        row = _reduce_by(row, basis)
        if row:
            # keep basis fully reduced against the new pivot
            pivot = row.bit_length() - 1
            basis = [b ^ row if (b >> pivot) & 1 else b for b in basis]
            basis.append(row)
    basis.sort(key=int.bit_length, reverse=True)
    return basis


def _reduce_by(vec: int, reduced: Sequence[int]) -> int:
    for b in reduced:
        if vec and (vec >> (b.bit_length() - 1)) & 1:
            vec ^= b
    return vec


def reduce_vector(vec: int, reduced: Sequence[int]) -> int:
    """Reduce vec against already-reduced rows (highest-pivot convention)."""
    return _reduce_by(vec, reduced)


def rank(rows: Iterable[int]) -> int:
    return len(reduce_rows(rows))


def in_span(vec: int, reduced: Sequence[int]) -> bool:
    return _reduce_by(vec, reduced) == 0


def pivots(reduced: Sequence[int]) -> set[int]:
    return {b.bit_length() - 1 for b in reduced}


def apply_columns(cols: Sequence[int], vec: int) -> int:
    """Apply the map with the given columns to a source vector."""
    out = 0
    while vec:
        low = vec & -vec
        out ^= cols[low.bit_length() - 1]
        vec ^= low
    return out


def compose_columns(outer: Sequence[int], inner: Sequence[int]) -> list[int]:
    """Columns of outer∘inner."""
    return [apply_columns(outer, col) for col in inner]


def kernel_basis(cols: Sequence[int], source_dim: int) -> list[int]:
    """Basis of the kernel of the map with the given columns.

    Standard tag trick: eliminate on the image part of (image, tag) pairs;
    rows whose image part vanishes have kernel vectors as tags.
    """
    pairs = [(cols[j], 1 << j) for j in range(source_dim)]
    done: list[tuple[int, int]] = []
    kernel: list[int] = []
    for vec, tag in pairs:
        for bvec, btag in done:
            if vec and (vec >> (bvec.bit_length() - 1)) & 1:
                vec ^= bvec
                tag ^= btag
        if vec:
            done.append((vec, tag))
            done.sort(key=lambda p: p[0].bit_length(), reverse=True)
        else:
            kernel.append(tag)
    return reduce_rows(kernel)


def image_basis(cols: Sequence[int]) -> list[int]:
    return reduce_rows(cols)


def quotient_representatives(kernel: Sequence[int], image: Sequence[int]) -> list[int]:
    """Reduced basis of ker/im, as vectors in the ambient coordinates."""
    image_red = reduce_rows(image)
    residues = [_reduce_by(v, image_red) for v in kernel]
    return reduce_rows(residues)


def solve(cols: Sequence[int], source_dim: int, target: int) -> int | None:
    """One solution x with map(x) = target, or None."""
    done: list[tuple[int, int]] = []
    for j in range(source_dim):
        vec, tag = cols[j], 1 << j
        for bvec, btag in done:
            if vec and (vec >> (bvec.bit_length() - 1)) & 1:
                vec ^= bvec
                tag ^= btag
        if vec:
            done.append((vec, tag))
            done.sort(key=lambda p: p[0].bit_length(), reverse=True)
    x = 0
    for bvec, btag in done:
        if target and (target >> (bvec.bit_length() - 1)) & 1:
            target ^= bvec
            x ^= btag
    return x if target == 0 else None


def invert_columns(cols: Sequence[int], dim: int) -> list[int] | None:
    """Columns of the inverse map, or None if not invertible."""
    out = []
    for i in range(dim):
        x = solve(cols, dim, 1 << i)
        if x is None:
            return None
        out.append(x)
    return out


def bits(vec: int) -> list[int]:
    """Positions of set bits, ascending."""
    out = []
    pos = 0
    while vec:
        if vec & 1:
            out.append(pos)
        vec >>= 1
        pos += 1
    return out
