import os
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from moravak.f2alg import EXTERIOR, GradedGenerator, PresentedAlgebra, parse_element
from moravak.steenrod import SqAction

SEED = int(os.environ.get("MORAVAK_SEED", "20260810"))

FIXTURES = Path(__file__).parent.parent / "src" / "moravak" / "fixtures"


@pytest.fixture
def rng():
    return random.Random(SEED)


def projective_space(cap: int = 16) -> tuple[PresentedAlgebra, SqAction]:
    """F2[t], |t| = 1, the honest action with Sq^1 t = t^2."""
    alg = PresentedAlgebra([GradedGenerator("t", 1)], (), cap)
    return alg, SqAction(alg, {})


def projective_product(k: int, cap: int = 16) -> tuple[PresentedAlgebra, SqAction]:
    """F2[t1..tk], all in degree 1; a genuine space, so Adem holds."""
    gens = [GradedGenerator(f"t{i}", 1) for i in range(1, k + 1)]
    alg = PresentedAlgebra(gens, (), cap)
    return alg, SqAction(alg, {})


def truncated_projective(power: int = 9, cap: int = 12):
    """F2[t]/(t^power): the action is compatible with the monomial ideal."""
    alg = PresentedAlgebra([GradedGenerator("t", 1)],
                           [parse_element(f"t^{power}")], cap)
    return alg, SqAction(alg, {})


def exterior_pair(cap: int = 12):
    """Lambda(x3, x5): everything interesting is forced to zero."""
    alg = PresentedAlgebra([GradedGenerator("x3", 3, EXTERIOR),
                            GradedGenerator("x5", 5, EXTERIOR)], (), cap)
    return alg, SqAction(alg, {})


def random_element(alg: PresentedAlgebra, degree: int, rnd: random.Random):
    basis = alg.basis_elements(degree)
    out = alg.zero
    for e in basis:
        if rnd.random() < 0.5:
            out = out + e
    return out


def random_homogeneous(alg: PresentedAlgebra, rnd: random.Random,
                       dmin: int = 1, dmax: int | None = None, tries: int = 20):
    """A random nonzero homogeneous element in a random degree."""
    dmax = dmax if dmax is not None else alg.degree_cap // 2
    for _ in range(tries):
        d = rnd.randint(dmin, dmax)
        e = random_element(alg, d, rnd)
        if e:
            return e
    return alg.one
