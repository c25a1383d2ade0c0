import random

import pytest

from irrconn.exactalg import get_ring


def random_laurent(ring, rng, terms=3, spread=2, names=None):
    names = names or ("qh", "z") + ring.alpha_names()
    out = ring.zero()
    for _ in range(terms):
        exps = {n: rng.randint(-spread, spread) for n in names}
        out = out + ring.mono(exps, rng.randint(-4, 4))
    return out


def random_fraction(ring, rng, names=None):
    names = names or ("qh", "z") + ring.alpha_names()
    den = ring.one() - ring.mono({rng.choice(names): rng.randint(1, 2)}, rng.choice((1, -1, 2)))
    return random_laurent(ring, rng, names=names) / den


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def ring1():
    return get_ring(1)
