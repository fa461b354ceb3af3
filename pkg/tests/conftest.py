import pytest

from ncbrst.complexes import brst, gauge_quiver, presentation, shafarevich
from ncbrst.dbracket import cotangent_moment, standard_table
from ncbrst.ncalg import Arrow, Quiver, double_quiver


def jordan_quiver():
    return double_quiver(Quiver([1], [Arrow("x", 1, 1)]), {"x": "y"})


def genus_quiver(g):
    base = Quiver([1], [Arrow(f"x{a}", 1, 1) for a in range(1, g + 1)])
    return double_quiver(base, {f"x{a}": f"y{a}" for a in range(1, g + 1)})


def star_quiver():
    return double_quiver(Quiver([1, 2], [Arrow("x", 1, 2)]))


def cotangent(q, label=""):
    return presentation(q, standard_table("cotangent", q), label=label), cotangent_moment(q)


@pytest.fixture(scope="session")
def jordan():
    return cotangent(jordan_quiver(), "jordan")


@pytest.fixture(scope="session")
def genus2():
    return cotangent(genus_quiver(2), "genus-2")


@pytest.fixture(scope="session")
def star():
    return cotangent(star_quiver(), "star")


@pytest.fixture(scope="session")
def jordan_brst(jordan):
    return brst(*jordan)


@pytest.fixture(scope="session")
def jordan_sh(jordan):
    return shafarevich(*jordan)


@pytest.fixture(scope="session")
def gauge():
    g = gauge_quiver([1])
    return presentation(g, standard_table("gauge", g), label="gauge")
