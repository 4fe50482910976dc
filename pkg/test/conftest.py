import os

from pytest import fixture

from pgx.core import bar_construction
from pgx.extensions import OuterAction, TwistingPair, semidirect, twisted_product
from pgx.groups import amalgam, cyclic, klein, symmetric3
from pgx.maps import automorphisms

CORPUS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")


@fixture
def corpus():
    return CORPUS


@fixture
def bz2():
    return bar_construction(cyclic(2), 4)


@fixture
def bz3():
    return bar_construction(cyclic(3, "b"), 4)


@fixture
def bz4():
    return bar_construction(cyclic(4), 4)


@fixture
def bv4():
    return bar_construction(klein(), 4)


@fixture
def bs3():
    return bar_construction(symmetric3(), 4)


@fixture
def amalgam6():
    return amalgam(6)


@fixture
def aut_z2(bz2):
    return automorphisms(bz2)


@fixture
def aut_z3(bz3):
    return automorphisms(bz3)


@fixture
def inversion(bz3, aut_z3):
    return aut_z3.index_of([0, 2, 1])


@fixture
def direct_product(bz2, aut_z2):
    return semidirect(bz2, bz2, aut_z2, [0, 0])


@fixture
def z4_pair(bz2, aut_z2):
    return TwistingPair(bz2, bz2, aut_z2, [0, 0], {(1, 1): 1})


@fixture
def z4_extension(z4_pair):
    return twisted_product(z4_pair)


@fixture
def s3_extension(bz3, bz2, aut_z3, inversion):
    return semidirect(bz3, bz2, aut_z3, [0, inversion])


@fixture
def trivial_z2_action(bz2, aut_z2):
    return OuterAction.trivial(bz2, aut_z2)


@fixture
def inversion_action(bz2, aut_z3, inversion):
    return OuterAction.from_automorphisms(bz2, aut_z3, [0, inversion])
