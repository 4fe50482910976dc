import pytest

from pgx.core import UNIT
from pgx.errors import ResourceError, StructuralError, VerificationError
from pgx.extensions import TwistingPair, find_equivalence, semidirect, twisted_product
from pgx.maps import Homomorphism
from pgx.sections import HomotopyChain, check_derivation, check_derivation_equivalence, derivation_to_section, \
    derivations, find_derivation_violation, find_sections, h1_nonabelian, normalize_homotopy_chain, \
    regular_section_obstruction, regular_split_normalize, section_classes, section_to_derivation
from test import helpers


@pytest.fixture
def twisted_cyclic(bz2, bz3, aut_z3):
    """Z3 x Z2 presented with eta(a, a) = b2."""
    return twisted_product(TwistingPair(bz2, bz3, aut_z3, [0, 0], {(1, 1): 2}))


def test_find_sections_s3(s3_extension):
    sections = find_sections(s3_extension)
    assert [s.theta for s in sections] == [(0, 0), (0, 1), (0, 2)]
    assert all(s.regular for s in sections)
    for s in sections:
        helpers.assert_is_section(s3_extension, s.sigma.images)
    assert sections[0].sigma == s3_extension.canonical_section


def test_find_sections_z4(z4_extension):
    assert find_sections(z4_extension) == []
    assert not regular_section_obstruction(z4_extension).solvable
    assert len(section_classes(z4_extension)) == 0


def test_find_sections_cap(s3_extension):
    with pytest.raises(ResourceError):
        find_sections(s3_extension, cap=1)


def test_section_classes_s3(s3_extension):
    classes = section_classes(s3_extension)
    assert len(classes) == 1
    assert len(classes.h1) == 1
    assert classes.to_h1 == {0: 0}


def test_section_classes_direct_product(direct_product):
    classes = section_classes(direct_product)
    assert len(classes.sections) == 2
    assert len(classes) == 2
    assert sorted(classes.to_h1.values()) == [0, 1]


def test_regular_section_obstruction(s3_extension, twisted_cyclic):
    assert regular_section_obstruction(s3_extension).theta == (0, 0)
    result = regular_section_obstruction(twisted_cyclic)
    assert result.solvable
    assert result.theta == (0, 2)


def test_twisted_presentation_splits(bz3, bz2, aut_z3, twisted_cyclic):
    sections = find_sections(twisted_cyclic)
    assert [s.theta for s in sections] == [(0, 2)]
    assert find_equivalence(twisted_cyclic, semidirect(bz3, bz2, aut_z3, [0, 0])) is not None
    split = regular_split_normalize(twisted_cyclic, sections[0])
    assert split.rho == (0, 0)
    assert split.phi.compose(split.semidirect.canonical_section) == sections[0].sigma
    assert len(section_classes(twisted_cyclic)) == 1


def test_regular_split_of_semidirect(s3_extension, inversion):
    sections = find_sections(s3_extension)
    split = regular_split_normalize(s3_extension, sections[1])
    assert split.rho == (0, inversion)
    assert split.phi_inverse.compose(split.phi).images == tuple(range(s3_extension.total.size))


def test_derivations_inversion(bz2, aut_z3, inversion):
    found = derivations(bz2, aut_z3, [0, inversion])
    assert [d.theta for d in found] == [(0, 0), (0, 1), (0, 2)]
    h1 = h1_nonabelian(bz2, aut_z3, [0, inversion])
    assert len(h1) == 1
    assert h1.class_of((0, 2)) == 0
    with pytest.raises(StructuralError):
        h1.class_of((0, 3))


def test_derivations_trivial(bz2, aut_z2):
    found = derivations(bz2, aut_z2, [0, 0])
    assert len(found) == 2
    assert len(h1_nonabelian(bz2, aut_z2, [0, 0])) == 2


def test_derivation_violation(bz3, aut_z2):
    assert find_derivation_violation(bz3, aut_z2, [0, 0, 0], (1, 0, 0)) == ()
    assert find_derivation_violation(bz3, aut_z2, [0, 0, 0], (0, 1, 0)) == (1, 2)
    with pytest.raises(VerificationError):
        check_derivation(bz3, aut_z2, [0, 0, 0], (0, 1, 0))
    assert check_derivation(bz3, aut_z2, [0, 0, 0], (0, 0, 0)).regular


def test_derivation_equivalence(bz2, aut_z3, inversion):
    first = check_derivation(bz2, aut_z3, [0, inversion], (0, 0))
    second = check_derivation(bz2, aut_z3, [0, inversion], (0, 1))
    assert check_derivation_equivalence(first, second, 1)
    assert not check_derivation_equivalence(first, second, UNIT)


def test_sections_and_derivations(s3_extension, bz2, aut_z3, inversion):
    for derivation in derivations(bz2, aut_z3, [0, inversion]):
        section = derivation_to_section(derivation, s3_extension)
        helpers.assert_is_section(s3_extension, section.sigma.images)
        assert section_to_derivation(section) == derivation


def test_sections_need_semidirect_presentation(twisted_cyclic, bz2, aut_z3):
    section = find_sections(twisted_cyclic)[0]
    with pytest.raises(StructuralError):
        section_to_derivation(section)
    with pytest.raises(StructuralError):
        derivation_to_section(check_derivation(bz2, aut_z3, [0, 0], (0, 0)), twisted_cyclic)


def test_normalize_one_step_chain(direct_product):
    sigma = direct_product.canonical_section
    label = direct_product.letter(UNIT, 1)
    chain = normalize_homotopy_chain(direct_product, HomotopyChain((sigma, sigma), (label,)))
    assert chain.labels == (UNIT,)
    assert chain.maps == (sigma, sigma)


def test_normalize_two_step_chain(direct_product):
    sigma = direct_product.canonical_section
    label = direct_product.letter(UNIT, 1)
    chain = normalize_homotopy_chain(direct_product, HomotopyChain((sigma, sigma, sigma), (label, label)))
    assert chain.labels == (UNIT, UNIT)
    for x in chain.labels:
        assert direct_product.tau(x) == UNIT


def test_normalize_rejects_bad_chains(direct_product, bz2):
    sigma = direct_product.canonical_section
    with pytest.raises(VerificationError):
        normalize_homotopy_chain(direct_product, HomotopyChain((sigma, sigma), ()))
    fiber_map = Homomorphism(bz2, direct_product.total, (0, direct_product.letter(1, UNIT)))
    with pytest.raises(VerificationError):
        normalize_homotopy_chain(direct_product, HomotopyChain((fiber_map, fiber_map), (UNIT,)))
