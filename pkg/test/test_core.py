import pytest

from pgx.core import UNIT, GroupTable, PartialGroup, bar_construction, canonical, saturate, sub_partial_group
from pgx.errors import IncoherentSeedError, MalformedWordError, NotAGroupError, ParseError, StructuralError, \
    UndefinedProductError
from pgx.groups import cyclic, dihedral8, klein, small_groups, symmetric3, trivial
from pgx.maps import center, normalizer
from test import helpers


def test_canonical_strips_units():
    assert canonical((1, 0, 2, 0)) == (1, 2)
    assert canonical(()) == ()


def test_member_bar(bz2):
    assert bz2.member((1, 1))
    assert bz2.member((1, UNIT, 1))
    assert bz2.member(())


def test_member_amalgam(amalgam6):
    a, b = amalgam6.element_id("a"), amalgam6.element_id("b")
    assert amalgam6.member((a,) * 6)
    assert not amalgam6.member((a, b))


def test_member_bad_letter(bz2):
    with pytest.raises(MalformedWordError):
        bz2.member((1, 5))


def test_pi(bz2, bs3):
    assert bz2.pi((1, 1)) == UNIT
    assert bz2.pi(()) == UNIT
    s3 = symmetric3()
    x, y = bs3.element_id("(12)"), bs3.element_id("(23)")
    assert bs3.pi((x, y)) == s3.mul(x, y) == bs3.element_id("(123)")


def test_pi_undefined(amalgam6):
    with pytest.raises(UndefinedProductError):
        amalgam6.pi((1, 2))
    assert amalgam6.try_pi((1, 2)) is None


def test_mul(bz4, amalgam6):
    assert bz4.mul(1, 2) == 3
    assert bz4.mul(UNIT, 3) == 3
    with pytest.raises(UndefinedProductError):
        amalgam6.mul(1, 2)


def test_face(bz4, amalgam6):
    assert bz4.face((1, 1), 1) == (2,)
    assert bz4.face((1,), 0) == ()
    assert bz4.face((1, 2, 3), 3) == (1, 2)
    assert canonical(amalgam6.face((1, 1, 1), 1)) == (1,)
    with pytest.raises(IndexError):
        bz4.face((1, 1), 3)


def test_face_outside_domain(amalgam6):
    with pytest.raises(UndefinedProductError):
        amalgam6.face((1, 2), 1)


def test_degeneracy(bz2, bv4):
    assert bz2.degeneracy((1,), 0) == (UNIT, 1)
    assert bv4.degeneracy((1, 2), 1) == (1, UNIT, 2)
    for w in [(1,), (1, 2), (3, 1, 2)]:
        for i in range(len(w) + 1):
            assert bv4.face(bv4.degeneracy(w, i), i) == w


def test_invert_word(bz4):
    assert bz4.invert_word((1, 2)) == (2, 3)
    assert bz4.invert_word(()) == ()
    for w in bz4.words(3):
        assert bz4.invert_word(bz4.invert_word(w)) == w


def test_validate_bar(bz2):
    report = bz2.validate()
    assert report.ok
    assert report.skipped


@pytest.mark.parametrize("group", small_groups(), ids=lambda g: g.name)
def test_validate_small_bars(group):
    p = bar_construction(group, 5)
    helpers.assert_valid(p)
    n = normalizer(p)
    assert n.elements == tuple(range(group.size))
    central = tuple(a for a in range(group.size) if all(group.mul(a, b) == group.mul(b, a) for b in range(group.size)))
    assert center(p, n) == central
    assert (len(central) == group.size) == group.is_abelian()


def test_center_of_bar_d8():
    assert len(center(bar_construction(dihedral8(), 5))) == 2


def test_validate_amalgam(amalgam6):
    helpers.assert_valid(amalgam6)


def test_validate_broken_inverse():
    p = PartialGroup(["1", "a"], [0, 1], [(1, 1), (1, 1, 1)], {(1, 1): 1}, 3)
    report = p.validate()
    assert not report.ok
    assert report.first() == ("INVERSE_PRODUCT", (1, 1))


def test_validate_missing_product():
    p = PartialGroup(["1", "a"], [0, 1], [(1, 1)], {}, 2)
    assert ("PROD", (1, 1)) in p.validate().violations


def test_validate_missing_subword():
    p = PartialGroup(["1", "a", "b"], [0, 1, 2], [(1, 1), (2, 2), (1, 2, 1)], {(1, 1): 0, (2, 2): 0}, 3)
    assert any(kind == "SUBWORD" for kind, _ in p.validate().violations)


def test_constructor_rejects_bad_input():
    with pytest.raises(ParseError):
        PartialGroup(["a", "1"], [0, 1], [], {}, 2)
    with pytest.raises(MalformedWordError):
        PartialGroup(["1", "a"], [0, 1], [(1, 0)], {}, 2)
    with pytest.raises(MalformedWordError):
        PartialGroup(["1", "a"], [0, 1], [(1, 1, 1)], {}, 2)


def test_bar_construction_domain():
    p = bar_construction(cyclic(2), 3)
    assert p.domain == {(1, 1), (1, 1, 1)}
    assert p.name == "BZ2"
    assert bar_construction(trivial(), 5).domain == frozenset()
    assert len(bar_construction(symmetric3(), 2).domain_words(2)) == 25


def test_words_order(bz2):
    assert list(bz2.words(3)) == [(), (1,), (1, 1), (1, 1, 1)]
    assert bz2.census() == {2: 1, 3: 1, 4: 1}


def test_truncate(bz4):
    p = bz4.truncate(2)
    assert p.level == 2
    assert p.census() == {2: 9}
    with pytest.raises(ParseError):
        bz4.truncate(5)


def test_saturate_subwords():
    closure = saturate([(1, 1, 1)], (0, 1), {(1, 1): 0}, 3)
    assert (1, 1) in closure.domain


def test_saturate_empty():
    closure = saturate([], (0, 1), {}, 4)
    assert closure.domain == frozenset()
    assert closure.complete


def test_saturate_forces_inverse_words():
    v4 = klein()
    products = {(x, y): v4.mul(x, y) for x in range(1, 4) for y in range(1, 4)}
    a, b = 1, 2
    closure = saturate([(a, b)], v4_inverses(v4), products, 4)
    assert (b, a, a, b) in closure.domain
    closure = saturate([(a, b)], v4_inverses(v4), products, 3)
    assert (b, a, a, b) in closure.overflow
    assert not closure.complete


def v4_inverses(group: GroupTable):
    return tuple(group.inv(x) for x in range(group.size))


def test_saturate_derives_inverse_products():
    closure = saturate([(1, 2)], (0, 2, 1), {(1, 2): 0}, 2)
    assert closure.products[(2, 1)] == UNIT


def test_saturate_incoherent():
    with pytest.raises(IncoherentSeedError):
        saturate([(1, 1, 2)], (0, 1, 2), {(1, 1): 0}, 3)


def test_sub_partial_group(bz4):
    sub, embedding = sub_partial_group(bz4, [2])
    assert embedding == (0, 2)
    assert sub.names == ("1", "a2")
    helpers.assert_valid(sub)
    with pytest.raises(StructuralError):
        sub_partial_group(bz4, [1])


def test_group_table_checks():
    with pytest.raises(NotAGroupError):
        GroupTable(["1", "a"], [[0, 1], [1, 1]])
    with pytest.raises(NotAGroupError):
        GroupTable(["e", "a"], [[0, 1], [1, 0]])


def test_group_catalog():
    assert [g.size for g in small_groups()] == [2, 3, 4, 4, 6, 8]
    assert not symmetric3().is_abelian()
    assert not dihedral8().is_abelian()
    assert cyclic(4).order(1) == 4
    assert klein().order(3) == 2


def test_amalgam_domain(amalgam6):
    assert amalgam6.names == ("1", "a", "b")
    for w in amalgam6.domain:
        assert len(set(w)) == 1
    assert not amalgam6.complete
