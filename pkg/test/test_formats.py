import os

import pytest

from pgx.core import UNIT
from pgx.errors import ParseError, ValidationError
from pgx.formats import file_kind, format_report, format_value, load_action, load_extension, load_outer, load_pair, \
    load_partial_group, parse_group, parse_outer, parse_pair, parse_pg, parse_report, read_text, serialize_group, \
    serialize_outer, serialize_pair, serialize_pg
from pgx.groups import amalgam, cyclic
from test import helpers

BROKEN_PG = """\
pg broken
level 3
elements 1 a
inv a a
a a = a
"""


def test_parse_amalgam(corpus):
    p = parse_pg(read_text(os.path.join(corpus, "amalgam.pg")))
    expected = amalgam(6)
    assert p.name == "amalgam"
    assert p.level == 6
    assert not p.complete
    assert p.domain == expected.domain
    assert p.products == expected.products


def test_parse_pg_truncates(corpus):
    p = parse_pg(read_text(os.path.join(corpus, "amalgam.pg")), level=4)
    assert p.level == 4
    assert max(len(w) for w in p.domain) == 4
    with pytest.raises(ParseError):
        parse_pg(read_text(os.path.join(corpus, "amalgam.pg")), level=7)


def test_serialize_pg_reloads(bz3):
    p = parse_pg(serialize_pg(bz3))
    assert p.names == bz3.names
    assert p.domain == bz3.domain
    assert p.products == bz3.products


@pytest.mark.parametrize("text", [
    "elements 1 a\n",
    "pg x\nlevel 2\ninv a a\n",
    "pg x\nlevel 2\nelements 1 a\na b = 1\n",
    "pg x\nlevel 2\nelements 1 a\na a 1\n= =\n",
    "pg x\nlevel two\nelements 1 a\n",
    "pg x\ncomplete maybe\nelements 1 a\n",
])
def test_parse_pg_errors(text):
    with pytest.raises(ParseError):
        parse_pg(text)


def test_parse_group(corpus):
    group = parse_group(read_text(os.path.join(corpus, "Z4.group")))
    assert group.name == "Z4"
    assert group.order(1) == 4
    assert serialize_group(group) == serialize_group(cyclic(4))
    with pytest.raises(ParseError):
        parse_group("group g\nelements 1 a b\na a = 1\n")


def test_load_group_as_bar(corpus):
    p = load_partial_group(os.path.join(corpus, "S3.group"), level=3)
    assert p.name == "BS3"
    assert p.level == 3
    assert p.census() == {2: 25, 3: 125}


def test_load_group_default_level(corpus, mocker):
    mocker.patch.dict(os.environ, {"PGX_LEVEL": "3"})
    assert load_partial_group(os.path.join(corpus, "Z2.group")).level == 3


def test_load_invalid_pg(tmp_path):
    path = helpers.write(tmp_path, "broken.pg", BROKEN_PG)
    with pytest.raises(ValidationError) as e:
        load_partial_group(path)
    assert e.value.witness == (1, 1)
    assert e.value.report.first() == ("INVERSE_PRODUCT", (1, 1))
    assert not load_partial_group(path, validate=False).validate().ok


def test_load_unknown_file(tmp_path):
    with pytest.raises(ParseError):
        load_partial_group(str(tmp_path / "missing.pg"))
    with pytest.raises(ParseError):
        load_partial_group(helpers.write(tmp_path, "x.txt", "outer x\n"))


def test_file_kind():
    assert file_kind("# comment\n\npg x\n") == "pg"
    assert file_kind("") is None


def test_load_pair(corpus):
    pair = load_pair(os.path.join(corpus, "z4_cocycle.pair"), level=4)
    assert pair.eta == {(1, 1): 1}
    assert pair.t == (0, 0)
    assert helpers.has_letter_of_order(load_extension(os.path.join(corpus, "z4_cocycle.pair"), level=4).total, 4)


def test_load_direct_extension(corpus):
    extension = load_extension(os.path.join(corpus, "direct_z2.pair"), level=4)
    assert extension.pair.eta == {}
    assert not helpers.has_letter_of_order(extension.total, 4)


def test_serialize_pair(s3_extension, bz3, bz2, aut_z3):
    text = serialize_pair(s3_extension.pair, "Z3.group", "Z2.group", "S3")
    assert text.splitlines() == ["extension S3", "fiber Z3.group", "base Z2.group", "t a -> 1 b2 b"]
    pair = parse_pair(text, fiber=bz3, base=bz2, aut=aut_z3)
    assert pair.t == s3_extension.pair.t
    assert pair.eta == {}


def test_parse_pair_errors(bz2, aut_z2):
    header = "pair p\nfiber Z2.group\nbase Z2.group\n"
    with pytest.raises(ParseError):
        parse_pair(header + "eta a -> a\n", base=bz2, aut=aut_z2)
    with pytest.raises(ParseError):
        parse_pair(header + "twist a -> 1 a\n", base=bz2, aut=aut_z2)
    with pytest.raises(ParseError):
        parse_pair(header + "t a -> a 1\n", base=bz2, aut=aut_z2)
    with pytest.raises(ParseError):
        parse_pair("pair p\n", base=bz2)


def test_load_action(corpus, bz2, aut_z3, inversion):
    assert load_action(os.path.join(corpus, "inversion.action"), bz2, aut_z3) == (0, inversion)


def test_load_outer(corpus, bz2, aut_z3, inversion_action):
    assert load_outer(os.path.join(corpus, "inversion.outer"), bz2, aut_z3) == inversion_action
    assert load_outer(os.path.join(corpus, "trivial.outer"), bz2, aut_z3).classes == (0, 0)
    with pytest.raises(ParseError):
        parse_outer("outer x\nalpha a -> 1 b b\n", bz2, aut_z3)


def test_serialize_outer(inversion_action, trivial_z2_action):
    assert serialize_outer(inversion_action) == "outer alpha\nalpha a -> 1 b2 b\n"
    assert serialize_outer(trivial_z2_action, "trivial") == "outer trivial\n"


def test_format_value():
    assert format_value(True) == "yes"
    assert format_value(False) == "no"
    assert format_value(["a", 2]) == "[a, 2]"
    assert format_value(()) == "[]"
    assert format_value(UNIT) == "0"


def test_format_report():
    text = format_report([("one", {"x": 1, "skip": None}), ("two", {"ok": True})])
    assert text == "[one]\nx: 1\n\n[two]\nok: yes\n"
    assert parse_report(text) == [("one", {"x": "1"}), ("two", {"ok": "yes"})]
    with pytest.raises(ParseError):
        parse_report("x: 1\n")


def test_parse_pg_inversion_line_number():
    with pytest.raises(ParseError, match=r"<pg>:4: unknown element c"):
        parse_pg("pg x\nlevel 2\nelements 1 a\ninv a c\n")
