import os

import pytest

from pgx.cli import COMMANDS, build_parser, main
from pgx.errors import PgxErrors, ResourceError
from pgx.formats import load_extension, parse_pg, parse_report, read_text
from test import helpers


@pytest.fixture(autouse=True)
def level_four(mocker):
    mocker.patch.dict(os.environ, {"PGX_LEVEL": "4"})


def _report(capsys) -> dict:
    return dict(parse_report(capsys.readouterr().out))


def _path(corpus, name):
    return os.path.join(corpus, name)


@pytest.mark.parametrize("argv", [
    ["validate", "a.pg"],
    ["info", "a.pg"],
    ["bar", "--group", "g", "-o", "out"],
    ["extend", "--fiber", "f", "--base", "b", "--pair", "p", "-o", "out"],
    ["semidirect", "--fiber", "f", "--base", "b", "--action", "a", "-o", "out"],
    ["classify", "--fiber", "f", "--base", "b", "--outer", "o"],
    ["cohomology", "--base", "b", "--coeff-from", "f", "--outer", "o", "--deg", "2"],
    ["sections", "e.ext", "--classes"],
    ["equiv", "e1.ext", "e2.ext", "--level", "3"],
])
def test_parser_knows_every_command(argv):
    args = build_parser().parse_args(argv)
    assert args.command in COMMANDS
    assert args.level == (3 if "--level" in argv else None)


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_validate_amalgam(corpus, capsys):
    assert main(["validate", _path(corpus, "amalgam.pg")]) == PgxErrors.EXIT_OK
    report = _report(capsys)["validate"]
    assert report["ok"] == "yes"
    assert report["level"] == "6"
    assert report["complete"] == "no"


def test_validate_group_table(corpus, capsys):
    assert main(["validate", _path(corpus, "Z2.group"), "--level", "4"]) == PgxErrors.EXIT_OK
    report = _report(capsys)["validate"]
    assert report["name"] == "BZ2"
    assert report["level"] == "4"
    assert report["ok"] == "yes"


def test_validate_failure(tmp_path, capsys):
    path = helpers.write(tmp_path, "broken.pg", "pg broken\nlevel 3\nelements 1 a\ninv a a\na a = a\n")
    assert main(["validate", path]) == PgxErrors.EXIT_VALIDATION
    captured = capsys.readouterr()
    assert "ok: no" in captured.out
    assert "first: INVERSE_PRODUCT [a|a]" in captured.out
    assert "witness: [a|a]" in captured.err


def test_info_amalgam(corpus, capsys):
    assert main(["info", _path(corpus, "amalgam.pg")]) == PgxErrors.EXIT_OK
    report = _report(capsys)["info"]
    assert report["N"] == "1 element ['1']"
    assert report["Out"] == "order 2"
    assert report["pi1"] == "1"


def test_info_group_table(corpus, capsys):
    assert main(["info", _path(corpus, "S3.group"), "--level", "3"]) == PgxErrors.EXIT_OK
    report = _report(capsys)["info"]
    assert report["level"] == "3"
    assert report["Aut"] == "order 6"
    assert report["Out"] == "order 1"
    assert report["Z"] == "1 element ['1']"


def test_bar(corpus, tmp_path, capsys):
    output = str(tmp_path / "bz3.pg")
    assert main(["bar", "--group", _path(corpus, "Z3.group"), "--level", "3", "-o", output]) == PgxErrors.EXIT_OK
    assert _report(capsys)["bar"]["census"] == "2:4 3:8"
    p = parse_pg(read_text(output))
    assert p.level == 3
    helpers.assert_valid(p)


def test_extend_then_sections(corpus, tmp_path, capsys):
    output = str(tmp_path / "z4.ext")
    assert main(["extend", "--fiber", _path(corpus, "Z2.group"), "--base", _path(corpus, "Z2.group"),
                 "--pair", _path(corpus, "z4_cocycle.pair"), "-o", output]) == PgxErrors.EXIT_OK
    assert _report(capsys)["extend"]["elements"] == "4"
    assert helpers.has_letter_of_order(load_extension(output).total, 4)

    assert main(["sections", output]) == PgxErrors.EXIT_OK
    assert _report(capsys)["sections"]["count"] == "0"

    assert main(["equiv", output, output]) == PgxErrors.EXIT_OK
    assert _report(capsys)["equiv"]["theta"] == "trivial"


def test_semidirect_then_section_classes(corpus, tmp_path, capsys):
    output = str(tmp_path / "s3.ext")
    assert main(["semidirect", "--fiber", _path(corpus, "Z3.group"), "--base", _path(corpus, "Z2.group"),
                 "--action", _path(corpus, "inversion.action"), "-o", output]) == PgxErrors.EXIT_OK
    capsys.readouterr()
    assert main(["sections", output, "--classes"]) == PgxErrors.EXIT_OK
    report = _report(capsys)
    assert report["sections"]["count"] == "3"
    assert report["sections"]["regular"] == "3"
    assert report["section 1"]["theta"] == "[a->b]"
    assert report["classes"]["count"] == "1"
    assert report["classes"]["H1"] == "1"


def test_equiv_none(corpus, tmp_path, capsys):
    z4 = str(tmp_path / "z4.ext")
    direct = str(tmp_path / "direct.ext")
    fiber, base = _path(corpus, "Z2.group"), _path(corpus, "Z2.group")
    main(["extend", "--fiber", fiber, "--base", base, "--pair", _path(corpus, "z4_cocycle.pair"), "-o", z4])
    main(["extend", "--fiber", fiber, "--base", base, "--pair", _path(corpus, "direct_z2.pair"), "-o", direct])
    capsys.readouterr()
    assert main(["equiv", direct, z4]) == PgxErrors.EXIT_OK
    assert _report(capsys)["equiv"]["theta"] == "none"


def test_classify(corpus, capsys):
    assert main(["classify", "--fiber", _path(corpus, "Z2.group"), "--base", _path(corpus, "Z2.group"),
                 "--outer", _path(corpus, "trivial.outer")]) == PgxErrors.EXIT_OK
    report = _report(capsys)
    assert report["obstruction"]["class zero"] == "yes"
    assert report["classify"]["classes"] == "2"
    assert report["classify"]["H2"] == "[2]"
    assert "class 1" in report


def test_classify_inversion(corpus, capsys):
    assert main(["classify", "--fiber", _path(corpus, "Z3.group"), "--base", _path(corpus, "Z2.group"),
                 "--outer", _path(corpus, "inversion.outer")]) == PgxErrors.EXIT_OK
    report = _report(capsys)
    assert report["classify"]["classes"] == "1"
    assert report["class 0"]["t"] == "[a->1 b2 b]"


def test_cohomology_with_oracle(corpus, capsys):
    assert main(["cohomology", "--base", _path(corpus, "Z2.group"), "--coeff-from", _path(corpus, "Z2.group"),
                 "--outer", _path(corpus, "trivial.outer"), "--deg", "2", "--oracle"]) == PgxErrors.EXIT_OK
    report = _report(capsys)["cohomology"]
    assert report["invariant factors"] == "[2]"
    assert report["order"] == "2"
    assert report["oracle"] == "2"


def test_parse_error_exit(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "missing.pg")]) == PgxErrors.EXIT_PARSE
    assert "error: cannot read" in capsys.readouterr().err


def test_structural_error_exit(corpus, tmp_path, capsys):
    action = helpers.write(tmp_path, "bad.action", "action bad\nrho b -> 1 b2 b\n")
    assert main(["semidirect", "--fiber", _path(corpus, "Z3.group"), "--base", _path(corpus, "Z3.group"),
                 "--action", action, "-o", str(tmp_path / "out.ext")]) == PgxErrors.EXIT_STRUCTURAL
    assert "witness:" in capsys.readouterr().err


def test_resource_error_exit(corpus, tmp_path, capsys, mocker):
    output = str(tmp_path / "z4.ext")
    main(["extend", "--fiber", _path(corpus, "Z2.group"), "--base", _path(corpus, "Z2.group"),
          "--pair", _path(corpus, "z4_cocycle.pair"), "-o", output])
    mocker.patch("pgx.cli.find_sections", side_effect=ResourceError("sections: too many candidates"))
    assert main(["sections", output]) == PgxErrors.EXIT_RESOURCE


def test_internal_error_exit(corpus, mocker):
    mocker.patch("pgx.cli.classify_extensions", side_effect=RuntimeError("boom"))
    assert main(["classify", "--fiber", _path(corpus, "Z2.group"), "--base", _path(corpus, "Z2.group"),
                 "--outer", _path(corpus, "trivial.outer")]) == PgxErrors.EXIT_INTERNAL
