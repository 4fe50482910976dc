import argparse
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

from pgx.cohomology import brute_force_cohomology, build_complex, classify_extensions, cohomology
from pgx.core import PartialGroup, bar_construction
from pgx.errors import InternalError, PgxError, PgxErrors
from pgx.extensions import Extension, OuterAction, find_equivalence, semidirect, twisted_product
from pgx.formats import format_report, load_action, load_extension, load_outer, load_pair, load_partial_group, \
    parse_group, read_text, serialize_pair, serialize_pg
from pgx.maps import automorphisms, pi_report
from pgx.sections import find_sections, section_classes
from pgx.utils import default_level

logger = logging.getLogger(__name__)


def _names(p: PartialGroup, elements: Sequence[int]) -> List[str]:
    return [p.names[x] for x in elements]


def _census(p: PartialGroup) -> str:
    return " ".join(f"{n}:{count}" for n, count in sorted(p.census().items()))


def _write(path: str, text: str):
    with open(path, "w") as f:
        f.write(text)


def _relative(path: str, output: str) -> str:
    return os.path.relpath(os.path.abspath(path), os.path.dirname(os.path.abspath(output)))


def _validate(args) -> int:
    p = load_partial_group(args.pg_file, args.level, validate=False)
    report = p.validate()
    first = report.first()
    print(format_report([("validate", {
        "name": p.name,
        "level": p.level,
        "complete": p.complete,
        "ok": report.ok,
        "violations": len(report.violations),
        "first": f"{first[0]} {p.word_str(first[1])}" if first else None,
        "skipped": report.skipped or None,
    })]), end="")
    if not report.ok:
        sys.stderr.write(f"witness: {p.word_str(first[1])}\n")
        return PgxErrors.EXIT_VALIDATION
    return PgxErrors.EXIT_OK


def _info(args) -> int:
    p = load_partial_group(args.pg_file, args.level)
    aut = automorphisms(p)
    pi = pi_report(aut)
    print(format_report([("info", {
        "name": p.name,
        "elements": p.size,
        "level": p.level,
        "census": _census(p),
        "N": f"{len(aut.normalizer)} element{'s' if len(aut.normalizer) != 1 else ''} {_names(p, aut.normalizer)}",
        "Z": f"{len(aut.center)} element{'s' if len(aut.center) != 1 else ''} {_names(p, aut.center)}",
        "Aut": f"order {len(aut)}",
        "Out": f"order {pi.out_order}",
        "pi0": pi.pi0,
        "pi1": pi.pi1,
        "pi_higher": pi.higher,
        "exact": pi.exact,
    })]), end="")
    return PgxErrors.EXIT_OK


def _bar(args) -> int:
    group = parse_group(read_text(args.group), args.group)
    p = bar_construction(group, args.level or default_level())
    _write(args.output, serialize_pg(p))
    print(format_report([("bar", {"name": p.name, "level": p.level, "census": _census(p), "output": args.output})]),
          end="")
    return PgxErrors.EXIT_OK


def _extension_report(kind: str, extension: Extension, output: str) -> str:
    total = extension.total
    return format_report([(kind, {
        "name": total.name,
        "elements": total.size,
        "level": total.level,
        "census": _census(total),
        "output": output,
    })])


def _write_extension(extension: Extension, args):
    _write(args.output, serialize_pair(extension.pair, _relative(args.fiber, args.output),
                                       _relative(args.base, args.output), extension.total.name))


def _extend(args) -> int:
    fiber = load_partial_group(args.fiber, args.level)
    base = load_partial_group(args.base, args.level)
    extension = twisted_product(load_pair(args.pair, fiber=fiber, base=base))
    _write_extension(extension, args)
    print(_extension_report("extend", extension, args.output), end="")
    return PgxErrors.EXIT_OK


def _semidirect(args) -> int:
    fiber = load_partial_group(args.fiber, args.level)
    base = load_partial_group(args.base, args.level)
    aut = automorphisms(fiber)
    extension = semidirect(fiber, base, aut, load_action(args.action, base, aut))
    _write_extension(extension, args)
    print(_extension_report("semidirect", extension, args.output), end="")
    return PgxErrors.EXIT_OK


def _outer_action(args) -> OuterAction:
    fiber = load_partial_group(args.fiber, args.level)
    base = load_partial_group(args.base, args.level)
    return load_outer(args.outer, base, automorphisms(fiber))


def _classify(args) -> int:
    action = _outer_action(args)
    result = classify_extensions(action)
    obs = result.obstruction
    base, fiber = action.base, action.aut.partial_group
    sections = [("obstruction", {
        "fiber": fiber.name,
        "base": base.name,
        "kappa nontrivial": len(obs.kappa),
        "H3": obs.h3.invariant_factors,
        "class zero": obs.class_is_zero,
    }), ("classify", {
        "classes": len(result),
        "H2": result.h2.invariant_factors if result.h2 is not None else None,
    })]
    for i, c in enumerate(result.classes):
        sections.append((f"class {i}", {
            "coordinates": list(c.coordinates),
            "t": [f"{base.names[g]}->{' '.join(_names(fiber, action.aut[a].images))}"
                  for g, a in enumerate(c.pair.t) if a != 0] or None,
            "eta": [f"{base.word_str(w)}->{fiber.names[x]}" for w, x in sorted(c.pair.eta.items())] or None,
            "census": _census(c.extension.total),
        }))
    print(format_report(sections), end="")
    return PgxErrors.EXIT_OK


def _cohomology(args) -> int:
    action = _outer_action(args)
    complex = build_complex(action, args.deg)
    result = cohomology(complex, args.deg)
    base = action.base
    representatives = []
    for rep in result.representatives:
        values = complex.values(args.deg, rep)
        representatives.append(" ".join(f"{base.word_str(w)}={action.aut.partial_group.names[z]}"
                                        for w, z in values.items() if z != 0))
    entries = {
        "degree": args.deg,
        "invariant factors": result.invariant_factors,
        "order": result.order,
        "representatives": representatives or None,
    }
    if args.oracle:
        order = brute_force_cohomology(complex, args.deg)
        if order != result.order:
            raise InternalError(f"oracle order {order} differs from {result.order}")
        entries["oracle"] = order
    print(format_report([("cohomology", entries)]), end="")
    return PgxErrors.EXIT_OK


def _sections(args) -> int:
    extension = load_extension(args.ext_file, level=args.level)
    fiber, base = extension.fiber, extension.base
    found = find_sections(extension)
    report = [("sections", {
        "extension": extension.total.name,
        "count": len(found),
        "regular": sum(1 for s in found if s.regular),
    })]
    for i, s in enumerate(found):
        report.append((f"section {i}", {
            "theta": [f"{base.names[g]}->{fiber.names[x]}" for g, x in enumerate(s.theta) if g != 0],
            "regular": s.regular,
        }))
    if args.classes:
        classes = section_classes(extension, found)
        report.append(("classes", {
            "count": len(classes),
            "members": [list(members) for members in classes.classes],
            "H1": len(classes.h1) if classes.h1 is not None else None,
        }))
    print(format_report(report), end="")
    return PgxErrors.EXIT_OK


def _equiv(args) -> int:
    first = load_extension(args.ext_file_1, level=args.level)
    second = load_extension(args.ext_file_2, fiber=first.fiber, base=first.base, aut=first.pair.aut,
                            level=args.level)
    theta = find_equivalence(first, second)
    fiber, base = first.fiber, first.base
    witness = "none" if theta is None else \
        " ".join(f"{base.names[g]}->{fiber.names[x]}" for g, x in enumerate(theta) if x != 0) or "trivial"
    print(format_report([("equiv", {"theta": witness})]), end="")
    return PgxErrors.EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "validate": _validate,
    "info": _info,
    "bar": _bar,
    "extend": _extend,
    "semidirect": _semidirect,
    "classify": _classify,
    "cohomology": _cohomology,
    "sections": _sections,
    "equiv": _equiv,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgx", description="Partial groups, their extensions and cohomology")
    parser.add_argument("-v", "--verbose", action="store_true", help="log searches and checks to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help)
        sub.add_argument("--level", type=int, default=None, help="truncation level (default $PGX_LEVEL or 6)")
        return sub

    sub = command("validate", "check the partial group axioms")
    sub.add_argument("pg_file")
    sub = command("info", "normalizer, center, automorphisms and the pi-report")
    sub.add_argument("pg_file")
    sub = command("bar", "bar construction of a group table")
    sub.add_argument("--group", required=True)
    sub.add_argument("-o", "--output", required=True)
    for name, extra, help in (("extend", "--pair", "twisted product of a pair"),
                              ("semidirect", "--action", "semidirect product of an action")):
        sub = command(name, help)
        sub.add_argument("--fiber", required=True)
        sub.add_argument("--base", required=True)
        sub.add_argument(extra, required=True)
        sub.add_argument("-o", "--output", required=True)
    sub = command("classify", "extensions realizing an outer action")
    sub.add_argument("--fiber", required=True)
    sub.add_argument("--base", required=True)
    sub.add_argument("--outer", required=True)
    sub = command("cohomology", "H^n of the base with coefficients in the center of the fiber")
    sub.add_argument("--base", required=True)
    sub.add_argument("--coeff-from", dest="fiber", required=True)
    sub.add_argument("--outer", required=True)
    sub.add_argument("--deg", type=int, required=True)
    sub.add_argument("--oracle", action="store_true", help="cross-check by enumerating all cochains")
    sub = command("sections", "sections of an extension")
    sub.add_argument("ext_file")
    sub.add_argument("--classes", action="store_true", help="group sections up to homotopy and compare with H1")
    sub = command("equiv", "equivalence of two extensions")
    sub.add_argument("ext_file_1")
    sub.add_argument("ext_file_2")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PgxError as e:
        sys.stderr.write(f"error: {e}\n")
        if e.witness is not None:
            sys.stderr.write(f"witness: {e.witness}\n")
        return e.error_code
    except Exception:
        logger.exception("internal error")
        return PgxErrors.EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
