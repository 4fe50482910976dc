"""Line-oriented text formats for partial groups, group tables, pairs, actions and reports.

One declaration per line, tokens separated by blanks, `#` starts a comment.
"""
import logging
import os
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from pgx.core import UNIT, GroupTable, PartialGroup, bar_construction, saturate
from pgx.errors import ParseError, StructuralError, ValidationError
from pgx.extensions import Extension, OuterAction, TwistingPair, check_action, twisted_product
from pgx.maps import AutData, automorphisms
from pgx.utils import default_level, dict_without_none

logger = logging.getLogger(__name__)

Line = Tuple[int, List[str]]


def _lines(text: str) -> Iterator[Line]:
    for number, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def read_text(path: str) -> str:
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")


def _header(lines: List[Line], kinds: Sequence[str], source: str) -> Tuple[str, str]:
    if not lines or lines[0][1][0] not in kinds:
        raise ParseError(f"{source}: expected a '{' or '.join(kinds)}' header")
    number, tokens = lines[0]
    if len(tokens) != 2:
        raise ParseError(f"{source}:{number}: header needs exactly one name")
    return tokens[0], tokens[1]


def _ids(p: PartialGroup, names: Iterable[str], source: str, number: int) -> List[int]:
    try:
        return [p.element_id(name) for name in names]
    except ParseError as e:
        raise ParseError(f"{source}:{number}: {e}")


def file_kind(text: str) -> Optional[str]:
    lines = list(_lines(text))
    return lines[0][1][0] if lines else None


def parse_pg(text: str, level: Optional[int] = None, source: str = "<pg>") -> PartialGroup:
    """A partial group file, saturated from its word lines; `level` truncates a stored level."""
    lines = list(_lines(text))
    _, name = _header(lines, ["pg"], source)
    file_level, complete, names = None, True, None
    inv: Dict[str, Tuple[str, int]] = {}
    seeds: List[Tuple[int, List[str]]] = []
    products: List[Tuple[int, List[str], str]] = []
    for number, tokens in lines[1:]:
        keyword = tokens[0]
        if keyword == "level":
            try:
                file_level = int(tokens[1])
            except (IndexError, ValueError):
                raise ParseError(f"{source}:{number}: level needs an integer")
        elif keyword == "complete":
            if tokens[1:] not in (["yes"], ["no"]):
                raise ParseError(f"{source}:{number}: complete is 'yes' or 'no'")
            complete = tokens[1] == "yes"
        elif keyword == "elements":
            names = tokens[1:]
        elif keyword == "inv":
            if len(tokens) != 3:
                raise ParseError(f"{source}:{number}: inv needs two elements")
            inv[tokens[1]] = (tokens[2], number)
            inv.setdefault(tokens[2], (tokens[1], number))
        elif "=" in tokens:
            if len(tokens) != 4 or tokens[2] != "=":
                raise ParseError(f"{source}:{number}: products are written 'a b = c'")
            products.append((number, tokens[:2], tokens[3]))
        else:
            seeds.append((number, tokens))
    if names is None:
        raise ParseError(f"{source}: missing 'elements' line")
    stored = file_level if file_level is not None else level or default_level()
    if level is None:
        level = stored
    elif level > stored:
        raise ParseError(f"{source}: level {level} exceeds the stored level {stored}")

    ids = {n: i for i, n in enumerate(names)}

    def lookup(tokens: Iterable[str], number: int) -> List[int]:
        try:
            return [ids[t] for t in tokens]
        except KeyError as e:
            raise ParseError(f"{source}:{number}: unknown element {e.args[0]}")

    inversion = [UNIT] * len(names)
    for x, (y, number) in inv.items():
        a, b = lookup([x, y], number)
        inversion[a] = b
    table = {}
    for number, (a, b), c in products:
        x, y = lookup([a, b], number)
        table[(x, y)] = lookup([c], number)[0]
    words = [lookup(tokens, number) for number, tokens in seeds]
    words += [list(key) for key in table]
    too_long = [w for w in words if len(w) > stored]
    if too_long:
        raise ParseError(f"{source}: a word of length {len(too_long[0])} exceeds level {stored}")
    closure = saturate(words, inversion, table, stored)
    p = PartialGroup(names, inversion, closure.domain, closure.products, stored, complete and closure.complete, name)
    logger.debug("%s: loaded %d words at level %d", name, len(p.domain), stored)
    return p.truncate(level) if level < stored else p


def serialize_pg(p: PartialGroup) -> str:
    lines = [f"pg {p.name}", f"level {p.level}", f"complete {'yes' if p.complete else 'no'}",
             "elements " + " ".join(p.names)]
    lines += [f"inv {p.names[x]} {p.names[p.inv(x)]}" for x in range(1, p.size)]
    products = p.products
    for w in p.words():
        if len(w) == 2:
            lines.append(f"{p.names[w[0]]} {p.names[w[1]]} = {p.names[products[w]]}")
        elif len(w) > 2:
            lines.append(" ".join(p.names[x] for x in w))
    return "\n".join(lines) + "\n"


def parse_group(text: str, source: str = "<group>") -> GroupTable:
    lines = list(_lines(text))
    _, name = _header(lines, ["group"], source)
    names = None
    entries: Dict[Tuple[str, str], str] = {}
    for number, tokens in lines[1:]:
        if tokens[0] == "elements":
            names = tokens[1:]
        elif len(tokens) == 4 and tokens[2] == "=":
            entries[(tokens[0], tokens[1])] = tokens[3]
        else:
            raise ParseError(f"{source}:{number}: expected 'x y = z'")
    if names is None:
        raise ParseError(f"{source}: missing 'elements' line")
    ids = {n: i for i, n in enumerate(names)}
    table = [[0] * len(names) for _ in names]
    for a in range(len(names)):
        table[a][UNIT], table[UNIT][a] = a, a
    for a in range(1, len(names)):
        for b in range(1, len(names)):
            try:
                table[a][b] = ids[entries[(names[a], names[b])]]
            except KeyError:
                raise ParseError(f"{source}: product {names[a]} {names[b]} missing or unknown")
    return GroupTable(names, table, name)


def serialize_group(group: GroupTable) -> str:
    lines = [f"group {group.name}", "elements " + " ".join(group.names)]
    for a in range(1, group.size):
        for b in range(1, group.size):
            lines.append(f"{group.names[a]} {group.names[b]} = {group.names[group.mul(a, b)]}")
    return "\n".join(lines) + "\n"


def load_partial_group(path: str, level: Optional[int] = None, validate: bool = True) -> PartialGroup:
    """A PG file, or the bar construction of a group table file."""
    text = read_text(path)
    kind = file_kind(text)
    if kind == "group":
        p = bar_construction(parse_group(text, path), level or default_level())
    elif kind == "pg":
        p = parse_pg(text, level, path)
    else:
        raise ParseError(f"{path}: not a partial group or group table file")
    if validate:
        report = p.validate()
        if not report.ok:
            raise ValidationError(f"{path}: {p.name} fails {report.first()[0]}", witness=report.first()[1],
                                  report=report)
    return p


def _resolve(directory: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.join(directory, path)


def _references(lines: List[Line], directory: str, fiber: Optional[PartialGroup], base: Optional[PartialGroup],
                level: Optional[int], source: str) -> Tuple[PartialGroup, PartialGroup]:
    for number, tokens in lines[1:]:
        if tokens[0] in ("fiber", "base"):
            if len(tokens) != 2:
                raise ParseError(f"{source}:{number}: {tokens[0]} needs one path")
            if tokens[0] == "fiber" and fiber is None:
                fiber = load_partial_group(_resolve(directory, tokens[1]), level)
            elif tokens[0] == "base" and base is None:
                base = load_partial_group(_resolve(directory, tokens[1]), level)
    if fiber is None or base is None:
        raise ParseError(f"{source}: fiber and base must be given")
    return fiber, base


def _automorphism_lines(lines: List[Line], keyword: str, base: PartialGroup, aut: AutData, source: str) -> List[int]:
    """Aut index per base letter from `keyword g -> images` lines; missing letters get the identity."""
    fiber = aut.partial_group
    result = [0] * base.size
    for number, tokens in lines[1:]:
        if tokens[0] != keyword:
            continue
        if len(tokens) != 3 + fiber.size or tokens[2] != "->":
            raise ParseError(f"{source}:{number}: expected '{keyword} g -> {fiber.size} images'")
        g = _ids(base, tokens[1:2], source, number)[0]
        try:
            result[g] = aut.index_of(_ids(fiber, tokens[3:], source, number))
        except StructuralError as e:
            raise ParseError(f"{source}:{number}: {e}")
    return result


def _automorphism_line(keyword: str, base: PartialGroup, aut: AutData, g: int, a: int) -> str:
    fiber = aut.partial_group
    images = " ".join(fiber.names[aut.apply(a, x)] for x in range(fiber.size))
    return f"{keyword} {base.names[g]} -> {images}"


def parse_pair(text: str, directory: str = ".", fiber: Optional[PartialGroup] = None,
               base: Optional[PartialGroup] = None, aut: Optional[AutData] = None, level: Optional[int] = None,
               source: str = "<pair>") -> TwistingPair:
    """A `pair` or `extension` file; fiber and base passed in take precedence over the file's paths."""
    lines = list(_lines(text))
    _header(lines, ["pair", "extension"], source)
    fiber, base = _references(lines, directory, fiber if aut is None else aut.partial_group, base, level, source)
    aut = aut or automorphisms(fiber)
    t = _automorphism_lines(lines, "t", base, aut, source)
    eta = {}
    for number, tokens in lines[1:]:
        if tokens[0] == "eta":
            if len(tokens) != 5 or tokens[3] != "->":
                raise ParseError(f"{source}:{number}: expected 'eta g h -> x'")
            g, h = _ids(base, tokens[1:3], source, number)
            eta[(g, h)] = _ids(fiber, tokens[4:], source, number)[0]
        elif tokens[0] not in ("t", "fiber", "base"):
            raise ParseError(f"{source}:{number}: unknown keyword {tokens[0]}")
    return TwistingPair(base, fiber, aut, t, eta)


def load_pair(path: str, **kwargs) -> TwistingPair:
    return parse_pair(read_text(path), os.path.dirname(path), source=path, **kwargs)


def load_extension(path: str, **kwargs) -> Extension:
    return twisted_product(load_pair(path, **kwargs))


def serialize_pair(pair: TwistingPair, fiber_path: str, base_path: str, name: str = "E",
                   kind: str = "extension") -> str:
    base, fiber = pair.base, pair.fiber
    lines = [f"{kind} {name}", f"fiber {fiber_path}", f"base {base_path}"]
    lines += [_automorphism_line("t", base, pair.aut, g, a) for g, a in enumerate(pair.t) if a != 0]
    lines += [f"eta {base.names[g]} {base.names[h]} -> {fiber.names[x]}" for (g, h), x in sorted(pair.eta.items())]
    return "\n".join(lines) + "\n"


def parse_action(text: str, base: PartialGroup, aut: AutData, source: str = "<action>") -> Tuple[int, ...]:
    """rho per base letter, checked to be an action."""
    lines = list(_lines(text))
    _header(lines, ["action"], source)
    return check_action(base, aut, _automorphism_lines(lines, "rho", base, aut, source))


def parse_outer(text: str, base: PartialGroup, aut: AutData, source: str = "<outer>") -> OuterAction:
    """An outer action from one representative automorphism per base letter."""
    lines = list(_lines(text))
    _header(lines, ["outer"], source)
    return OuterAction.from_automorphisms(base, aut, _automorphism_lines(lines, "alpha", base, aut, source))


def load_action(path: str, base: PartialGroup, aut: AutData) -> Tuple[int, ...]:
    return parse_action(read_text(path), base, aut, path)


def load_outer(path: str, base: PartialGroup, aut: AutData) -> OuterAction:
    return parse_outer(read_text(path), base, aut, path)


def serialize_outer(action: OuterAction, name: str = "alpha") -> str:
    lines = [f"outer {name}"]
    lines += [_automorphism_line("alpha", action.base, action.aut, g, action.lift(g))
              for g in range(action.base.size) if action.lift(g) != 0]
    return "\n".join(lines) + "\n"


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value)


def format_report(sections: Sequence[Tuple[str, Mapping[str, Any]]]) -> str:
    """`[name]` blocks of `key: value` lines in the given order; None values are dropped."""
    blocks = []
    for name, entries in sections:
        lines = [f"[{name}]"]
        lines += [f"{key}: {format_value(value)}" for key, value in dict_without_none(dict(entries)).items()]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def parse_report(text: str) -> List[Tuple[str, Dict[str, str]]]:
    sections: List[Tuple[str, Dict[str, str]]] = []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            sections.append((line[1:-1], {}))
        elif ": " in line and sections:
            key, value = line.split(": ", 1)
            sections[-1][1][key] = value
        else:
            raise ParseError(f"<report>:{number}: expected a section header or 'key: value'")
    return sections
