import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Deque, Dict, FrozenSet, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Set, \
    Tuple

from pgx.errors import IncoherentSeedError, MalformedWordError, NotAGroupError, ParseError, StructuralError, \
    UndefinedProductError

logger = logging.getLogger(__name__)

UNIT = 0

Word = Tuple[int, ...]
Products = Dict[Tuple[int, int], int]


class Element(NamedTuple):
    id: int
    name: str


def canonical(w: Iterable[int]) -> Word:
    return tuple(x for x in w if x != UNIT)


@dataclass
class ValidationReport:
    violations: List[Tuple[str, Word]] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def first(self) -> Optional[Tuple[str, Word]]:
        return self.violations[0] if self.violations else None


class GroupTable:
    """A finite group given by its multiplication table, unit at index 0."""

    def __init__(self, names: Sequence[str], table: Sequence[Sequence[int]], name: str = "G"):
        self._names = tuple(names)
        self._table = tuple(tuple(row) for row in table)
        self._name = name
        self._check()
        self._inv = tuple(self._table[a].index(UNIT) for a in range(self.size))

    def _check(self):
        n = self.size
        if n == 0 or self._names[0] != "1":
            raise NotAGroupError(f"group {self._name}: element 0 must be the unit named '1'")
        if len(self._table) != n or any(len(row) != n for row in self._table):
            raise NotAGroupError(f"group {self._name}: table is not {n}x{n}")
        for a in range(n):
            if self._table[UNIT][a] != a or self._table[a][UNIT] != a:
                raise NotAGroupError(f"group {self._name}: 1 is not a unit for {self._names[a]}")
            if sorted(self._table[a]) != list(range(n)) or sorted(row[a] for row in self._table) != list(range(n)):
                raise NotAGroupError(f"group {self._name}: {self._names[a]} has no inverse")
        for a, b, c in cartesian(range(n), repeat=3):
            if self._table[self._table[a][b]][c] != self._table[a][self._table[b][c]]:
                raise NotAGroupError(
                    f"group {self._name}: not associative at ({self._names[a]}, {self._names[b]}, {self._names[c]})")

    @property
    def name(self) -> str:
        return self._name

    @property
    def names(self) -> Tuple[str, ...]:
        return self._names

    @property
    def size(self) -> int:
        return len(self._names)

    def mul(self, a: int, b: int) -> int:
        return self._table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def order(self, a: int) -> int:
        k, x = 1, a
        while x != UNIT:
            x = self.mul(x, a)
            k += 1
        return k

    def is_abelian(self) -> bool:
        return all(self.mul(a, b) == self.mul(b, a) for a in range(self.size) for b in range(self.size))


class PartialGroup:
    """Level-L truncation of a partial group: letters, inversion and the unit-free domain words of length >= 2."""

    def __init__(self, names: Sequence[str], inv: Sequence[int], domain: Iterable[Word], products: Mapping[Tuple[int, int], int],
                 level: int, complete: bool = False, name: str = "M"):
        self._names = tuple(names)
        self._inv = tuple(inv)
        self._level = level
        self._complete = complete
        self._name = name

        if not self._names or self._names[0] != "1":
            raise ParseError(f"{name}: element 0 must be the unit named '1'")
        if len(self._inv) != len(self._names):
            raise ParseError(f"{name}: inversion covers {len(self._inv)} of {len(self._names)} elements")
        if len(set(self._names)) != len(self._names):
            raise ParseError(f"{name}: duplicate element names")
        if level < 1:
            raise ParseError(f"{name}: level must be positive")

        self._by_length: Dict[int, List[Word]] = {}
        words = set()
        for w in domain:
            w = tuple(w)
            self._check_letters(w)
            if len(w) < 2 or UNIT in w:
                raise MalformedWordError(f"{name}: stored word {list(w)} is not unit-free of length >= 2")
            if len(w) > level:
                raise MalformedWordError(f"{name}: stored word of length {len(w)} exceeds level {level}")
            words.add(w)
        self._domain: FrozenSet[Word] = frozenset(words)
        for w in sorted(self._domain):
            self._by_length.setdefault(len(w), []).append(w)
        self._products: Products = dict(products)
        self._ids = {n: i for i, n in enumerate(self._names)}

    @property
    def name(self) -> str:
        return self._name

    @property
    def names(self) -> Tuple[str, ...]:
        return self._names

    @property
    def elements(self) -> List[Element]:
        return [Element(i, n) for i, n in enumerate(self._names)]

    @property
    def size(self) -> int:
        return len(self._names)

    @property
    def level(self) -> int:
        return self._level

    @property
    def complete(self) -> bool:
        return self._complete

    @property
    def domain(self) -> FrozenSet[Word]:
        return self._domain

    @property
    def products(self) -> Products:
        return dict(self._products)

    @property
    def inversion(self) -> Tuple[int, ...]:
        return self._inv

    def inv(self, x: int) -> int:
        return self._inv[x]

    def element_id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise ParseError(f"{self._name}: unknown element {name!r}")

    def word_str(self, w: Iterable[int]) -> str:
        return "[" + "|".join(self._names[x] for x in w) + "]"

    def domain_words(self, n: int) -> List[Word]:
        return list(self._by_length.get(n, []))

    def census(self) -> Dict[int, int]:
        return {n: len(ws) for n, ws in sorted(self._by_length.items())}

    def words(self, max_len: Optional[int] = None) -> Iterator[Word]:
        """Members in (length, lexicographic) order: [], the letters, then stored words up to max_len."""
        top = self._level if max_len is None else min(max_len, self._level)
        if top < 0:
            return
        yield ()
        if top >= 1:
            for x in range(1, self.size):
                yield (x,)
        for n in range(2, top + 1):
            yield from self._by_length.get(n, [])

    def _check_letters(self, w: Iterable[int]):
        for x in w:
            if not isinstance(x, int) or not 0 <= x < len(self._names):
                raise MalformedWordError(f"{self._name}: letter {x!r} out of range", witness=tuple(w))

    def member(self, w: Sequence[int]) -> bool:
        self._check_letters(w)
        c = canonical(w)
        return len(c) <= 1 or c in self._domain

    def mul(self, a: int, b: int) -> int:
        if a == UNIT:
            return b
        if b == UNIT:
            return a
        try:
            return self._products[(a, b)]
        except KeyError:
            raise UndefinedProductError(f"{self._name}: product {self.word_str((a, b))} undefined", witness=(a, b))

    def _fold(self, w: Word) -> Optional[int]:
        acc = UNIT
        for x in w:
            if acc == UNIT:
                acc = x
            else:
                acc = self._products.get((acc, x))
                if acc is None:
                    return None
        return acc

    def pi(self, w: Sequence[int]) -> int:
        if not self.member(w):
            raise UndefinedProductError(f"{self._name}: {self.word_str(w)} is not in the domain", witness=tuple(w))
        result = self._fold(canonical(w))
        if result is None:
            raise UndefinedProductError(f"{self._name}: product of {self.word_str(w)} is incoherent",
                                        witness=tuple(w))
        return result

    def try_pi(self, w: Sequence[int]) -> Optional[int]:
        """Product of w, or None when w is not a member."""
        c = canonical(w)
        if len(c) >= 2 and c not in self._domain:
            return None
        return self._fold(c)

    def face(self, w: Sequence[int], i: int) -> Word:
        n = len(w)
        if n < 1 or not 0 <= i <= n:
            raise IndexError(f"face d_{i} undefined on a word of length {n}")
        if not self.member(w):
            raise UndefinedProductError(f"{self._name}: {self.word_str(w)} is not in the domain", witness=tuple(w))
        w = tuple(w)
        if i == 0:
            return w[1:]
        if i == n:
            return w[:-1]
        return w[:i - 1] + (self.mul(w[i - 1], w[i]),) + w[i + 1:]

    def degeneracy(self, w: Sequence[int], i: int) -> Word:
        self._check_letters(w)
        if not 0 <= i <= len(w):
            raise IndexError(f"degeneracy s_{i} undefined on a word of length {len(w)}")
        w = tuple(w)
        return w[:i] + (UNIT,) + w[i:]

    def invert_word(self, w: Sequence[int]) -> Word:
        if not self.member(w):
            raise UndefinedProductError(f"{self._name}: {self.word_str(w)} is not in the domain", witness=tuple(w))
        return tuple(self._inv[x] for x in reversed(w))

    def truncate(self, level: int) -> "PartialGroup":
        if level > self._level:
            raise ParseError(f"{self._name}: cannot raise level {self._level} to {level}")
        domain = [w for w in self._domain if len(w) <= level]
        products = self._products if level >= 2 else {}
        complete = self._complete and not any(len(w) > level for w in self._domain)
        return PartialGroup(self._names, self._inv, domain, products, level, complete, self._name)

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        self._validate_inversion(report)
        self._validate_products(report)
        self._validate_subwords(report)
        self._validate_contractions(report)
        self._validate_inverse_words(report)
        if report.ok:
            logger.debug("%s: validation passed (%d skipped entries)", self._name, len(report.skipped))
        else:
            logger.info("%s: %d violations, first %s", self._name, len(report.violations), report.violations[0])
        return report

    def _validate_inversion(self, report: ValidationReport):
        if self._inv[UNIT] != UNIT:
            report.violations.append(("INV", ()))
        for x in range(1, self.size):
            y = self._inv[x]
            if not 0 < y < self.size or self._inv[y] != x:
                report.violations.append(("INV", (x,)))
        for w in sorted(self._domain):
            if tuple(self._inv[x] for x in reversed(w)) not in self._domain:
                report.violations.append(("INV", w))

    def _validate_products(self, report: ValidationReport):
        for key, value in sorted(self._products.items()):
            if key not in self._domain or not 0 <= value < self.size:
                report.violations.append(("PROD", key))
        for w in self._by_length.get(2, []):
            if w not in self._products:
                report.violations.append(("PROD", w))

    def _validate_subwords(self, report: ValidationReport):
        for n in range(3, self._level + 1):
            for w in self._by_length.get(n, []):
                if w[1:] not in self._domain or w[:-1] not in self._domain:
                    report.violations.append(("SUBWORD", w))

    def _validate_contractions(self, report: ValidationReport):
        for n in range(3, self._level + 1):
            for w in self._by_length.get(n, []):
                total = self._fold(w)
                for i in range(n - 1):
                    c = self._products.get((w[i], w[i + 1]))
                    contracted = canonical(w[:i] + (c,) + w[i + 2:]) if c is not None else None
                    if (total is None or contracted is None
                            or (len(contracted) >= 2 and contracted not in self._domain)
                            or self._fold(contracted) != total):
                        report.violations.append(("CONTRACTION", w))
                        break

    def _validate_inverse_words(self, report: ValidationReport):
        skipped: Dict[int, int] = {}
        for u in self.words():
            if not u:
                continue
            if 2 * len(u) > self._level:
                skipped[len(u)] = skipped.get(len(u), 0) + 1
                continue
            v = tuple(self._inv[x] for x in reversed(u)) + u
            c = canonical(v)
            if any(not 0 <= x < self.size for x in v):
                continue
            if len(c) >= 2 and c not in self._domain:
                report.violations.append(("INVERSE_WORD", v))
            elif self._fold(c) != UNIT:
                report.violations.append(("INVERSE_PRODUCT", v))
        for n, count in sorted(skipped.items()):
            report.skipped.append(f"inverse words on {count} words of length {n} (needs length {2 * n} > level {self._level})")


@dataclass
class Saturation:
    domain: FrozenSet[Word]
    products: Products
    complete: bool
    overflow: List[Word]


def saturate(seeds: Iterable[Sequence[int]], inv: Sequence[int], products: Mapping[Tuple[int, int], int],
             level: int) -> Saturation:
    """Close seed words under subwords, contractions, inversion and [u^-1|u] up to the level."""
    products = dict(products)
    domain: Set[Word] = set()
    overflow: Set[Word] = set()
    queue: Deque[Word] = deque()
    size = len(inv)

    def push(w: Iterable[int]):
        w = canonical(w)
        if len(w) < 2 or w in domain:
            return
        if len(w) > level:
            overflow.add(w)
            return
        domain.add(w)
        queue.append(w)

    def product_of(a: int, b: int, witness: Word) -> int:
        if (a, b) in products:
            return products[(a, b)]
        if inv[a] == b:
            products[(a, b)] = UNIT
        elif (inv[b], inv[a]) in products:
            products[(a, b)] = inv[products[(inv[b], inv[a])]]
        else:
            raise IncoherentSeedError(f"no product recorded for the pair ({a}, {b})", witness=witness)
        return products[(a, b)]

    for w in seeds:
        w = tuple(w)
        if any(not 0 <= x < size for x in w):
            raise MalformedWordError(f"seed {list(w)} has a letter out of range", witness=w)
        if len(canonical(w)) > level:
            raise MalformedWordError(f"seed of length {len(canonical(w))} exceeds level {level}", witness=w)
        push(w)
    if level >= 2:
        for x in range(1, size):
            if any(x in w for w in domain) or any(x in key for key in products):
                push((inv[x], x))

    while queue:
        w = queue.popleft()
        n = len(w)
        push(w[1:])
        push(w[:-1])
        for i in range(n - 1):
            push(w[:i] + (product_of(w[i], w[i + 1], w),) + w[i + 2:])
        w_inv = tuple(inv[x] for x in reversed(w))
        push(w_inv)
        push(w_inv + w)

    if overflow:
        logger.debug("saturation reached level %d with %d forced words beyond it", level, len(overflow))
    restricted = {key: value for key, value in products.items() if key in domain}
    return Saturation(frozenset(domain), restricted, not overflow, sorted(overflow, key=lambda w: (len(w), w)))


def bar_construction(group: GroupTable, level: int) -> PartialGroup:
    letters = range(1, group.size)
    domain = [w for n in range(2, level + 1) for w in cartesian(letters, repeat=n)]
    products = {(a, b): group.mul(a, b) for a in letters for b in letters} if level >= 2 else {}
    inv = [group.inv(a) for a in range(group.size)]
    logger.debug("bar construction of %s at level %d: %d words", group.name, level, len(domain))
    return PartialGroup(group.names, inv, domain, products, level, complete=False, name=f"B{group.name}")


def sub_partial_group(p: PartialGroup, letters: Iterable[int], name: Optional[str] = None) \
        -> Tuple[PartialGroup, Tuple[int, ...]]:
    """The partial subgroup on a letter subset; returns it with the embedding new id -> old id."""
    embedding = tuple(sorted(set(letters) | {UNIT}))
    index = {old: new for new, old in enumerate(embedding)}
    for x in embedding:
        if p.inv(x) not in index:
            raise StructuralError(f"{p.name}: letter subset is not closed under inversion", witness=(x,))
    domain = []
    for w in sorted(p.domain):
        if all(x in index for x in w):
            value = p.try_pi(w)
            if value not in index:
                raise StructuralError(f"{p.name}: product of {p.word_str(w)} leaves the letter subset", witness=w)
            domain.append(tuple(index[x] for x in w))
    products = {(index[a], index[b]): index[c] for (a, b), c in p.products.items() if a in index and b in index}
    sub = PartialGroup([p.names[x] for x in embedding], [index[p.inv(x)] for x in embedding], domain, products,
                       p.level, p.complete, name or f"{p.name}'")
    return sub, embedding
