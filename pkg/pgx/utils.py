import math
import os
from typing import Dict, Hashable, Iterable, List, Optional

from pgx.errors import ParseError, ResourceError

DEFAULT_LEVEL = 6
LEVEL_ENV = "PGX_LEVEL"

AUTOMORPHISM_CAP = math.factorial(10)
SEARCH_CAP = 2 ** 20
ORACLE_LIMIT = 2 ** 16


def default_level() -> int:
    value = os.environ.get(LEVEL_ENV)
    if value is None or value == "":
        return DEFAULT_LEVEL
    try:
        level = int(value)
    except ValueError:
        raise ParseError(f"{LEVEL_ENV} must be an integer, got {value!r}")
    if level < 1:
        raise ParseError(f"{LEVEL_ENV} must be positive, got {level}")
    return level


def check_cap(what: str, size: int, cap: int):
    if size > cap:
        raise ResourceError(f"{what}: search space of {size} candidates exceeds cap {cap}")


def dict_without_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


class UnionFind:
    """Disjoint sets over hashable items, with deterministic class output."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self._parent: Dict[Hashable, Hashable] = {}
        self._rank: Dict[Hashable, int] = {}
        self._order: List[Hashable] = []
        for item in items:
            self.add(item)

    def add(self, item: Hashable):
        if item not in self._parent:
            self._parent[item] = item
            self._rank[item] = 0
            self._order.append(item)

    def find(self, item: Hashable) -> Hashable:
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: Hashable, b: Hashable) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1
        return True

    def classes(self) -> List[List[Hashable]]:
        """Classes in order of their first-added member; members keep insertion order."""
        groups: Dict[Hashable, List[Hashable]] = {}
        for item in self._order:
            groups.setdefault(self.find(item), []).append(item)
        return list(groups.values())

    def class_of(self, item: Hashable) -> Optional[List[Hashable]]:
        if item not in self._parent:
            return None
        root = self.find(item)
        return [x for x in self._order if self.find(x) == root]
