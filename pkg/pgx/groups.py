from typing import Callable, Hashable, List, Sequence

from pgx.core import GroupTable, PartialGroup, saturate


def _from_function(name: str, names: Sequence[str], elements: Sequence[Hashable],
                   mul: Callable[[Hashable, Hashable], Hashable]) -> GroupTable:
    index = {e: i for i, e in enumerate(elements)}
    table = [[index[mul(a, b)] for b in elements] for a in elements]
    return GroupTable(names, table, name)


def trivial() -> GroupTable:
    return GroupTable(["1"], [[0]], "1")


def cyclic(n: int, generator: str = "a") -> GroupTable:
    names = ["1", generator] + [f"{generator}{k}" for k in range(2, n)]
    return _from_function(f"Z{n}", names[:n], range(n), lambda a, b: (a + b) % n)


def klein() -> GroupTable:
    elements = [(0, 0), (1, 0), (0, 1), (1, 1)]
    return _from_function("V4", ["1", "a", "b", "c"], elements,
                          lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2))


def symmetric3() -> GroupTable:
    # (p*q)(i) = p(q(i)), points 1..3 written 0..2
    elements = [(0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1)]
    names = ["1", "(12)", "(13)", "(23)", "(123)", "(132)"]
    return _from_function("S3", names, elements, lambda p, q: tuple(p[q[i]] for i in range(3)))


def dihedral8() -> GroupTable:
    elements = [(i, 0) for i in range(4)] + [(i, 1) for i in range(4)]
    names = ["1", "r", "r2", "r3", "s", "rs", "r2s", "r3s"]
    return _from_function("D8", names, elements,
                          lambda x, y: ((x[0] + (y[0] if x[1] == 0 else -y[0])) % 4, (x[1] + y[1]) % 2))


def small_groups() -> List[GroupTable]:
    return [cyclic(2), cyclic(3, "b"), cyclic(4), klein(), symmetric3(), dihedral8()]


def amalgam(level: int) -> PartialGroup:
    """Two copies of Z/2 sharing the unit: the only products are powers of a single letter."""
    a, b = 1, 2
    seeds = [(a,) * level, (b,) * level]
    closure = saturate(seeds, (0, a, b), {(a, a): 0, (b, b): 0}, level)
    return PartialGroup(["1", "a", "b"], (0, a, b), closure.domain, closure.products, level, closure.complete,
                        "amalgam")
