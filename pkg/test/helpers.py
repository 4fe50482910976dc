from typing import Sequence

from pgx.core import UNIT, PartialGroup
from pgx.extensions import Extension


def letter_order(p: PartialGroup, x: int) -> int:
    """Order of a letter, following powers while they are defined."""
    k, acc = 1, x
    while acc != UNIT:
        acc = p.mul(acc, x)
        k += 1
    return k


def has_letter_of_order(p: PartialGroup, n: int) -> bool:
    return any(letter_order(p, x) == n for x in range(1, p.size))


def assert_valid(p: PartialGroup):
    report = p.validate()
    assert report.ok, report.first()


def assert_same_shape(p: PartialGroup, q: PartialGroup):
    assert p.size == q.size
    assert p.level == q.level
    assert p.census() == q.census()


def assert_is_section(extension: Extension, images: Sequence[int]):
    assert tuple(extension.tau(z) for z in images) == tuple(range(extension.base.size))


def write(tmp_path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text)
    return str(path)
