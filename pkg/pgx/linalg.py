"""Exact integer matrix reductions on numpy object arrays."""
from collections import defaultdict
from itertools import zip_longest
from math import prod
from typing import Iterable, List, Optional, Tuple

import numpy as np
from sympy import factorint


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def diagonal_matrix(entries: Iterable[int]) -> np.ndarray:
    entries = [int(v) for v in entries]
    m = zeros(len(entries), len(entries))
    for i, v in enumerate(entries):
        m[i, i] = v
    return m


def exgcd(a: int, b: int) -> np.ndarray:
    """A 2x2 integer matrix M of determinant 1 with M @ [a, b] = [gcd(a, b), 0].

    If a divides b, M[0, 1] is 0.
    """
    a_sign = -1 if a < 0 else 1
    b_sign = -1 if b < 0 else 1
    a, b = a * a_sign, b * b_sign
    if a == 0 and b == 0:
        return np.eye(2, dtype=object)

    m = np.array([[b, 0, 1],
                  [a, 1, 0]], dtype=object)
    while m[1, 0] != 0:
        q = m[0, 0] // m[1, 0]
        m[0] -= q * m[1]
        m = m[::-1]
    g = m[0, 0]
    m = m[:, 1:] * np.array([a_sign, b_sign], dtype=object)
    m[1] = [-b_sign * b // g, a_sign * a // g]
    return m


def _inverse_2x2(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=object)


def normal_form(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(S, D, T, S^-1, T^-1) with A = S @ D @ T, D diagonal of A's shape, S and T unimodular.

    No divisibility between diagonal entries is promised.
    """
    d = np.array(a, dtype=object).copy()
    rows, cols = d.shape
    s, t = np.eye(rows, dtype=object), np.eye(cols, dtype=object)
    s_inv, t_inv = s.copy(), t.copy()

    def clear_row(i: int) -> bool:
        if (d[i, i + 1:] == 0).all():
            return False
        for j in range(i + 1, cols):
            if d[i, j] == 0:
                continue
            m = exgcd(d[i, i], d[i, j]).T
            d[:, [i, j]] = d[:, [i, j]] @ m
            t[[i, j]] = _inverse_2x2(m) @ t[[i, j]]
            t_inv[:, [i, j]] = t_inv[:, [i, j]] @ m
        return True

    def clear_col(i: int) -> bool:
        if (d[i + 1:, i] == 0).all():
            return False
        for j in range(i + 1, rows):
            if d[j, i] == 0:
                continue
            m = exgcd(d[i, i], d[j, i])
            d[[i, j]] = m @ d[[i, j]]
            s[:, [i, j]] = s[:, [i, j]] @ _inverse_2x2(m)
            s_inv[[i, j]] = m @ s_inv[[i, j]]
        return True

    for i in range(min(rows, cols)):
        clear_col(i)
        while clear_row(i) and clear_col(i):
            pass
    return s, d, t, s_inv, t_inv


def diagonal(d: np.ndarray, length: int) -> List[int]:
    """Diagonal of D padded with zeros to the given length."""
    values = [int(d[i, i]) for i in range(min(d.shape))]
    return values + [0] * max(0, length - len(values))


def kernel(a: np.ndarray) -> np.ndarray:
    """Columns spanning the integer null space of A."""
    _, d, _, _, t_inv = normal_form(a)
    free = [i for i, v in enumerate(diagonal(d, a.shape[1])) if v == 0]
    return t_inv[:, free]


def solve(a: np.ndarray, b: Iterable[int]) -> Optional[np.ndarray]:
    """An integer x with A @ x = b, or None."""
    _, d, _, s_inv, t_inv = normal_form(a)
    c = s_inv @ np.array([int(v) for v in b], dtype=object)
    rows, cols = a.shape
    y = np.zeros(cols, dtype=object)
    entries = diagonal(d, rows)
    for i in range(rows):
        if entries[i] == 0:
            if c[i] != 0:
                return None
        elif c[i] % entries[i] != 0:
            return None
        else:
            y[i] = c[i] // entries[i]
    return t_inv @ y


def invariant_factors(orders: Iterable[int]) -> List[int]:
    """Invariant factors d1 | d2 | ... of the direct sum of cyclic groups of the given orders (0 is free)."""
    exponents = defaultdict(list)
    free = 0
    for n in orders:
        n = abs(int(n))
        if n == 0:
            free += 1
        elif n > 1:
            for p, e in factorint(n).items():
                exponents[int(p)].append(int(e))
    components = [[p ** e for e in sorted(es, reverse=True)] for p, es in sorted(exponents.items())]
    torsion = [prod(column) for column in zip_longest(*components, fillvalue=1)]
    return sorted(torsion) + [0] * free
