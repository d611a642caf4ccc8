"""Slow, independent reference computations used as test oracles.

Nothing here calls the fast transform; everything is direct summation over
Python integers so that agreement is meaningful.
"""

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb


def popcount(x: int) -> int:
    return bin(x).count("1")


def w(J: int, m: int) -> int:
    return -1 if popcount(J & m) & 1 else 1


def direct_transform(values):
    n = len(values)
    return [sum(values[m] * w(J, m) for m in range(n)) for J in range(n)]


def signs_of(p: int, table: int):
    """Function number ``table`` (bit m set iff f(x_m) = -1) as a list of +-1."""
    return [-1 if (table >> m) & 1 else 1 for m in range(1 << p)]


def low_data(p: int, d: int, signs):
    n = 1 << p
    return tuple(sum(signs[m] * w(J, m) for m in range(n)) for J in range(n) if popcount(J) <= d)


def direct_residuals(p: int, d: int, signs):
    n = 1 << p
    s = direct_transform(signs)
    t = [sum(s[J] * w(J, m) for J in range(n) if popcount(J) <= d) for m in range(n)]
    return t, [n * signs[m] - t[m] for m in range(n)]


@lru_cache(maxsize=None)
def data_groups(p: int, d: int) -> dict:
    """Every Boolean function on p variables grouped by its degree-<=d data."""
    groups = defaultdict(list)
    for table in range(1 << (1 << p)):
        groups[low_data(p, d, signs_of(p, table))].append(table)
    return dict(groups)


def unique_count(p: int, d: int) -> int:
    """|U_d|: functions whose degree-<=d data no other Boolean function shares."""
    return sum(1 for g in data_groups(p, d).values() if len(g) == 1)


def boolean_collision_exists(p: int, d: int, table: int) -> bool:
    return len(data_groups(p, d)[low_data(p, d, signs_of(p, table))]) > 1


def binomial_lower_tail(p: int, k: int) -> Fraction:
    """Exact P(X <= k) for X ~ Bin(p, 1/2)."""
    if k < 0:
        return Fraction(0)
    return Fraction(sum(comb(p, j) for j in range(min(k, p) + 1)), 1 << p)


def rademacher_exact_tail(weights, eta) -> Fraction:
    """Exact P(|sum a_i eps_i| > eta) by enumerating every sign vector."""
    m = len(weights)
    hits = sum(1 for eps in product((-1, 1), repeat=m) if abs(sum(a * e for a, e in zip(weights, eps))) > eta)
    return Fraction(hits, 1 << m)
