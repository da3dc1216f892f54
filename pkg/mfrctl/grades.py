"""
Grades — Points of Z² and Their Orders

A grade is a pair of integers. Three orders live on grades: the product
(partial) order, and the two total orders lex (x first) and colex
(y first). The product order is the intersection of lex and colex.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Tuple

from mfrctl.types import VALID_ORDERS, Comparison, MfrError, Order


class Grade(NamedTuple):
    """A point (x, y) of Z². Tuple comparison coincides with lex order."""

    x: int
    y: int

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


ZERO = Grade(0, 0)
EPSILON = Grade(1, 1)


def as_grade(value) -> Grade:
    """Coerce a 2-sequence of integers into a Grade."""
    if isinstance(value, Grade):
        return value
    x, y = value
    return Grade(int(x), int(y))


def leq(a: Grade, b: Grade) -> bool:
    """Product order: a ≤ b iff both coordinates are ≤."""
    return a[0] <= b[0] and a[1] <= b[1]


def lt(a: Grade, b: Grade) -> bool:
    """Strict product order."""
    return leq(a, b) and a != b


def join(a: Grade, b: Grade) -> Grade:
    return Grade(max(a[0], b[0]), max(a[1], b[1]))


def meet(a: Grade, b: Grade) -> Grade:
    return Grade(min(a[0], b[0]), min(a[1], b[1]))


def join_all(grades: Iterable[Grade]) -> Grade:
    """Componentwise maximum of a non-empty collection."""
    it = iter(grades)
    try:
        acc = next(it)
    except StopIteration:
        raise MfrError("join of an empty set of grades") from None
    for g in it:
        acc = join(acc, g)
    return Grade(acc[0], acc[1])


def meet_all(grades: Iterable[Grade]) -> Grade:
    """Componentwise minimum of a non-empty collection."""
    it = iter(grades)
    try:
        acc = next(it)
    except StopIteration:
        raise MfrError("meet of an empty set of grades") from None
    for g in it:
        acc = meet(acc, g)
    return Grade(acc[0], acc[1])


def add(a: Grade, b: Grade) -> Grade:
    return Grade(a[0] + b[0], a[1] + b[1])


def negated(a: Grade) -> Grade:
    return Grade(-a[0], -a[1])


def lex_key(g: Grade) -> Tuple[int, int]:
    return (g[0], g[1])


def colex_key(g: Grade) -> Tuple[int, int]:
    return (g[1], g[0])


def grade_compare(a: Grade, b: Grade, order: Order = "product") -> Comparison:
    """Compare two grades in the product, lex or colex order.

    Only the product order can answer "incomparable".
    """
    if order not in VALID_ORDERS:
        raise MfrError(f"Invalid order: {order!r}")
    if a == b:
        return "equal"
    if order == "lex":
        return "less" if lex_key(a) < lex_key(b) else "greater"
    if order == "colex":
        return "less" if colex_key(a) < colex_key(b) else "greater"
    if leq(a, b):
        return "less"
    if leq(b, a):
        return "greater"
    return "incomparable"
