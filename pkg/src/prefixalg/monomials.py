"""The *-semigroup of prefix-rewriting partial isometries.

V(dom, ran) is the operator that sends a basis vector indexed by a sequence
beginning with dom to the basis vector of the same sequence with that initial
segment replaced by ran, and kills everything outside the dom cylinder. Its
adjoint rewrites in the other direction, and P(a) = V(a, a) is the projection
onto the cylinder of a.

Any finite product of such operators is again of this shape or zero, even
when the factors involve tuples of different lengths. `multiply` computes the
closed form; `act` is the pointwise semantics it must agree with, and the two
are checked against each other throughout the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Union

from .cylinders import (
    Compat,
    SequenceDesc,
    Tup,
    compatibility,
    format_tuple,
    member,
)


class _Zero:
    """The zero operator, kept first-class so products stay total."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "0"


ZERO = _Zero()


@dataclass(frozen=True, slots=True)
class V:
    """Partial isometry with domain cylinder dom and range cylinder ran."""

    dom: Tup
    ran: Tup

    def __post_init__(self) -> None:
        if len(self.dom) != len(self.ran):
            raise ValueError(
                f"domain and range tuples must have equal length: "
                f"{format_tuple(self.dom)} vs {format_tuple(self.ran)}"
            )

    def __repr__(self) -> str:
        return format_monomial(self)


Monomial = Union[V, _Zero]


def projection(t: Tup) -> V:
    """P(t) = V(t, t), the projection onto the cylinder of t."""
    return V(t, t)


def is_projection(m: Monomial) -> bool:
    return isinstance(m, V) and m.dom == m.ran


def multiply(m1: Monomial, m2: Monomial) -> Monomial:
    """Operator composition m1 * m2, with m2 applied first.

    With m1 = V(a,b) and m2 = V(c,d) there are three cases, driven by how d
    (what m2 produces) meets a (what m1 consumes):
      d = a+s : the output of m2 already lies inside the domain of m1, and
                the composite rewrites c to b+s;
      a = d+u : m1 consumes more than m2 produced, which restricts the
                domain to c+u and rewrites it to b;
      disjoint: nothing survives.
    """
    if m1 is ZERO or m2 is ZERO:
        return ZERO
    a, b = m1.dom, m1.ran
    c, d = m2.dom, m2.ran
    rel = compatibility(d, a)
    if rel is Compat.A_EXTENDS_B:
        s = d[len(a):]
        return V(c, b + s)
    if rel is Compat.B_PROPERLY_EXTENDS_A:
        u = a[len(d):]
        return V(c + u, b)
    return ZERO


def adjoint(m: Monomial) -> Monomial:
    """V(a,b)* = V(b,a); the zero operator is self-adjoint."""
    if m is ZERO:
        return ZERO
    return V(m.ran, m.dom)


def normal_form(word: Iterable[Monomial]) -> Monomial:
    """Collapse a non-empty product of monomials, leftmost factor outermost.

    The rightmost factor acts first; the result is ZERO or a single V(a,b)
    with equal-length tuples.
    """
    factors = list(word)
    if not factors:
        raise ValueError("normal_form requires a non-empty word")
    return reduce(multiply, factors)


def act(m: Monomial, x: SequenceDesc) -> Optional[SequenceDesc]:
    """Apply m to the basis vector of x; None means it is annihilated.

    When x lies in the domain cylinder, the described prefix is extended
    with tail labels as needed before the initial segment is rewritten, so
    the action is that on the genuine infinite sequence.
    """
    if m is ZERO:
        return None
    a, b = m.dom, m.ran
    if not member(x, a):
        return None
    k = max(len(x.prefix), len(a))
    full = x.prefix + (x.tail,) * (k - len(x.prefix))
    return SequenceDesc(b + full[len(a):], x.tail)


def act_word(word: Iterable[Monomial], x: SequenceDesc) -> Optional[SequenceDesc]:
    """Apply the factors of a word one at a time, rightmost first.

    This is the independent pointwise oracle for `normal_form`: a None at
    any stage corresponds to a vanishing product or an out-of-domain point.
    """
    y: Optional[SequenceDesc] = x
    for m in reversed(list(word)):
        if y is None:
            return None
        y = act(m, y)
    return y


def monomial_labels(m: Monomial) -> set[int]:
    if m is ZERO:
        return set()
    return set(m.dom) | set(m.ran)


def format_monomial(m: Monomial) -> str:
    if m is ZERO:
        return "0"
    if m.dom == m.ran:
        return f"P({format_tuple(m.dom)})"
    return f"V({format_tuple(m.dom)};{format_tuple(m.ran)})"
