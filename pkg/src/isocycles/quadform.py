"""Imaginary quadratic class groups via primitive binary quadratic forms.

Class groups are represented implicitly: reduced forms plus Gauss
composition.  Everything the cycle-counting pipeline needs is the class
number h, the genus number g, and the order of the class above a split
prime.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint

from .ff import kronecker_symbol

MAX_ABS_DISC = 10**8

SPLIT = "split"
RAMIFIED = "ramified"
INERT = "inert"


class Discriminant:
    """Negative discriminant with cached fundamental part and conductor."""

    __slots__ = ("value", "fundamental", "conductor")

    def __init__(self, value: int):
        if value >= 0:
            raise ValueError(f"discriminant must be negative, got {value}")
        if value % 4 not in (0, 1):
            raise ValueError(f"discriminant must be 0 or 1 mod 4, got {value}")
        self.value = value
        squarefree = 1
        for q, e in factorint(-value).items():
            if e % 2 == 1:
                squarefree *= q
        d0 = -squarefree
        fundamental = d0 if d0 % 4 == 1 else 4 * d0
        conductor = isqrt(value // fundamental)
        if conductor * conductor * fundamental != value:
            raise AssertionError("conductor factorization failed")
        self.fundamental = fundamental
        self.conductor = conductor

    def __eq__(self, other):
        return isinstance(other, Discriminant) and self.value == other.value

    def __hash__(self):
        return hash(("Discriminant", self.value))

    def __repr__(self):
        return f"Discriminant({self.value})"


def _as_disc(D) -> Discriminant:
    return D if isinstance(D, Discriminant) else Discriminant(D)


class BinaryQuadraticForm:
    """Primitive positive definite form a*x^2 + b*x*y + c*y^2."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a: int, b: int, c: int):
        if b * b - 4 * a * c >= 0 or a <= 0:
            raise ValueError(f"form ({a}, {b}, {c}) is not positive definite")
        if gcd(gcd(a, b), c) != 1:
            raise ValueError(f"form ({a}, {b}, {c}) is not primitive")
        self.a, self.b, self.c = a, b, c

    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def inverse(self) -> "BinaryQuadraticForm":
        return reduce(BinaryQuadraticForm(self.a, -self.b, self.c))

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return (-a < b <= a <= c) and not (a == c and b < 0)

    def __eq__(self, other):
        return (
            isinstance(other, BinaryQuadraticForm)
            and (self.a, self.b, self.c) == (other.a, other.b, other.c)
        )

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __repr__(self):
        return f"({self.a}, {self.b}, {self.c})"


def principal_form(D) -> BinaryQuadraticForm:
    D = _as_disc(D).value
    k = D & 1
    return BinaryQuadraticForm(1, k, (k - D) // 4)


def reduce(form: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """The unique reduced representative of the form's equivalence class."""
    a, b, c = form.a, form.b, form.c
    while True:
        if b > a or b <= -a:
            r = (a - b) // (2 * a)
            c = a * r * r + b * r + c
            b = b + 2 * r * a
        if a > c:
            a, b, c = c, -b, a
            continue
        break
    if a == c and b < 0:
        b = -b
    return BinaryQuadraticForm(a, b, c)


def _xgcd(a: int, b: int):
    """Returns (u, v, g) with u*a + v*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_s, old_t, old_r


def compose(f1: BinaryQuadraticForm, f2: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """Gauss composition of two primitive forms of equal discriminant, reduced."""
    D = f1.discriminant()
    if D != f2.discriminant():
        raise ValueError("composition requires equal discriminants")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, c1 = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    s = (b1 + b2) // 2
    m = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        u, _, d = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        u, v, d1 = _xgcd(s, d)
        x2, y2 = u, -v
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * m - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce(BinaryQuadraticForm(a3, b3, c3))


def form_pow(form: BinaryQuadraticForm, e: int) -> BinaryQuadraticForm:
    result = principal_form(form.discriminant())
    base = reduce(form)
    if e < 0:
        base = base.inverse()
        e = -e
    while e:
        if e & 1:
            result = compose(result, base)
        e >>= 1
        if e:
            base = compose(base, base)
    return result


def _check_cap(D: Discriminant):
    if -D.value > MAX_ABS_DISC:
        raise ValueError(f"|discriminant| {-D.value} exceeds cap {MAX_ABS_DISC}")


@lru_cache(maxsize=None)
def _reduced_forms(D: int) -> tuple:
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            t = b * b - D
            if t % (4 * a):
                continue
            c = t // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(BinaryQuadraticForm(a, b, c))
        a += 1
    return tuple(out)


def reduced_forms(D) -> list[BinaryQuadraticForm]:
    """All primitive reduced forms of the discriminant, in (a, b) order."""
    D = _as_disc(D)
    _check_cap(D)
    return list(_reduced_forms(D.value))


def class_number(D) -> int:
    """Class number h: the count of primitive reduced forms."""
    return len(reduced_forms(D))


@lru_cache(maxsize=None)
def _square_classes(D: int) -> frozenset:
    return frozenset(compose(f, f) for f in _reduced_forms(D))


def genus_number(D) -> int:
    """Number of genera g = h / #Cl^2; always a power of 2 dividing h."""
    D = _as_disc(D)
    _check_cap(D)
    h = class_number(D)
    g, rem = divmod(h, len(_square_classes(D.value)))
    if rem or g & (g - 1):
        raise AssertionError(f"genus count {h}/{len(_square_classes(D.value))} broken")
    return g


def is_square_class(D, form: BinaryQuadraticForm) -> bool:
    """Whether the class of the form lies in the subgroup of squares."""
    D = _as_disc(D)
    return reduce(form) in _square_classes(D.value)


def prime_form(D, q: int) -> BinaryQuadraticForm | None:
    """Reduced class of the prime ideal above q, or None if q is inert.

    Smallest b >= 0 with b^2 = D (mod 4q) fixes the representative.
    """
    D = _as_disc(D)
    if D.conductor % q == 0:
        raise ValueError(f"{q} divides the conductor of {D.value}")
    if kronecker_symbol(D.value, q) < 0:
        return None
    for b in range(0, 2 * q + 1):
        if (b * b - D.value) % (4 * q) == 0:
            return reduce(BinaryQuadraticForm(q, b, (b * b - D.value) // (4 * q)))
    raise AssertionError(f"no square root of {D.value} mod {4 * q}")  # pragma: no cover


def form_order(D, form: BinaryQuadraticForm) -> int:
    """Least k >= 1 with the k-fold composition principal; divides h."""
    D = _as_disc(D)
    if form.discriminant() != D.value:
        raise ValueError("form discriminant mismatch")
    one = principal_form(D)
    acc = reduce(form)
    k = 1
    while acc != one:
        acc = compose(acc, form)
        k += 1
    if class_number(D) % k:
        raise AssertionError("element order does not divide class number")
    return k


def splitting_type(D, q: int) -> str:
    """Behaviour of q in the order: split/ramified/inert via the fundamental part."""
    D = _as_disc(D)
    if D.conductor % q == 0:
        raise ValueError(f"{q} divides the conductor of {D.value}")
    k = kronecker_symbol(D.fundamental, q)
    return SPLIT if k == 1 else RAMIFIED if k == 0 else INERT


@dataclass(frozen=True)
class ClassGroupSummary:
    discriminant: Discriminant
    h: int
    g: int
    square_subgroup_size: int


def classgroup_summary(D) -> ClassGroupSummary:
    D = _as_disc(D)
    h = class_number(D)
    g = genus_number(D)
    return ClassGroupSummary(D, h, g, h // g)
