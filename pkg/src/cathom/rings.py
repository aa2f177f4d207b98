"""Coefficient rings: the integers, the rationals, and prime fields.

All arithmetic is exact.  Integers are Python ints (arbitrary precision),
rationals are ``fractions.Fraction``, prime-field elements are ints reduced
into ``[0, p)``.
"""

from __future__ import annotations

from fractions import Fraction


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Ring:
    """Common interface for the three supported coefficient rings."""

    kind: str  # "Z", "Q" or "Fp"
    is_field: bool

    def coerce(self, x):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a) -> bool:
        return a == self.zero

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def exact_div(self, a, b):
        """a / b when b divides a exactly; raises otherwise."""
        raise NotImplementedError

    def divides(self, b, a) -> bool:
        """True when b divides a."""
        raise NotImplementedError

    def to_json(self) -> dict:
        if self.kind == "Fp":
            return {"ring": "Fp", "p": self.p}  # type: ignore[attr-defined]
        return {"ring": self.kind}

    def entry_to_json(self, a):
        return a

    def entry_from_json(self, a):
        return self.coerce(a)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.kind == other.kind and getattr(
            self, "p", None
        ) == getattr(other, "p", None)

    def __hash__(self):
        return hash((self.kind, getattr(self, "p", None)))

    def __repr__(self):
        if self.kind == "Fp":
            return f"F{self.p}"  # type: ignore[attr-defined]
        return self.kind


class IntegerRing(Ring):
    kind = "Z"
    is_field = False
    zero = 0
    one = 1

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int):
            if isinstance(x, Fraction) and x.denominator == 1:
                return int(x)
            raise TypeError(f"not an integer: {x!r}")
        return x

    def is_unit(self, a) -> bool:
        return a in (1, -1)

    def inv(self, a):
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")

    def exact_div(self, a, b):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"{b} does not divide {a}")
        return q

    def divides(self, b, a) -> bool:
        if b == 0:
            return a == 0
        return a % b == 0


class RationalRing(Ring):
    kind = "Q"
    is_field = True
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"not a rational: {x!r}")

    def is_unit(self, a) -> bool:
        return a != 0

    def inv(self, a):
        return 1 / a

    def exact_div(self, a, b):
        return a / b

    def divides(self, b, a) -> bool:
        return b != 0 or a == 0

    def entry_to_json(self, a):
        if a.denominator == 1:
            return int(a)
        return f"{a.numerator}/{a.denominator}"


class PrimeField(Ring):
    kind = "Fp"
    is_field = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = 0
        self.one = 1 % p

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        raise TypeError(f"not a prime-field element: {x!r}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def is_unit(self, a) -> bool:
        return a % self.p != 0

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 is not invertible")
        return pow(a, self.p - 2, self.p)

    def exact_div(self, a, b):
        return (a * self.inv(b)) % self.p

    def divides(self, b, a) -> bool:
        return b % self.p != 0 or a % self.p == 0


ZZ = IntegerRing()
QQ = RationalRing()

_FP_CACHE: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    if p not in _FP_CACHE:
        _FP_CACHE[p] = PrimeField(p)
    return _FP_CACHE[p]


def ring_from_tag(tag: str, p: int | None = None) -> Ring:
    """Parse a ring tag: "Z", "Q", "Fp" (with p), or "Fp:5" style."""
    if tag == "Z":
        return ZZ
    if tag == "Q":
        return QQ
    if tag == "Fp":
        if p is None:
            raise ValueError("Fp needs a prime p")
        return GF(p)
    if tag.startswith("Fp:"):
        return GF(int(tag.split(":", 1)[1]))
    if tag.startswith("F") and tag[1:].isdigit():
        return GF(int(tag[1:]))
    raise ValueError(f"unknown ring tag {tag!r}")


def ring_from_json(d: dict) -> Ring:
    return ring_from_tag(d["ring"], d.get("p"))
