"""External addresses, the shift map, and the embedding into the real line.

An address s = s0 s1 s2 ... is stored as a finite prefix plus a tail that
is either all zeros or a repeating block.  Addresses are placed on the
vertical axis by the order embedding

    h(s) = s0 + q(h(s1 s2 ...)),   q(t) = 1/2 + t / (2 (1 + |t|)).

q is increasing, maps rationals to rationals and R onto (0, 1), so each
cylinder (set of addresses with a fixed prefix) lands in an open interval
with rational endpoints.  Every rational is such an endpoint, which means
h(s) is never rational and every comparison between h(s) and a rational
can be decided exactly by expanding the rational into digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

# Digit expansions of rationals always terminate (num + den strictly
# decreases each step); the cap only guards against misuse.
_MAX_DIGITS = 100_000


@dataclass(frozen=True)
class ExternalAddress:
    """An eventually periodic integer sequence.

    ``period == ()`` means the tail is all zeros.
    """

    prefix: Tuple[int, ...]
    period: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))
        object.__setattr__(self, "period", tuple(int(x) for x in self.period))
        if len(self.prefix) < 1:
            raise ValueError("address prefix must have at least one entry")

    @classmethod
    def parse(cls, text: str) -> "ExternalAddress":
        """Parse ``"3,1,4"`` (zero tail) or ``"1|2,3"`` (repeating block)."""
        text = text.strip()
        head, sep, tail = text.partition("|")
        try:
            prefix = tuple(int(x) for x in head.split(",") if x.strip())
            period = tuple(int(x) for x in tail.split(",") if x.strip()) if sep else ()
        except ValueError:
            raise ValueError(f"malformed address string {text!r}") from None
        if not prefix:
            raise ValueError(f"malformed address string {text!r}: empty prefix")
        if sep and not period:
            raise ValueError(f"malformed address string {text!r}: empty period")
        return cls(prefix, period)

    def __str__(self):
        head = ",".join(str(x) for x in self.prefix)
        if self.period:
            return head + "|" + ",".join(str(x) for x in self.period)
        return head

    @property
    def periodic(self) -> bool:
        return bool(self.period)

    def entry(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        if not self.period:
            return 0
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def entries(self, n: int) -> Tuple[int, ...]:
        """The first n entries, s restricted to n."""
        return tuple(self.entry(i) for i in range(n))

    def __iter__(self) -> Iterator[int]:
        i = 0
        while True:
            yield self.entry(i)
            i += 1

    def max_abs_entry(self) -> int:
        return max(abs(x) for x in self.prefix + self.period)

    def _compare_horizon(self, other: "ExternalAddress") -> int:
        p1 = len(self.period) or 1
        p2 = len(other.period) or 1
        return max(len(self.prefix), len(other.prefix)) + p1 * p2 // math.gcd(p1, p2)


ZERO_ADDRESS = ExternalAddress((0,))


def address(text: str) -> ExternalAddress:
    return ExternalAddress.parse(text)


def lex_cmp(s: ExternalAddress, t: ExternalAddress) -> int:
    """Lexicographic comparison returning -1, 0 or 1."""
    for i in range(s._compare_horizon(t)):
        a, b = s.entry(i), t.entry(i)
        if a != b:
            return -1 if a < b else 1
    return 0


def same_address(s: ExternalAddress, t: ExternalAddress) -> bool:
    return lex_cmp(s, t) == 0


def shift(s: ExternalAddress) -> ExternalAddress:
    """Drop s0."""
    if len(s.prefix) > 1:
        return ExternalAddress(s.prefix[1:], s.period)
    if not s.period:
        return ZERO_ADDRESS
    return ExternalAddress((s.period[0],), s.period[1:] + s.period[:1])


def prepend(x: int, s: ExternalAddress) -> ExternalAddress:
    return ExternalAddress((x,) + s.prefix, s.period)


# --- embedding -------------------------------------------------------------

def q_map(t: Fraction) -> Fraction:
    """q(t) = 1/2 + t / (2 (1 + |t|)), an increasing bijection R -> (0, 1)."""
    return Fraction(1, 2) + t / (2 * (1 + abs(t)))


def q_inverse(u: Fraction) -> Fraction:
    if not 0 < u < 1:
        raise ValueError("q^-1 is defined on (0, 1)")
    v = 2 * u - 1
    return v / (1 - abs(v))


@dataclass(frozen=True)
class RationalInterval:
    """Open interval (lo, hi) with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self):
        return [frac_str(self.lo), frac_str(self.hi)]


@dataclass(frozen=True)
class Cylinder:
    """All addresses beginning with ``prefix``."""

    prefix: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))
        if not self.prefix:
            raise ValueError("cylinder prefix must be nonempty")


def cylinder_interval(c: Cylinder | Sequence[int]) -> RationalInterval:
    """Exact image of a cylinder under h.

    The endpoints are h of the prefix continued by -inf and +inf, i.e. the
    innermost interval is (p_last, p_last + 1) and each outer digit applies
    t -> p_i + q(t).
    """
    prefix = c.prefix if isinstance(c, Cylinder) else tuple(c)
    if not prefix:
        raise ValueError("cylinder prefix must be nonempty")
    lo = Fraction(prefix[-1])
    hi = lo + 1
    for p in reversed(prefix[:-1]):
        lo = p + q_map(lo)
        hi = p + q_map(hi)
    return RationalInterval(lo, hi)


def embed_point(s: ExternalAddress, depth: int) -> RationalInterval:
    """Interval of the depth-length cylinder containing s."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return cylinder_interval(s.entries(depth))


def rational_digits(y: Fraction) -> Tuple[List[int], bool]:
    """Digit expansion of a rational under h^-1.

    Returns (digits, True); the expansion stops at the first index where
    the remainder is an integer, i.e. y is the lower endpoint of the
    cylinder digits[:-1] + (digits[-1],) continued by -inf.
    """
    y = Fraction(y)
    out = []
    for _ in range(_MAX_DIGITS):
        d = math.floor(y)
        out.append(d)
        u = y - d
        if u == 0:
            return out, True
        y = q_inverse(u)
    return out, False


def compare_height(s: ExternalAddress, y: Fraction) -> int:
    """Sign of h(s) - y, decided exactly.  Never 0 since h(s) is irrational."""
    y = Fraction(y)
    for i in range(_MAX_DIGITS):
        si = s.entry(i)
        d = math.floor(y)
        if d != si:
            return -1 if si < d else 1
        u = y - d
        if u == 0:
            # y sits at the bottom of the cylinder containing h(sigma^i s)
            return 1
        y = q_inverse(u)
    raise ArithmeticError("digit expansion did not terminate")


def height_in(s: ExternalAddress, lo: Fraction, hi: Fraction) -> bool:
    """Whether lo <= h(s) <= hi (strict in practice: h(s) is irrational)."""
    return compare_height(s, lo) > 0 and compare_height(s, hi) < 0


def height_float(s: ExternalAddress, depth: int = 60) -> float:
    """Float approximation of h(s), for drawing only."""
    iv = embed_point(s, depth)
    return float((iv.lo + iv.hi) / 2)


def rational_above(s: ExternalAddress, bound: Fraction) -> Fraction:
    """A rational r with h(s) < r < bound, taken from a cylinder endpoint."""
    if compare_height(s, bound) >= 0:
        raise ValueError("h(s) is not below bound")
    depth = 1
    while True:
        iv = embed_point(s, depth)
        if iv.hi < bound:
            return iv.hi
        depth += 1


def rational_below(s: ExternalAddress, bound: Fraction) -> Fraction:
    """A rational r with bound < r < h(s)."""
    if compare_height(s, bound) <= 0:
        raise ValueError("h(s) is not above bound")
    depth = 1
    while True:
        iv = embed_point(s, depth)
        if iv.lo > bound:
            return iv.lo
        depth += 1


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text) -> Fraction:
    """Parse ``"p/q"``, an integer, or a finite decimal string into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("vertical coordinates must be exact rationals, not floats")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None
