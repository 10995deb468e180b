"""Arithmetic for F(t) = e^t - 1, its inverse, and their iterates.

Large potentials are stored as towers F^L(m): a level count L and a float
mantissa m.  Towers carry lower bounds only; every float operation that
feeds a tower is nudged one ulp toward zero so the stored value never
exceeds the true one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import List, Tuple

TWO_PI = 2.0 * math.pi

# Largest t for which expm1(t) is finite in binary64.
EXP_LIMIT = 709.0


class PromoteToTower(OverflowError):
    """F(t) does not fit in a float; route the value through TowerScalar."""


class OrbitLeftDomain(ArithmeticError):
    """A potential update F(t) - c went negative."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


def _down(x: float) -> float:
    return max(0.0, math.nextafter(x, -math.inf))


def _find_mantissa_floor() -> float:
    # smallest float m with expm1(m) >= 1.0 in float arithmetic
    m = math.log(2.0)
    while math.expm1(math.nextafter(m, 0.0)) >= 1.0:
        m = math.nextafter(m, 0.0)
    while math.expm1(m) < 1.0:
        m = math.nextafter(m, 1.0)
    return m


#: Lower edge of the canonical mantissa range used when level > 0.
MANTISSA_FLOOR = _find_mantissa_floor()


def f_apply(t: float) -> float:
    """Return F(t) = e^t - 1 for a float potential t >= 0."""
    if t < 0:
        raise ValueError(f"potential must be nonnegative, got {t}")
    if t > EXP_LIMIT:
        raise PromoteToTower(f"F({t}) overflows a float")
    return math.expm1(t)


def f_inv(t: float) -> float:
    """Return F^{-1}(t) = ln(t + 1)."""
    if t < 0:
        raise ValueError(f"F^-1 is defined on [0, inf), got {t}")
    return math.log1p(t)


def f_inv_iter(n: int, t: float = 1.0) -> float:
    """Apply F^{-1} to t, n times."""
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    if t < 0:
        raise ValueError(f"F^-1 is defined on [0, inf), got {t}")
    for _ in range(n):
        t = math.log1p(t)
    return t


def inverse_orbit(nmax: int, t: float = 1.0) -> List[float]:
    """Return [F^0(t), F^-1(t), ..., F^-nmax(t)].

    Same float path as f_inv_iter, so entry n equals f_inv_iter(n, t)
    bit for bit.
    """
    out = [t]
    for _ in range(nmax):
        t = math.log1p(t)
        out.append(t)
    return out


def inv_square_widths(count: int, offset: int = 0) -> List[float]:
    """Return F^{-(offset+k)^2}(1) for k = 1..count."""
    top = (offset + count) ** 2
    orbit = inverse_orbit(top)
    return [orbit[(offset + k) ** 2] for k in range(1, count + 1)]


def partial_sum_inv_squares(kmax: int) -> float:
    """Sum of F^{-k^2}(1) for k = 1..kmax (always below pi^2/2)."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    return sum(inv_square_widths(kmax))


def partial_sums_inv_squares(kmax: int) -> List[float]:
    """All partial sums up to kmax; entry k-1 is partial_sum_inv_squares(k)."""
    sums = []
    total = 0.0
    for w in inv_square_widths(kmax):
        total += w
        sums.append(total)
    return sums


@total_ordering
@dataclass(frozen=True)
class TowerScalar:
    """The value F^level(mantissa), a lower bound on some potential.

    Build through :meth:`canonical` or :meth:`from_float`; the constructor
    rejects non-canonical pairs.  Canonical form keeps the mantissa in
    [0, 1) at level 0 and in [MANTISSA_FLOOR, 1) above it, which makes
    (level, mantissa) order agree with value order.
    """

    level: int
    mantissa: float

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        m = self.mantissa
        if not (0.0 <= m < 1.0) or (self.level > 0 and m < MANTISSA_FLOOR):
            raise ValueError(f"non-canonical tower ({self.level}, {m!r})")

    @classmethod
    def canonical(cls, level: int, mantissa: float) -> "TowerScalar":
        """Normalize F^level(mantissa) so that the stored value stays a lower bound."""
        if mantissa < 0 or math.isnan(mantissa):
            raise ValueError(f"mantissa must be nonnegative, got {mantissa}")
        if math.isinf(mantissa):
            raise ValueError("infinite mantissa")
        m = float(mantissa)
        while m >= 1.0:
            m = _down(math.log1p(m))
            level += 1
        while level > 0 and m < MANTISSA_FLOOR:
            m = min(_down(math.expm1(m)), math.nextafter(1.0, 0.0))
            level -= 1
        return cls(level, m)

    @classmethod
    def from_float(cls, x: float) -> "TowerScalar":
        return cls.canonical(0, x)

    def value(self) -> float:
        """Float lower bound on the represented value; inf when out of range."""
        v = self.mantissa
        for _ in range(self.level):
            if v > EXP_LIMIT:
                return math.inf
            v = _down(math.expm1(v))
        return v

    def is_finite_float(self) -> bool:
        return not math.isinf(self.value())

    def __lt__(self, other):
        if not isinstance(other, TowerScalar):
            return NotImplemented
        return (self.level, self.mantissa) < (other.level, other.mantissa)

    def __str__(self):
        if self.level == 0:
            return f"{self.mantissa:.17g}"
        return f"F^{self.level}({self.mantissa:.17g})"

    def to_json(self) -> dict:
        return {"level": self.level, "mantissa": self.mantissa, "value": _json_float(self.value())}


def _json_float(x: float):
    return None if math.isinf(x) else x


ZERO = TowerScalar(0, 0.0)


def tower(level: int, mantissa: float) -> TowerScalar:
    """Shorthand for TowerScalar.canonical."""
    return TowerScalar.canonical(level, mantissa)


def as_tower(t) -> TowerScalar:
    if isinstance(t, TowerScalar):
        return t
    return TowerScalar.from_float(float(t))


def f_iter(n: int, t) -> TowerScalar:
    """F^n(t) as a tower; pure level bookkeeping, no float evaluation."""
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    t = as_tower(t)
    if t.mantissa == 0.0:
        return ZERO
    return TowerScalar.canonical(t.level + n, t.mantissa)


def tower_cmp(u: TowerScalar, v: TowerScalar) -> int:
    """Three-way comparison: -1, 0 or 1."""
    a = (u.level, u.mantissa)
    b = (v.level, v.mantissa)
    return (a > b) - (a < b)


def fsub_with_slack(u: TowerScalar, c: float) -> Tuple[TowerScalar, float]:
    """Lower bound on F(u) - c, plus the potential slack given up to get it.

    Three regimes:

    * ``c == 0``: exact, the level just goes up by one.
    * F(u) fits in a float: direct evaluation, rounded down.
    * otherwise u is lowered to u' by one ulp of its mantissa and F(u') is
      returned, after verifying F(u) - F(u') >= c.  By the mean value
      theorem F(u) - F(u') >= e^{u'} (u - u'), and u - u' >= m - m'
      because every F^L has derivative >= 1, so checking
      u' + ln(m - m') >= ln(c) suffices.  The slack is m - m'.
    """
    if c < 0:
        raise ValueError("subtracted constant must be nonnegative")
    if c == 0:
        return f_iter(1, u), 0.0
    uval = u.value()
    if uval <= EXP_LIMIT:
        r = _down(math.expm1(uval)) - c
        if r < 0:
            raise OrbitLeftDomain(f"F({uval!r}) - {c!r} < 0")
        return TowerScalar.from_float(_down(r)), 0.0
    m = u.mantissa
    m_low = math.nextafter(m, 0.0)
    lowered = TowerScalar.canonical(u.level, m_low)
    low_val = min(lowered.value(), 1.7e308)
    slack = m - m_low
    # margin absorbs rounding in the float logs
    if not (low_val + math.log(slack) - 1e-6 >= math.log(c)):
        raise ArithmeticError(f"cannot certify F(u) - {c} >= F(u') for u={u}")
    return f_iter(1, lowered), slack


def tower_fsub(u: TowerScalar, c: float) -> TowerScalar:
    """Certified lower bound on F(u) - c; raises OrbitLeftDomain if negative."""
    return fsub_with_slack(u, c)[0]
