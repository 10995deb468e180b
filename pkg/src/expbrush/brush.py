"""The model map on [0, inf) x Z^omega and escape certification.

A model point <t, s> moves by <t, s> -> <F(t) - 2 pi |s0|, shift(s)>.  It lies
in the brush when every iterate keeps a nonnegative potential.  Potentials
are tracked as lower-bound towers, so a passing escape check is sound and
a failing one is merely inconclusive.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from .address import ExternalAddress, ZERO_ADDRESS, same_address, shift
from .tower import (
    TWO_PI,
    OrbitLeftDomain,
    TowerScalar,
    as_tower,
    f_inv,
    f_iter,
    tower_cmp,
    tower_fsub,
)


@dataclass(frozen=True)
class ModelPoint:
    t: TowerScalar | float
    s: ExternalAddress = ZERO_ADDRESS

    def __post_init__(self):
        if not isinstance(self.t, TowerScalar) and not self.t >= 0:
            raise ValueError(f"potential must be nonnegative, got {self.t}")

    @property
    def potential(self) -> TowerScalar:
        return as_tower(self.t)


def strip_constant(s: ExternalAddress) -> float:
    """2 pi |s0|, the amount one step subtracts."""
    return TWO_PI * abs(s.entry(0))


def step(x: ModelPoint) -> ModelPoint:
    return ModelPoint(tower_fsub(x.potential, strip_constant(x.s)), shift(x.s))


def orbit_lower_bounds(x: ModelPoint, n: int) -> List[TowerScalar]:
    """Lower bounds on T(F^i(x)) for i = 0..n.

    Raises OrbitLeftDomain with ``step`` set to the first index whose
    bound went negative.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = [x.potential]
    cur = x
    for i in range(1, n + 1):
        try:
            cur = step(cur)
        except OrbitLeftDomain as err:
            raise OrbitLeftDomain(f"orbit left [0, inf) at step {i}: {err}", step=i) from None
        out.append(cur.potential)
    return out


def tip(s: ExternalAddress, depth: int) -> float:
    """Depth-N tip: least t whose first N iterates stay nonnegative.

    Backward recursion r_N = 0, r_i = F^-1(r_{i+1} + 2 pi |s_i|).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    r = 0.0
    for i in range(depth - 1, -1, -1):
        r = f_inv(r + TWO_PI * abs(s.entry(i)))
    return r


def tips_by_depth(s: ExternalAddress, depths: Iterable[int]) -> Dict[int, float]:
    return {n: tip(s, n) for n in depths}


def _survives(t: float, s: ExternalAddress, depth: int) -> bool:
    # plain float forward simulation; independent of the tower path
    for i in range(depth):
        if t > 700.0:
            return True
        t = math.expm1(t) - TWO_PI * abs(s.entry(i))
        if t < 0:
            return False
    return True


def tip_by_bisection(s: ExternalAddress, depth: int, iters: int = 200) -> float:
    """Tip located by bisecting on forward simulation (oracle for :func:`tip`)."""
    lo, hi = 0.0, 1.0
    if _survives(0.0, s, depth):
        return 0.0
    while not _survives(hi, s, depth):
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _survives(mid, s, depth):
            hi = mid
        else:
            lo = mid
    return hi


def in_julia(x: ModelPoint, depth: int) -> bool:
    """Whether the certified orbit bounds stay nonnegative for ``depth`` steps."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    try:
        orbit_lower_bounds(x, depth)
    except OrbitLeftDomain:
        return False
    return True


def in_julia_by_tip(x: ModelPoint, depth: int) -> bool:
    """Second route: compare the potential with the depth tip."""
    if depth == 0:
        return True
    t = x.t if not isinstance(x.t, TowerScalar) else x.t.value()
    return t >= tip(x.s, depth)


class EscapeState(enum.Enum):
    CERTIFIED_ESCAPING = "CERTIFIED-ESCAPING"
    LEFT_DOMAIN = "LEFT-DOMAIN"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class EscapeCheck:
    k: int
    bound: TowerScalar
    required: TowerScalar
    passed: bool


@dataclass(frozen=True)
class EscapeCertificate:
    point: ModelPoint
    checks: Tuple[EscapeCheck, ...]
    kmax: int

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_json(self) -> List[dict]:
        return [{"k": c.k, "pass": c.passed} for c in self.checks]


class NotInJulia(ValueError):
    """Precondition failure: the point leaves [0, inf) too early."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


def double_square_check(bounds: Sequence[TowerScalar], k: int) -> EscapeCheck:
    """T(F^{2k^2}(x)) >= F^{k^2}(1), given orbit bounds reaching index 2k^2."""
    bound = bounds[2 * k * k]
    required = f_iter(k * k, 1.0)
    return EscapeCheck(k, bound, required, tower_cmp(bound, required) >= 0)


def certify_escape(x: ModelPoint, kmax: int, kmin: int = 5) -> EscapeCertificate:
    """Double-square escape checks for k = kmin..kmax.

    A passing certificate shows T(F^n(x)) >= F^k(1) on every window
    [2(k-1)^2, 2k^2], k <= kmax.  kmin below 5 is allowed for the bare
    inequality checks, but the window statement needs k >= 5.
    """
    if kmax < kmin:
        raise ValueError(f"kmax must be >= {kmin}")
    try:
        bounds = orbit_lower_bounds(x, 2 * kmax * kmax)
    except OrbitLeftDomain as err:
        raise NotInJulia(f"not in J(F) to required depth: {err}", step=err.step) from None
    checks = tuple(double_square_check(bounds, k) for k in range(kmin, kmax + 1))
    return EscapeCertificate(x, checks, kmax)


def classify_point(x: ModelPoint, kmax: int = 6) -> Tuple[EscapeState, EscapeCertificate | None, int | None]:
    """Three-state verdict: certified escaping, left the domain, or unknown."""
    try:
        cert = certify_escape(x, kmax)
    except NotInJulia as err:
        return EscapeState.LEFT_DOMAIN, None, err.step
    if cert.passed:
        return EscapeState.CERTIFIED_ESCAPING, cert, None
    return EscapeState.UNKNOWN, cert, None


class PreconditionError(ValueError):
    pass


def check_forward_stretch(x: ModelPoint, y: ModelPoint, n: int) -> bool:
    """T(F^n(y)) >= F^n(T(y) - T(x)) for two points on one hair."""
    if not same_address(x.s, y.s):
        raise PreconditionError("x and y must share an external address")
    tx, ty = x.potential, y.potential
    if not tower_cmp(ty, tx) > 0:
        raise PreconditionError("need T(y) > T(x)")
    # x at its exact tip fails the rounded-down route, so accept either route
    if not (in_julia(x, n) or in_julia_by_tip(x, n)):
        raise PreconditionError("x is not in J(F) to depth n")
    try:
        ybounds = orbit_lower_bounds(y, n)
    except OrbitLeftDomain:
        raise PreconditionError("y is not in J(F) to depth n") from None
    vx = x.t if not isinstance(x.t, TowerScalar) else tx.value()
    vy = y.t if not isinstance(y.t, TowerScalar) else ty.value()
    if math.isinf(vy):
        raise PreconditionError("potentials beyond float range")
    gap = vy - vx
    if Fraction(vy) - Fraction(vx) < Fraction(gap):
        gap = math.nextafter(gap, 0.0)
    return tower_cmp(ybounds[n], f_iter(n, gap)) >= 0


@dataclass
class SubBrush:
    """A finite set of hairs [t_s, inf) x {s} with depth-N tips."""

    addresses: Tuple[ExternalAddress, ...]
    depth: int
    tips: Dict[ExternalAddress, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        uniq: List[ExternalAddress] = []
        for s in self.addresses:
            if not any(same_address(s, u) for u in uniq):
                uniq.append(s)
        self.addresses = tuple(uniq)
        for s in self.addresses:
            if s not in self.tips:
                self.tips[s] = tip(s, self.depth)

    @classmethod
    def build(cls, addresses: Iterable[ExternalAddress | str], depth: int = 64) -> "SubBrush":
        addrs = [a if isinstance(a, ExternalAddress) else ExternalAddress.parse(a) for a in addresses]
        return cls(tuple(addrs), depth)

    def __len__(self):
        return len(self.addresses)

    def __iter__(self):
        return iter(self.addresses)

    def tip_of(self, s: ExternalAddress) -> float:
        return self.tips[s]
