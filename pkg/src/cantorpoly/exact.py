"""Exact structure of the iterated maps and their dyadic-degree polynomials.

The generating maps are

    f_1(z) = 2 z (z - 1) / gamma_1 + 1,
    f_n(z) = z^2 / (2 gamma_n) + 1 - 1/(2 gamma_n)      (n >= 2),

and F_n = f_n o ... o f_1. The monic orthogonal polynomial of degree 2^m
for the equilibrium measure of the limit set is F_m / tau_m, where tau_m
is the leading coefficient of F_m. Zeros and critical points at dyadic
degrees come from closed-form inverse-branch compositions; no root
finding is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ddouble import DoubleDouble
from .errors import DomainError, RangeOverflowError
from .geometry import GammaSequence, all_branch_values

_ZERO_PROVENANCES = ("exact-branch", "eigensolve")


@dataclass(frozen=True)
class MapFamily:
    """The map sequence generated by a gamma sequence."""

    gamma: GammaSequence

    def f(self, n: int, z):
        """Evaluate the level-n generating map."""
        if n < 1:
            raise DomainError("map index must be >= 1")
        g = float(self.gamma.value(n))
        if n == 1:
            return 2.0 * z * (z - 1.0) / g + 1.0
        return z * z / (2.0 * g) + 1.0 - 1.0 / (2.0 * g)

    def lead(self, n: int) -> float:
        """Leading coefficient of f_n."""
        g = float(self.gamma.value(n))
        return 2.0 / g if n == 1 else 1.0 / (2.0 * g)

    def subleading(self, n: int) -> float:
        """Coefficient of z^(deg-1) in f_n; vanishes for every n >= 2."""
        if n == 1:
            return -2.0 / float(self.gamma.value(1))
        return 0.0

    def tau(self, m: int) -> float:
        """Leading coefficient of F_m; tau_{m+1} = tau_m^2 / (2 gamma_{m+1}).

        Grows doubly exponentially and overflows to inf around m = 10; the
        monic evaluation below never forms it explicitly.
        """
        if m < 1:
            raise DomainError("composition depth must be >= 1")
        t = self.lead(1)
        for k in range(2, m + 1):
            t = t * t / (2.0 * float(self.gamma.value(k)))
        return t


@dataclass(frozen=True)
class ZeroSet:
    """Sorted zeros of one orthogonal polynomial.

    points_dd carries the double-double values when an escalated
    eigensolve produced them; neighbouring zeros may then round to equal
    doubles, so the float points are only required to be non-decreasing
    in that case.
    """

    degree: int
    points: np.ndarray
    provenance: str
    escalated: bool = field(default=False, compare=False)
    points_dd: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if self.degree < 1 or pts.size != self.degree:
            raise DomainError(f"expected {self.degree} zeros, got {pts.size}")
        if pts.size > 1:
            diffs = np.diff(pts)
            if self.points_dd is None and not np.all(diffs > 0):
                raise DomainError("zeros must be strictly increasing")
            if self.points_dd is not None and not np.all(diffs >= 0):
                raise DomainError("zeros must be sorted")
        if pts[0] <= 0.0 or pts[-1] >= 1.0:
            raise DomainError("zeros must lie strictly inside (0, 1)")
        if self.provenance not in _ZERO_PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")

    def __len__(self):
        return self.degree


@dataclass(frozen=True)
class CriticalSet:
    """Sorted critical points of F_n: the 2^n - 1 zeros of its derivative."""

    level: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.size != 2 ** self.level - 1:
            raise DomainError(
                f"level {self.level} critical set needs {2 ** self.level - 1} points"
            )
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise DomainError("critical points must be strictly increasing")


def evaluate_F(fam: MapFamily, n: int, z):
    """Forward composition F_n(z) = f_n(...f_1(z)).

    Off the invariant set the values blow up doubly exponentially; a
    non-finite intermediate raises RangeOverflowError.
    """
    if n < 1:
        raise DomainError("composition depth must be >= 1")
    v = z
    for k in range(1, n + 1):
        v = fam.f(k, v)
        if not np.all(np.isfinite(v)):
            raise RangeOverflowError(f"F_{k} overflowed at z = {z!r}")
    return v


def monic_opoly_exact(fam: MapFamily, m: int, z):
    """Monic degree-2^m orthogonal polynomial F_m(z) / tau_m.

    Uses the doubling recursion P -> P^2 - (1 - 2 gamma_{k+1}) / tau_k^2,
    propagating 1/tau_k^2 instead of tau_k so nothing overflows; the
    correction underflows harmlessly once it drops below the subnormal
    range (around m = 10).
    """
    if m < 1:
        raise DomainError("degree exponent must be >= 1")
    g1 = float(fam.gamma.value(1))
    p = (z * z - z) + g1 / 2.0
    inv_tau_sq = (g1 / 2.0) ** 2
    for k in range(2, m + 1):
        gk = float(fam.gamma.value(k))
        p = p * p - (1.0 - 2.0 * gk) * inv_tau_sq
        inv_tau_sq = (inv_tau_sq * 2.0 * gk) ** 2
        if not np.all(np.isfinite(p)):
            raise RangeOverflowError(f"monic evaluation overflowed at depth {k}")
    return p


def exact_zeros(fam: MapFamily, m: int, mode: str = "double") -> ZeroSet:
    """The 2^m zeros of the degree-2^m orthogonal polynomial.

    They are the preimages of 0 under F_m, i.e. the branch values at t = 0
    over all words of length m; equivalently the pullbacks of the two
    roots of f_m through the level-(m-1) branches. One zero lies in each
    level-m basic interval.
    """
    if m < 1:
        raise DomainError("degree exponent must be >= 1")
    vals = all_branch_values(fam.gamma, m, 0.0, mode)
    pts = np.sort(np.asarray([float(v) for v in vals]))
    return ZeroSet(degree=2 ** m, points=pts, provenance="exact-branch")


def exact_zero_scalars(fam: MapFamily, m: int, mode: str = "double") -> list:
    """Sorted zeros in the working scalar type (DoubleDouble in dd mode).

    Lets callers form differences of neighbouring zeros without first
    rounding to double.
    """
    vals = all_branch_values(fam.gamma, m, 0.0, mode)
    return sorted(vals, key=float)


def critical_set(fam: MapFamily, n: int, mode: str = "double") -> CriticalSet:
    """Critical points of F_n: {1/2} together with all shallower zero sets.

    The chain rule factors F_n' over f_1' (vanishing at 1/2) and
    f_k'(F_{k-1}) for k = 2..n, whose zeros are the zeros of F_{k-1};
    the union has exactly 2^n - 1 points and misses the level-n set.
    """
    if n < 1:
        raise DomainError("level must be >= 1")
    pieces = [np.array([0.5])]
    for k in range(1, n):
        pieces.append(exact_zeros(fam, k, mode).points)
    pts = np.sort(np.concatenate(pieces))
    return CriticalSet(level=n, points=pts)
