"""Geometry of the quadratically generated Cantor sets.

The level-n pre-Cantor set is a disjoint union of 2^n basic intervals,
each addressed by a word over {L, R}. All interval endpoints and branch
values factor through the elementary kernel

    u(t) = 1/2 - (1/2) * sqrt(1 - 4t),      0 <= t <= 1/4,

composed from the inside out with per-level scale factors gamma_k. The
fundamental scale of level s is delta_s = gamma_1 * ... * gamma_s.

Every function here is pure and works on plain floats, numpy arrays, or
:class:`~cantorpoly.ddouble.DoubleDouble` scalars; the ``mode`` argument
of the higher-level operations selects which representation the gamma
constants are materialized in ("double", "dd", or "auto", which switches
to double-double once delta at the requested depth drops below 1e-12).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _alphabet_product
from typing import Iterator, Sequence, Union

import numpy as np

from .ddouble import DoubleDouble, _parse_rational
from .errors import DomainError

Scalar = Union[float, DoubleDouble]

_QUARTER = Fraction(1, 4)
_AUTO_DD_THRESHOLD = 1e-12


def _sqrt(x):
    if isinstance(x, DoubleDouble):
        return x.sqrt()
    if isinstance(x, float):
        return math.sqrt(x)
    return np.sqrt(x)


# ---------------------------------------------------------------------------
# gamma sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaSequence:
    """Scale sequence gamma_1, gamma_2, ... defined by a finite descriptor.

    kind
        "constant": every gamma_k equals values[0].
        "list": explicit prefix, extended indefinitely by its last entry.
        "periodic": the values repeat cyclically.

    Entries are kept as exact rationals so products (delta_s) and
    materializations in either precision are correctly rounded. Each entry
    must satisfy 0 < gamma_k <= 1/4; the closed upper endpoint admits the
    degenerate case in which the construction fills all of [0, 1] and the
    basic intervals touch instead of leaving gaps.
    """

    kind: str
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if self.kind not in ("constant", "list", "periodic"):
            raise DomainError(f"unknown gamma descriptor kind {self.kind!r}")
        if not self.values:
            raise DomainError("gamma descriptor needs at least one value")
        if self.kind == "constant" and len(self.values) != 1:
            raise DomainError("constant descriptor takes exactly one value")
        for v in self.values:
            if not (0 < v <= _QUARTER):
                raise DomainError(f"gamma value {v} outside (0, 1/4]")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value) -> "GammaSequence":
        return cls("constant", (_as_fraction(value),))

    @classmethod
    def from_list(cls, values) -> "GammaSequence":
        return cls("list", tuple(_as_fraction(v) for v in values))

    @classmethod
    def periodic(cls, values) -> "GammaSequence":
        return cls("periodic", tuple(_as_fraction(v) for v in values))

    @classmethod
    def from_descriptor(cls, desc) -> "GammaSequence":
        """Build from a descriptor mapping or a compact string.

        Mappings look like ``{"kind": "periodic", "values": ["0.125", ...]}``.
        The string form is ``kind:v1,v2,...``, e.g. ``constant:0.25``.
        """
        if isinstance(desc, str):
            kind, _, rest = desc.partition(":")
            if not rest:
                raise DomainError(f"malformed gamma descriptor {desc!r}")
            values = [v.strip() for v in rest.split(",") if v.strip()]
            return cls(kind.strip(), tuple(_as_fraction(v) for v in values))
        if isinstance(desc, dict):
            return cls(desc["kind"], tuple(_as_fraction(v) for v in desc["values"]))
        raise DomainError(f"unsupported gamma descriptor {desc!r}")

    def descriptor(self) -> dict:
        """Reproducible descriptor; values render as exact strings."""
        return {"kind": self.kind, "values": [_fraction_str(v) for v in self.values]}

    # -- materialization ---------------------------------------------------

    def value(self, k: int) -> Fraction:
        """Exact gamma_k for k >= 1."""
        if k < 1:
            raise DomainError("gamma index must be >= 1")
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "list":
            return self.values[min(k, len(self.values)) - 1]
        return self.values[(k - 1) % len(self.values)]

    def gamma(self, k: int, mode: str = "double") -> Scalar:
        v = self.value(k)
        if mode == "dd":
            return DoubleDouble.from_fraction(v)
        return float(v)

    def delta_fraction(self, s: int) -> Fraction:
        if s < 0:
            raise DomainError("delta index must be >= 0")
        out = Fraction(1)
        for k in range(1, s + 1):
            out *= self.value(k)
        return out

    def delta(self, s: int, mode: str = "double") -> Scalar:
        fr = self.delta_fraction(s)
        if mode == "dd":
            return DoubleDouble.from_fraction(fr)
        return float(fr)

    def infimum(self) -> Fraction:
        """inf over k of gamma_k; exact because the descriptor is finite."""
        return min(self.values)

    def resolve_mode(self, depth: int, mode: str) -> str:
        if mode == "auto":
            return "dd" if float(self.delta_fraction(depth)) < _AUTO_DD_THRESHOLD else "double"
        if mode not in ("double", "dd"):
            raise DomainError(f"unknown precision mode {mode!r}")
        return mode

    # -- informational diagnostics ----------------------------------------

    def summability_partial(self, depth: int) -> float:
        """Partial sum of 2^-k * log(1/gamma_k) up to the given depth."""
        return sum(2.0 ** -k * math.log(1.0 / float(self.value(k)))
                   for k in range(1, depth + 1))

    def classification(self, depth: int = 32) -> dict:
        """Informational flags about the materialized prefix only.

        The reported conditions classify the limit measure when they hold
        for the whole tail; a finite prefix cannot certify that, so these
        are surfaced as diagnostics, never asserted.
        """
        gs = [self.value(k) for k in range(1, depth + 1)]
        return {
            "depth": depth,
            "summability_partial": self.summability_partial(depth),
            "sqrt_gap_partial": sum(math.sqrt(1.0 - 4.0 * float(g)) for g in gs),
            "prefix_all_le_one_sixth": all(g <= Fraction(1, 6) for g in gs),
            "prefix_min_gamma": float(min(gs)),
        }


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return _parse_rational(v)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    raise DomainError(f"cannot interpret {v!r} as a gamma value")


def _fraction_str(v: Fraction) -> str:
    # exact decimal when the denominator is 2^a * 5^b, else "p/q"
    den = v.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den == 1:
        from decimal import Decimal
        return str(Decimal(v.numerator) / Decimal(v.denominator))
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# branch words and intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchWord:
    """A word over {L, R}; letter k selects the branch used at level k.

    L stands for the increasing kernel u, R for its reflection 1 - u.
    A word of length n addresses exactly one level-n basic interval; the
    all-L word addresses the leftmost one.
    """

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise DomainError("branch word must be nonempty")
        if any(c not in "LR" for c in self.letters):
            raise DomainError(f"branch word {self.letters!r} has letters outside L/R")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @classmethod
    def leftmost(cls, n: int) -> "BranchWord":
        return cls("L" * n)

    @staticmethod
    def all_words(n: int) -> Iterator["BranchWord"]:
        for combo in _alphabet_product("LR", repeat=n):
            yield BranchWord("".join(combo))


def _as_word(word) -> BranchWord:
    if isinstance(word, BranchWord):
        return word
    if isinstance(word, str):
        return BranchWord(word)
    if isinstance(word, Sequence):
        return BranchWord("".join(word))
    raise DomainError(f"cannot interpret {word!r} as a branch word")


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with positive length."""

    lo: Scalar
    hi: Scalar

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"degenerate interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Scalar:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


# ---------------------------------------------------------------------------
# kernel and branch compositions
# ---------------------------------------------------------------------------

def u_map(t):
    """Increasing branch kernel on [0, 1/4], with values in [0, 1/2].

    Evaluated as 2t / (1 + sqrt(1 - 4t)), which is algebraically identical
    to 1/2 - sqrt(1 - 4t)/2 but free of cancellation near t = 1/4.
    """
    _check_unit_quarter(t)
    return 2.0 * t / (1.0 + _sqrt(1.0 - 4.0 * t))


def _check_unit_quarter(t):
    if isinstance(t, (float, int, DoubleDouble)):
        if t < 0.0 or t > 0.25:
            raise DomainError(f"u argument {t} outside [0, 1/4]")
    else:
        t = np.asarray(t)
        if np.any(t < 0.0) or np.any(t > 0.25):
            raise DomainError("u argument outside [0, 1/4]")


def _apply_letter(letter: str, t):
    v = u_map(t)
    return v if letter == "L" else 1.0 - v


def branch_composition(gamma: GammaSequence, word, t_inner, mode: str = "double"):
    """Evaluate g_1(gamma_1 * g_2(... gamma_{n-1} * g_n(t_inner))).

    Each g_k is u (letter L) or 1 - u (letter R); t_inner must lie in
    [0, gamma_n]. This is the common core of branch values, interval
    endpoints, and the separation quantities built from them.
    """
    w = _as_word(word)
    n = len(w)
    mode = gamma.resolve_mode(n, mode)
    g = _apply_letter(w.letters[n - 1], t_inner)
    for k in range(n - 1, 0, -1):
        g = _apply_letter(w.letters[k - 1], gamma.gamma(k, mode) * g)
    return g


def branch_value(gamma: GammaSequence, word, t, mode: str = "double"):
    """Value of the composed inverse branch addressed by ``word`` at t.

    t ranges over [-1, 1]; the innermost substitution is
    t_inner = gamma_n * (1 - t) / 2.
    """
    w = _as_word(word)
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"branch parameter {t} outside [-1, 1]")
    n = len(w)
    mode = gamma.resolve_mode(n, mode)
    gn = gamma.gamma(n, mode)
    t_inner = gn * (1.0 - t) * 0.5 if mode == "double" else gn * (1.0 - DoubleDouble(t)) * 0.5
    return branch_composition(gamma, w, t_inner, mode)


def basic_interval(gamma: GammaSequence, word, mode: str = "double") -> Interval:
    """The level-n basic interval addressed by a word of length n."""
    a = branch_value(gamma, word, 1.0, mode)
    b = branch_value(gamma, word, -1.0, mode)
    return Interval(a, b) if a < b else Interval(b, a)


def _all_compositions_float(gamma: GammaSequence, n: int, t_inner: float) -> np.ndarray:
    """Values of all 2^n letter choices at a common inner argument.

    Index bits read level-1 letter first (0 = L); the doubling shares the
    inner suffixes so the total work is O(2^n).
    """
    v = u_map(np.array([t_inner]))
    x = np.concatenate([v, 1.0 - v])
    for k in range(n - 1, 0, -1):
        v = u_map(float(gamma.value(k)) * x)
        x = np.concatenate([v, 1.0 - v])
    return x

def _all_compositions_dd(gamma: GammaSequence, n: int, t_inner) -> list:
    v = [u_map(t_inner)]
    x = v + [1.0 - y for y in v]
    for k in range(n - 1, 0, -1):
        gk = gamma.gamma(k, "dd")
        v = [u_map(gk * y) for y in x]
        x = v + [1.0 - y for y in v]
    return x


def all_branch_values(gamma: GammaSequence, n: int, t: float, mode: str = "double"):
    """branch_value over every word of length n, in word-bit order."""
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"branch parameter {t} outside [-1, 1]")
    mode = gamma.resolve_mode(n, mode)
    if mode == "dd":
        gn = gamma.gamma(n, "dd")
        return _all_compositions_dd(gamma, n, gn * (1.0 - DoubleDouble(t)) * 0.5)
    return _all_compositions_float(gamma, n, float(gamma.value(n)) * (1.0 - t) * 0.5)


def level_intervals(gamma: GammaSequence, n: int, mode: str = "double") -> list[Interval]:
    """All 2^n level-n basic intervals, sorted left to right."""
    if n == 0:
        return [Interval(0.0, 1.0)]
    left = all_branch_values(gamma, n, 1.0, mode)
    right = all_branch_values(gamma, n, -1.0, mode)
    ivs = [Interval(a, b) if a < b else Interval(b, a) for a, b in zip(left, right)]
    ivs.sort(key=lambda iv: float(iv.lo))
    return ivs


def level_gaps(gamma: GammaSequence, n: int, mode: str = "double") -> list[tuple]:
    """The 2^n open gaps removed inside the level-n parents.

    Derived from the level-(n+1) intervals rather than stored; entries are
    (lo, hi) pairs and may be degenerate (lo == hi) in the boundary case
    gamma_k = 1/4.
    """
    ivs = level_intervals(gamma, n + 1, mode)
    return [(ivs[2 * j].hi, ivs[2 * j + 1].lo) for j in range(2 ** n)]


def largest_gap(gamma: GammaSequence, n: int) -> float:
    """Length of the widest gap of the level-n set."""
    ivs = level_intervals(gamma, n)
    if len(ivs) == 1:
        return 0.0
    return max(float(ivs[i + 1].lo) - float(ivs[i].hi) for i in range(len(ivs) - 1))


# ---------------------------------------------------------------------------
# scale quantities
# ---------------------------------------------------------------------------

def delta(gamma: GammaSequence, s: int, mode: str = "double") -> Scalar:
    """The level-s scale delta_s = gamma_1 * ... * gamma_s (delta_0 = 1)."""
    return gamma.delta(s, mode)


def leftmost_length(gamma: GammaSequence, s: int, mode: str = "double") -> Scalar:
    """Length of the leftmost level-s basic interval (1 for s = 0).

    Equals the fully nested kernel value u(gamma_1 * u(... * u(gamma_s)))
    and satisfies delta_s <= l <= (pi^2/4) delta_s.
    """
    if s < 0:
        raise DomainError("level must be >= 0")
    mode = gamma.resolve_mode(s, mode)
    if s == 0:
        return DoubleDouble(1.0) if mode == "dd" else 1.0
    return branch_composition(gamma, BranchWord.leftmost(s), gamma.gamma(s, mode), mode)


def scale_rows(gamma: GammaSequence, s_max: int, mode: str = "double") -> list[tuple]:
    """(s, delta_s, l_{1,s}, ratio) rows for s = 0 .. s_max."""
    rows = []
    for s in range(s_max + 1):
        d = gamma.delta(s, gamma.resolve_mode(s, mode))
        l = leftmost_length(gamma, s, mode)
        rows.append((s, d, l, float(l) / float(d)))
    return rows
