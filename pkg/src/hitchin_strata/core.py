"""Exact arithmetic for divisors and weighted/filtered line bundle classes.

Marked points are opaque labels (optionally carrying an involution-partner
id); divisors are finitely supported integer maps, weight maps finitely
supported rational maps.  A FilteredClass is the canonical form of a
weighted line bundle (underlying degree, jumps in [0,1)): two weighted
presentations describe the same filtered bundle iff they normalize to the
same class.  All arithmetic is exact over `fractions.Fraction`; real
weights are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Mapping, Optional


# Marked point kinds.
EVEN_PLUS = "even-pair-plus"
EVEN_MINUS = "even-pair-minus"
ODD_FIXED = "odd-fixed"
PLAIN = "plain"

_KINDS = (EVEN_PLUS, EVEN_MINUS, ODD_FIXED, PLAIN)


@dataclass(frozen=True, order=True)
class MarkedPoint:
    """Opaque marked point; even-pair points carry the id of their partner."""

    id: str
    kind: str = PLAIN
    partner: Optional[str] = None

    def __hash__(self):
        return hash((self.id, self.kind, self.partner))

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown point kind {self.kind!r}")
        has_partner = self.partner is not None
        needs_partner = self.kind in (EVEN_PLUS, EVEN_MINUS)
        if has_partner != needs_partner:
            raise ValueError(
                f"point {self.id!r}: kind {self.kind!r} "
                f"{'requires' if needs_partner else 'forbids'} a partner id"
            )


@lru_cache(maxsize=None)
def even_pair(base_id: str) -> tuple[MarkedPoint, MarkedPoint]:
    """The two points over an even-order zero, partnered with each other."""
    plus = MarkedPoint(base_id + "+", EVEN_PLUS, base_id + "-")
    minus = MarkedPoint(base_id + "-", EVEN_MINUS, base_id + "+")
    return plus, minus


@lru_cache(maxsize=None)
def odd_point(base_id: str) -> MarkedPoint:
    """The single (involution-fixed) point over an odd-order zero."""
    return MarkedPoint(base_id, ODD_FIXED)


def _clean(items, zero):
    return {p: v for p, v in items if v != zero}


@dataclass(frozen=True)
class Divisor:
    """Finitely supported integer divisor on marked points."""

    coefficients: Mapping[MarkedPoint, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _clean(self.coefficients.items(), 0)
        )

    def __getitem__(self, p: MarkedPoint) -> int:
        return self.coefficients.get(p, 0)

    def support(self):
        return sorted(self.coefficients)

    def degree(self) -> int:
        return sum(self.coefficients.values())

    def is_effective(self) -> bool:
        return all(v >= 0 for v in self.coefficients.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self.coefficients)
        for p, v in other.coefficients.items():
            out[p] = out.get(p, 0) + v
        return Divisor(out)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -v for p, v in self.coefficients.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __le__(self, other: "Divisor") -> bool:
        points = set(self.coefficients) | set(other.coefficients)
        return all(self[p] <= other[p] for p in points)

    def weight_map(self) -> "WeightMap":
        """χ_D: the weight map with χ(p) = coefficient of p."""
        return WeightMap({p: Fraction(v) for p, v in self.coefficients.items()})

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(frozenset(self.coefficients.items()))


@dataclass(frozen=True)
class WeightMap:
    """Finitely supported rational weight map on marked points."""

    values: Mapping[MarkedPoint, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for p, v in self.values.items():
            if not isinstance(v, Fraction):
                v = Fraction(v)
            if v:
                vals[p] = v
        object.__setattr__(self, "values", vals)

    def __getitem__(self, p: MarkedPoint) -> Fraction:
        return self.values.get(p, Fraction(0))

    def support(self):
        return sorted(self.values)

    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def __add__(self, other: "WeightMap") -> "WeightMap":
        out = dict(self.values)
        for p, v in other.values.items():
            out[p] = out.get(p, Fraction(0)) + v
        return WeightMap(out)

    def __neg__(self) -> "WeightMap":
        return WeightMap({p: -v for p, v in self.values.items()})

    def __sub__(self, other: "WeightMap") -> "WeightMap":
        return self + (-other)

    def scale(self, s) -> "WeightMap":
        s = Fraction(s)
        return WeightMap({p: s * v for p, v in self.values.items()})

    def __eq__(self, other):
        return isinstance(other, WeightMap) and self.values == other.values

    def __hash__(self):
        return hash(frozenset(self.values.items()))


@dataclass(frozen=True)
class FilteredClass:
    """Canonical form of a weighted line bundle: degree + jumps in [0,1)."""

    underlying_degree: int
    jumps: Mapping[MarkedPoint, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        jumps = {p: Fraction(v) for p, v in self.jumps.items() if Fraction(v) != 0}
        for p, v in jumps.items():
            if not (0 <= v < 1):
                raise ValueError(f"jump {v} at {p.id!r} outside [0,1)")
        object.__setattr__(self, "jumps", jumps)

    def jump(self, p: MarkedPoint) -> Fraction:
        return self.jumps.get(p, Fraction(0))

    def is_trivial(self) -> bool:
        return self.underlying_degree == 0 and not self.jumps

    def __eq__(self, other):
        return (
            isinstance(other, FilteredClass)
            and self.underlying_degree == other.underlying_degree
            and self.jumps == other.jumps
        )

    def __hash__(self):
        return hash((self.underlying_degree, frozenset(self.jumps.items())))


def normalize(underlying_degree: int, chi: WeightMap | Mapping) -> FilteredClass:
    """Canonical form of the weighted bundle (L of given degree, χ).

    Each weight is reduced mod 1 to its jump and the integer parts are
    absorbed into the underlying degree, so that the total degree
    (underlying + Σ jumps) is unchanged.
    """
    if not isinstance(chi, WeightMap):
        chi = WeightMap(chi)
    shift = 0
    jumps = {}
    for p, v in chi.values.items():
        fl = floor(v)
        shift += fl
        if v != fl:
            jumps[p] = v - fl
    return FilteredClass(underlying_degree + shift, jumps)


def tensor(a: FilteredClass, b: FilteredClass) -> FilteredClass:
    """Tensor product of filtered classes: degrees and weights add."""
    chi = WeightMap(a.jumps) + WeightMap(b.jumps)
    return normalize(a.underlying_degree + b.underlying_degree, chi)


def degree(f: FilteredClass) -> Fraction:
    """Total degree: underlying degree plus the sum of the jumps."""
    return f.underlying_degree + sum(f.jumps.values(), Fraction(0))
