"""Limit weight maps on the irreducible singular fiber.

For a stratum labelled by a σ-divisor D, a ray of Higgs bundles over the
stratum has one "main" limit with weight map ½χ_D on the normalized cover,
plus one extra branch limit χ_{D_v} for every σ-asymmetric splitting
D_v + σ*D_v = D.  Two presentations of each limit are carried: the
Prym-normalized one (weights relative to the torsion-free pullback) and
its Λ-twist (subtract ½χ_Λ).  All distinctness checks compare raw weight
maps in the Prym-normalized presentation on the fixed underlying bundle;
normalized FilteredClass values are exposed for degree bookkeeping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import FilteredClass, WeightMap, normalize
from .strata import (
    IRREDUCIBLE,
    SigmaDivisor,
    ZeroProfile,
    check_sigma_divisor,
    enumerate_sigma_divisors,
)


@dataclass(frozen=True)
class Splitting:
    """A decomposition D_v + σ*D_v = D: (c+, c−) per even zero with
    c+ + c− = d; at odd zeros the coefficient is forced to d′/2."""

    even_parts: tuple[tuple[int, int], ...]
    odd_parts: tuple[int, ...]

    @property
    def symmetric(self) -> bool:
        return all(cp == cm for cp, cm in self.even_parts)

    def sigma_image(self) -> "Splitting":
        return Splitting(
            tuple((cm, cp) for cp, cm in self.even_parts), self.odd_parts
        )


def enumerate_splittings(profile: ZeroProfile, D: SigmaDivisor) -> list[Splitting]:
    """All N splittings of D, ordered with c+ descending per even zero."""
    check_sigma_divisor(profile, D)
    per_zero = [[(d - c, c) for c in range(d + 1)] for d in D.even_coeffs]
    odd_parts = tuple(dp // 2 for dp in D.odd_coeffs)
    return [Splitting(evens, odd_parts) for evens in itertools.product(*per_zero)]


def count_limits(profile: ZeroProfile, D: SigmaDivisor) -> tuple[int, int]:
    """Closed-form counts: N = Π(d+1) splittings; n of them asymmetric,
    with n = N when some d is odd and n = N−1 otherwise."""
    if profile.flavor != IRREDUCIBLE:
        raise ValueError("limit counts are defined for irreducible profiles")
    check_sigma_divisor(profile, D)
    N = 1
    for d in D.even_coeffs:
        N *= d + 1
    n = N if any(d % 2 == 1 for d in D.even_coeffs) else N - 1
    return N, n


@dataclass(frozen=True)
class LimitWeights:
    """One limit, in both presentations.

    `prym` is the weight map on the torsion-free pullback (Prym-normalized
    presentation); `twisted` subtracts ½χ_Λ.  `cls_prym` / `cls_twisted`
    are the corresponding normalized classes over underlying degree 0.
    """

    prym: WeightMap
    twisted: WeightMap

    @property
    def cls_prym(self) -> FilteredClass:
        return normalize(0, self.prym)

    @property
    def cls_twisted(self) -> FilteredClass:
        return normalize(0, self.twisted)


@lru_cache(maxsize=None)
def _half_lambda(profile: ZeroProfile) -> WeightMap:
    return profile.lambda_divisor().weight_map().scale(Fraction(1, 2))


def theta_weights(profile: ZeroProfile, D: SigmaDivisor) -> LimitWeights:
    """Main limit: ½χ_D in the Prym-normalized presentation, i.e. weight
    ½(d − m/2) at each pair point and ½(d′ − n) at each fixed point after
    the Λ-twist."""
    check_sigma_divisor(profile, D)
    prym = D.as_divisor(profile).weight_map().scale(Fraction(1, 2))
    return LimitWeights(prym, prym - _half_lambda(profile))


def branch_weights(profile: ZeroProfile, D: SigmaDivisor, s: Splitting) -> LimitWeights:
    """Branch limit attached to a splitting: weight c± at the pair points
    and d′/2 at the fixed points (Prym-normalized presentation)."""
    check_sigma_divisor(profile, D)
    if len(s.even_parts) != profile.r1 or any(
        cp + cm != d or cp < 0 or cm < 0
        for (cp, cm), d in zip(s.even_parts, D.even_coeffs)
    ):
        raise ValueError("splitting does not decompose D")
    values = {}
    for i, (cp, cm) in enumerate(s.even_parts):
        plus, minus = profile.even_points(i)
        values[plus] = Fraction(cp)
        values[minus] = Fraction(cm)
    for j, half in enumerate(s.odd_parts):
        values[profile.odd_point(j)] = Fraction(half)
    prym = WeightMap(values)
    return LimitWeights(prym, prym - _half_lambda(profile))


@dataclass(frozen=True)
class LimitSet:
    main: LimitWeights
    branches: tuple[LimitWeights, ...]
    N: int
    n: int

    def all_limits(self) -> tuple[LimitWeights, ...]:
        return (self.main,) + self.branches


class LimitCollisionError(AssertionError):
    """Two limits coincided as weight maps; this would falsify the branch
    count and is treated as a bug, not deduplicated away."""


def limit_set(profile: ZeroProfile, D: SigmaDivisor) -> LimitSet:
    """The n+1 pairwise-distinct limits of the stratum labelled by D."""
    N, n = count_limits(profile, D)
    main = theta_weights(profile, D)
    branches = tuple(
        branch_weights(profile, D, s)
        for s in enumerate_splittings(profile, D)
        if not s.symmetric
    )
    if len(branches) != n:
        raise LimitCollisionError(
            f"expected {n} asymmetric splittings, found {len(branches)}"
        )
    seen = {main.prym}
    for b in branches:
        if b.prym in seen:
            raise LimitCollisionError(f"colliding limit weight map {b.prym}")
        seen.add(b.prym)
    return LimitSet(main, branches, N, n)


@dataclass(frozen=True)
class IrreducibleVerdict:
    continuous: bool
    witnesses: tuple[SigmaDivisor, ...]


def continuity_verdict_irreducible(profile: ZeroProfile) -> IrreducibleVerdict:
    """Continuous iff the differential has no even-order zero; otherwise
    every stratum with a branch limit (n_D > 0) witnesses discontinuity."""
    if profile.flavor != IRREDUCIBLE:
        raise ValueError("irreducible verdict requires an irreducible profile")
    if profile.r1 == 0:
        return IrreducibleVerdict(True, ())
    witnesses = tuple(
        D
        for D in enumerate_sigma_divisors(profile)
        if count_limits(profile, D)[1] > 0
    )
    assert witnesses, "even zero present but no witness stratum"
    return IrreducibleVerdict(False, witnesses)
