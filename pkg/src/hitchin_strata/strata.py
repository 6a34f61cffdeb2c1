"""Zero profiles, σ-divisor enumeration and stratum invariants.

A profile records the genus and the zero multiplicities of a quadratic
differential (even multiplicities come in a separate list from odd ones).
The double cover branched at the odd-order zeros carries one marked-point
pair over each even zero and one fixed point over each odd zero.  Strata
of the singular fiber are labelled by σ-divisors: per even zero a
coefficient 0 ≤ d ≤ m/2 on both pair points, per odd zero an even
coefficient 0 ≤ d′ ≤ n−1 on the fixed point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .core import Divisor, MarkedPoint, even_pair, odd_point

IRREDUCIBLE = "irreducible"
REDUCIBLE = "reducible"


class ProfileError(ValueError):
    """Raised with the full list of violated profile invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ZeroProfile:
    genus: int
    even_zeros: tuple[int, ...]
    odd_zeros: tuple[int, ...]
    flavor: str = IRREDUCIBLE

    @property
    def r1(self) -> int:
        return len(self.even_zeros)

    @property
    def r2(self) -> int:
        return len(self.odd_zeros)

    def even_points(self, i: int) -> tuple[MarkedPoint, MarkedPoint]:
        return even_pair(f"e{i}")

    def odd_point(self, j: int) -> MarkedPoint:
        return odd_point(f"o{j}")

    def lambda_divisor(self) -> Divisor:
        """Λ on the cover: (m/2) on each pair point, n on each fixed point."""
        coeffs = {}
        for i, m in enumerate(self.even_zeros):
            plus, minus = self.even_points(i)
            coeffs[plus] = m // 2
            coeffs[minus] = m // 2
        for j, n in enumerate(self.odd_zeros):
            coeffs[self.odd_point(j)] = n
        return Divisor(coeffs)


def validate_profile(genus, even_zeros, odd_zeros, flavor=IRREDUCIBLE) -> ZeroProfile:
    """Check all profile invariants, reporting every violation at once."""
    violations = []
    if not isinstance(genus, int) or genus < 2:
        violations.append(f"genus must be an integer >= 2, got {genus}")
    if flavor not in (IRREDUCIBLE, REDUCIBLE):
        violations.append(f"unknown flavor {flavor!r}")
    even_zeros = tuple(even_zeros)
    odd_zeros = tuple(odd_zeros)
    for m in even_zeros:
        if not isinstance(m, int) or m < 2 or m % 2 != 0:
            violations.append(f"even multiplicity {m} must be an even integer >= 2")
    for n in odd_zeros:
        if not isinstance(n, int) or n < 1 or n % 2 != 1:
            violations.append(f"odd multiplicity {n} must be an odd integer >= 1")
    if isinstance(genus, int) and not any("multiplicity" in v for v in violations):
        total = sum(even_zeros) + sum(odd_zeros)
        if total != 4 * genus - 4:
            violations.append(
                f"multiplicities sum to {total}, expected 4g-4 = {4 * genus - 4}"
            )
    if flavor == REDUCIBLE and odd_zeros:
        violations.append("reducible flavor requires all zeros of even order")
    if violations:
        raise ProfileError(violations)
    return ZeroProfile(genus, even_zeros, odd_zeros, flavor)


@dataclass(frozen=True)
class SigmaDivisor:
    """Stratum label: one coefficient per even zero, one per odd zero."""

    even_coeffs: tuple[int, ...]
    odd_coeffs: tuple[int, ...]

    def degree(self) -> int:
        return 2 * sum(self.even_coeffs) + sum(self.odd_coeffs)

    def as_divisor(self, profile: ZeroProfile) -> Divisor:
        coeffs = {}
        for i, d in enumerate(self.even_coeffs):
            plus, minus = profile.even_points(i)
            coeffs[plus] = d
            coeffs[minus] = d
        for j, dp in enumerate(self.odd_coeffs):
            coeffs[profile.odd_point(j)] = dp
        return Divisor(coeffs)


def check_sigma_divisor(profile: ZeroProfile, D: SigmaDivisor) -> None:
    if len(D.even_coeffs) != profile.r1 or len(D.odd_coeffs) != profile.r2:
        raise ValueError("coefficient lists do not match the profile's zeros")
    for d, m in zip(D.even_coeffs, profile.even_zeros):
        if not 0 <= d <= m // 2:
            raise ValueError(f"even coefficient {d} outside [0, {m // 2}]")
    for dp, n in zip(D.odd_coeffs, profile.odd_zeros):
        if dp % 2 != 0 or not 0 <= dp <= n - 1:
            raise ValueError(f"odd coefficient {dp} not an even integer in [0, {n - 1}]")


def sigma_divisor_count(profile: ZeroProfile) -> int:
    """Closed-form number of σ-divisors."""
    count = 1
    for m in profile.even_zeros:
        count *= m // 2 + 1
    for n in profile.odd_zeros:
        count *= (n + 1) // 2
    return count


def enumerate_sigma_divisors(profile: ZeroProfile) -> list[SigmaDivisor]:
    """All σ-divisors for an irreducible profile, lexicographically ordered."""
    if profile.flavor != IRREDUCIBLE:
        raise ValueError("σ-divisor strata are defined for irreducible profiles")
    even_ranges = [range(m // 2 + 1) for m in profile.even_zeros]
    odd_ranges = [range(0, n, 2) for n in profile.odd_zeros]
    out = [
        SigmaDivisor(evens, odds)
        for evens in itertools.product(*even_ranges)
        for odds in itertools.product(*odd_ranges)
    ]
    assert len(out) == sigma_divisor_count(profile)
    return out


@dataclass(frozen=True)
class StratumInfo:
    dim: int
    k1: Optional[int]
    k2: Optional[int]
    n_ss: int
    deg_D: int
    double_cover: bool = False


def stratum_info(profile: ZeroProfile, D: SigmaDivisor) -> StratumInfo:
    """Dimension and fibration exponents of the stratum labelled by D.

    For profiles with only even zeros the fibration exponents come from a
    double branched cover of the stratum; only the dimension is reported
    and `double_cover` is flagged.
    """
    check_sigma_divisor(profile, D)
    g = profile.genus
    deg_D = D.degree()
    if deg_D % 2 != 0:
        raise AssertionError("σ-divisor degree must be even")
    dim = 3 * g - 3 - deg_D // 2
    # Zeros where D saturates Λ (d = m/2; d' = n is impossible for odd zeros).
    n_ss = sum(1 for d, m in zip(D.even_coeffs, profile.even_zeros) if d == m // 2)
    n_ss += sum(1 for dp, n in zip(D.odd_coeffs, profile.odd_zeros) if dp == n)
    if profile.r2 == 0:
        return StratumInfo(dim, None, None, n_ss, deg_D, double_cover=True)
    if profile.r2 % 2 != 0:
        raise AssertionError("r2 must be even")
    k1 = profile.r1 - n_ss
    twice_k2 = 2 * (2 * g - 2) - deg_D - 2 * profile.r1 + 2 * n_ss - profile.r2
    if twice_k2 % 2 != 0:
        raise AssertionError("k2 is not an integer")
    k2 = twice_k2 // 2
    return StratumInfo(dim, k1, k2, n_ss, deg_D)


def normalization_genus(profile: ZeroProfile) -> int:
    """Genus of the normalized double cover: 2g - 1 + r2/2."""
    if profile.flavor != IRREDUCIBLE:
        raise ValueError("normalization genus is computed for irreducible profiles")
    if profile.r2 % 2 != 0:
        raise AssertionError("r2 must be even")
    return 2 * profile.genus - 1 + profile.r2 // 2


def local_delta(multiplicity: int) -> int:
    """δ-invariant of the cover singularity over a zero of this order."""
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    if multiplicity % 2 == 0:
        return multiplicity // 2
    return (multiplicity - 1) // 2
