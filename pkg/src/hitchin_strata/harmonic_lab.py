"""Numerical harmonic-metric lab on a flat square torus.

The log-metric potential rho of a degree-zero weighted line bundle with
trivial underlying bundle solves the Poisson equation

    laplacian(rho) = 4*pi * sum_j chi_j * delta_eps(p_j),

solvable on the torus exactly because the weights sum to zero.  Point
sources are mollified by a smooth bump of radius eps; near a puncture the
potential behaves like 2*chi*log r, so the local weight is recovered as
(d rho / d log r) / 2 measured outside the mollification zone.  The
solver is spectral (FFT, zero mode dropped) and gauge-fixed to mean zero.

The model geometry is deliberately a torus rather than a higher-genus
surface: the PDE content (Poisson with balanced point sources) does not
see the genus, and the torus admits an exact spectral inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class HarmonicError(ValueError):
    pass


class DegreeObstruction(HarmonicError):
    """Weights do not sum to zero: no harmonic metric in this gauge."""


@dataclass(frozen=True)
class Puncture:
    x: float
    y: float
    weight: Fraction


@dataclass(frozen=True)
class TorusConfig:
    grid: int
    punctures: tuple[Puncture, ...]
    epsilon: float
    side: float = 1.0

    def __post_init__(self):
        if self.grid < 4 or self.grid & (self.grid - 1):
            raise HarmonicError("grid must be a power of two >= 4")
        if self.side <= 0:
            raise HarmonicError("side must be positive")
        total = sum((Fraction(p.weight) for p in self.punctures), Fraction(0))
        if total != 0:
            raise DegreeObstruction(f"weights sum to {total}, expected 0")
        seen = {(p.x % self.side, p.y % self.side) for p in self.punctures}
        if len(seen) != len(self.punctures):
            raise HarmonicError("punctures must be pairwise distinct")
        if self.epsilon < 2 * self.spacing:
            raise HarmonicError(
                f"epsilon {self.epsilon} below twice the grid spacing {self.spacing}"
            )

    @property
    def spacing(self) -> float:
        return self.side / self.grid


def _wrapped_r2(config: TorusConfig, px: float, py: float):
    g, side = config.grid, config.side
    coords = np.arange(g) * config.spacing
    dx = (coords - px + side / 2) % side - side / 2
    dy = (coords - py + side / 2) % side - side / 2
    return dx[None, :] ** 2 + dy[:, None] ** 2  # [row=y][col=x]


def _bump(config: TorusConfig, px: float, py: float):
    """Smooth unit-mass bump of radius epsilon centered at (px, py)."""
    r2 = _wrapped_r2(config, px, py) / config.epsilon**2
    vals = np.zeros_like(r2)
    inside = r2 < 1.0
    vals[inside] = np.exp(1.0 / (r2[inside] - 1.0))
    mass = vals.sum() * config.spacing**2
    if mass <= 0:
        raise HarmonicError("mollifier resolved to zero mass")
    return vals / mass


def _source(config: TorusConfig):
    rhs = np.zeros((config.grid, config.grid))
    for p in config.punctures:
        rhs += (4 * np.pi * float(p.weight)) * _bump(config, p.x, p.y)
    return rhs - rhs.mean()


def _laplacian_symbol(config: TorusConfig):
    k = 2 * np.pi * np.fft.fftfreq(config.grid, d=config.spacing)
    return -(k[None, :] ** 2 + k[:, None] ** 2)


@dataclass(frozen=True)
class TorusField:
    config: TorusConfig
    values: np.ndarray  # rho, indexed [y][x], mean zero
    source: np.ndarray  # the mollified right-hand side
    rho_hat: np.ndarray  # spectral representation of rho

    def residual(self) -> float:
        """Max-norm residual of the discrete equation lap(rho) = source,
        with the Laplacian applied to the solution's spectral form (the
        basis in which the equation is posed)."""
        lap = np.fft.ifft2(_laplacian_symbol(self.config) * self.rho_hat).real
        return float(np.abs(lap - self.source).max())

    def interpolate(self, xs, ys):
        """Periodic bilinear interpolation of rho at arbitrary points."""
        g, h = self.config.grid, self.config.spacing
        fx = np.asarray(xs) / h
        fy = np.asarray(ys) / h
        ix = np.floor(fx).astype(int)
        iy = np.floor(fy).astype(int)
        tx = fx - ix
        ty = fy - iy
        ix %= g
        iy %= g
        ix1 = (ix + 1) % g
        iy1 = (iy + 1) % g
        v = self.values
        return (
            v[iy, ix] * (1 - tx) * (1 - ty)
            + v[iy, ix1] * tx * (1 - ty)
            + v[iy1, ix] * (1 - tx) * ty
            + v[iy1, ix1] * tx * ty
        )


def solve_harmonic(config: TorusConfig) -> TorusField:
    """Spectral solve of lap(rho) = 4*pi*sum chi_j*delta_eps(p_j), mean zero."""
    rhs = _source(config)
    lap = _laplacian_symbol(config)
    rhs_hat = np.fft.fft2(rhs)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho_hat = np.where(lap != 0, rhs_hat / lap, 0.0)
    rho = np.fft.ifft2(rho_hat).real
    rho -= rho.mean()
    field = TorusField(config, rho, rhs, rho_hat)
    assert abs(rho.mean()) <= 1e-12
    return field


def _min_other_distance(config: TorusConfig, j: int) -> float:
    p = config.punctures[j]
    side = config.side
    best = side / 2
    for i, q in enumerate(config.punctures):
        if i == j:
            continue
        dx = (q.x - p.x + side / 2) % side - side / 2
        dy = (q.y - p.y + side / 2) % side - side / 2
        best = min(best, float(np.hypot(dx, dy)))
    return best


def local_exponent(
    field: TorusField,
    j: int,
    r_in: float | None = None,
    r_out: float | None = None,
    n_radii: int = 16,
    n_angles: int = 256,
) -> float:
    """Fitted local weight at puncture j: slope of the circle-averaged
    potential against log r over an annulus outside the mollifier, halved.

    Circle averaging removes the harmonic contribution of every other
    puncture exactly (mean value property), so only discretization error
    remains.
    """
    config = field.config
    p = config.punctures[j]
    dmin = _min_other_distance(config, j)
    if r_in is None:
        r_in = 2 * config.epsilon
    if r_out is None:
        r_out = 0.4 * dmin
    if not (config.epsilon < r_in < r_out < dmin / 2):
        raise HarmonicError(
            f"annulus ({r_in}, {r_out}) violates eps={config.epsilon}, "
            f"half-separation {dmin / 2}"
        )
    radii = np.geomspace(r_in, r_out, n_radii)
    theta = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    avgs = [
        field.interpolate(p.x + r * np.cos(theta), p.y + r * np.sin(theta)).mean()
        for r in radii
    ]
    slope = np.polyfit(np.log(radii), avgs, 1)[0]
    return float(slope / 2)


@dataclass(frozen=True)
class MergeReport:
    separations: tuple[float, ...]
    distances: tuple[float, ...]
    merge_point: tuple[float, float]
    compact_radius: float


def merge_experiment(
    config: TorusConfig,
    pair: tuple[int, int],
    separations,
    compact_radius: float = 0.25,
) -> MergeReport:
    """Bring two punctures together and compare against the merged-weight
    solution on a compact set away from the merge point.

    The two punctures of `config` selected by `pair` define the merge
    point (their midpoint) and approach direction; at separation t they
    sit at midpoint +/- (t/2) along that direction.  The reference field
    has a single puncture of the combined weight at the midpoint (or none
    if the weights cancel).  Reported per t: sup |rho_t - rho_merged| over
    grid points at torus distance >= compact_radius from the merge point.
    """
    i, j = pair
    a, b = config.punctures[i], config.punctures[j]
    side = config.side
    dx = (b.x - a.x + side / 2) % side - side / 2
    dy = (b.y - a.y + side / 2) % side - side / 2
    dist = float(np.hypot(dx, dy))
    if dist == 0:
        raise HarmonicError("merging punctures must start separated")
    ux, uy = dx / dist, dy / dist
    mx = (a.x + dx / 2) % side
    my = (a.y + dy / 2) % side
    others = tuple(
        q for idx, q in enumerate(config.punctures) if idx not in (i, j)
    )
    merged_weight = Fraction(a.weight) + Fraction(b.weight)
    merged_punctures = others
    if merged_weight != 0:
        merged_punctures = others + (Puncture(mx, my, merged_weight),)
    merged_cfg = TorusConfig(config.grid, merged_punctures, config.epsilon, side)
    rho_merged = solve_harmonic(merged_cfg).values

    mask = _wrapped_r2(config, mx, my) >= compact_radius**2
    if not mask.any():
        raise HarmonicError("compact set is empty")

    distances = []
    for t in separations:
        if t <= 0:
            raise HarmonicError("separations must be positive")
        pa = Puncture((mx - ux * t / 2) % side, (my - uy * t / 2) % side, a.weight)
        pb = Puncture((mx + ux * t / 2) % side, (my + uy * t / 2) % side, b.weight)
        cfg_t = TorusConfig(config.grid, others + (pa, pb), config.epsilon, side)
        rho_t = solve_harmonic(cfg_t).values
        distances.append(float(np.abs((rho_t - rho_merged)[mask]).max()))
    return MergeReport(tuple(float(t) for t in separations), tuple(distances), (mx, my), compact_radius)
