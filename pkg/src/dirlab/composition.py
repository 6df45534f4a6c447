"""Dirichlet energies of ``Phi o Ph`` and ``P(Phi o h)`` on the unit disk.

``D[Phi o Ph]`` has two independent evaluators:

* the volume route integrates ``Psi(u)**2 |grad u|**2`` in polar coordinates
  (Gauss-Legendre in a boundary-graded radius, trapezoid in angle);
* the boundary route evaluates
  ``1/2 iint (h(y) - h(x)) int_{h(x)}^{h(y)} Psi**2 * K(x, y)``
  with the exact disk kernel ``K``.

``D[P(Phi o h)]`` is the boundary energy of the composed samples.  The volume
route is the one reported as the left-hand side; the boundary route shares its
quadrature with the right-hand side and only serves as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import disk
from .disk import BoundaryFunction, HarmonicExtension
from .errors import DomainError, QuadratureError, ResolutionError
from .psi import NONNEGATIVE, PsiSpec

ROUTE_TOL = 1e-5
INEQUALITY_SLACK = 1e-6
OVERFLOW_THRESHOLD = 1e300


@dataclass(frozen=True)
class QuadratureConfig:
    radial_points: int = 384
    angular_points: int = 4096
    boundary_grid: int = 1024

    def __post_init__(self):
        if min(self.radial_points, self.angular_points, self.boundary_grid) < 1:
            raise ResolutionError("quadrature sizes must be positive")
        if self.angular_points & (self.angular_points - 1):
            raise ResolutionError("angular_points must be a power of two")


@dataclass(frozen=True)
class EnergyPair:
    lhs: float
    rhs: float
    ratio: float
    lhs_volume: float
    lhs_boundary: float
    constant: float = math.nan
    passed: bool | None = None

    @property
    def lhs_routes(self) -> tuple[float, float]:
        return self.lhs_volume, self.lhs_boundary

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "lhs_volume": self.lhs_volume,
            "lhs_boundary": self.lhs_boundary,
            "C": self.constant,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class TruncationRow:
    level: float
    lhs: float
    rhs: float


def _radial_rule(n: int):
    """Gauss-Legendre on [0, 1] pushed toward r = 1 by ``r = 1 - (1 - s)**2``."""
    s, w = np.polynomial.legendre.leggauss(n)
    s = (s + 1) / 2
    w = w / 2
    r = 1 - (1 - s) ** 2
    return r, w * 2 * (1 - s)


def _polar_fields(u: HarmonicExtension, radii: np.ndarray, m: int, shift: float = 0.0):
    """``u``, ``du/dr`` and ``(1/r) du/dtheta`` on a polar grid (rows = radii)."""
    f = u.fourier
    k = f.modes
    if k >= m // 2:
        raise ResolutionError(f"{m} angular points cannot resolve {k} modes")
    n = np.arange(1, k + 1)
    phase = np.exp(1j * n * shift)
    coef = (m / 2) * (f.an - 1j * f.bn) * phase
    rn = np.power(radii[:, None], n[None, :])
    dn = n[None, :] * np.power(radii[:, None], n[None, :] - 1)

    def synth(c):
        spec = np.zeros((len(radii), m // 2 + 1), dtype=complex)
        spec[:, 1:k + 1] = c
        return np.fft.irfft(spec, n=m, axis=1)

    vals = synth(rn * coef) + f.a0 / 2
    ur = synth(dn * coef)
    # (1/r) d/dtheta multiplies the complex coefficient by i n r**(n-1)
    ut = synth(1j * dn * coef)
    return vals, ur, ut


def data_range(h: BoundaryFunction) -> tuple[float, float]:
    return float(np.min(h.samples)), float(np.max(h.samples))


def energy_composed_volume(psi: PsiSpec, u: HarmonicExtension,
                           q: QuadratureConfig | None = None,
                           value_range: tuple[float, float] | None = None) -> float:
    """``int_disk Psi(u)**2 |grad u|**2`` by polar quadrature.

    ``value_range`` (by default the extrema of ``u`` on the boundary grid)
    bounds the values fed to ``Psi``, which is legitimate by the maximum
    principle and keeps roundoff from leaving a half-line domain.
    """
    q = q or QuadratureConfig()
    m = q.angular_points
    if value_range is None:
        edge = u.fourier.synthesize(m)
        value_range = (float(edge.min()), float(edge.max()))
    lo, hi = value_range
    if psi.domain == NONNEGATIVE and lo < 0:
        raise DomainError("data take negative values but Psi is declared on the half-line")
    radii, weights = _radial_rule(q.radial_points)
    for shift in (0.0, np.pi / m):
        vals, ur, ut = _polar_fields(u, radii, m, shift)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            weight = np.asarray(psi.psi(np.clip(vals, lo, hi)))
            dens = weight**2 * (ur**2 + ut**2)
        if np.all(np.isfinite(weight)) and not np.all(np.isfinite(dens)):
            raise QuadratureError("energy density exceeds overflow threshold")
        if np.all(np.isfinite(dens)):
            ring = dens.sum(axis=1) * (2 * np.pi / m)
            return float(np.sum(weights * radii * ring))
    raise QuadratureError("Psi is singular at quadrature nodes even after jittering the grid")


def energy_composed_boundary(psi: PsiSpec, h: BoundaryFunction, diagonal: str = "spectral") -> float:
    """``D[Phi o Ph]`` from the boundary double integral.

    For a Psi with a pole the diagonal uses centered differences of
    ``g = int Psi**2`` (which stays finite) instead of ``Psi(h)**2 h'``.
    """
    values = h.samples
    g = np.asarray(psi.sq_primitive(values))
    if psi.has_pole:
        diagonal = "centered"
        dh = disk.derivative(values, diagonal)
        return disk.boundary_form(values, g, dh, disk.derivative(g, diagonal))
    dh = disk.derivative(values, diagonal)
    with np.errstate(invalid="ignore"):
        dg = np.asarray(psi.psi(values)) ** 2 * dh
    bad = ~np.isfinite(dg)
    if np.any(bad):
        dg = np.where(bad, disk.derivative(g, diagonal), dg)
    return disk.boundary_form(values, g, dh, dg)


def energy_of_composed_data(psi: PsiSpec, h: BoundaryFunction, diagonal: str = "spectral") -> float:
    """``D[P(Phi o h)]``: boundary energy of the composed samples."""
    composed = np.asarray(psi.phi(h.samples), dtype=float)
    return disk.douglas_energy(composed, diagonal)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return math.nan


def energy_pair(psi: PsiSpec, h: BoundaryFunction, q: QuadratureConfig | None = None) -> EnergyPair:
    """Both sides of the comparison, with the two left-hand routes."""
    u = disk.extend(h)
    vol = energy_composed_volume(psi, u, q, data_range(h))
    bnd = energy_composed_boundary(psi, h)
    rhs = energy_of_composed_data(psi, h)
    for name, value in (("D[Phi o Ph]", vol), ("boundary D[Phi o Ph]", bnd), ("D[P(Phi o h)]", rhs)):
        if not abs(value) < OVERFLOW_THRESHOLD:
            # a finite grid cannot certify infinity, only report that it was left behind
            raise QuadratureError(f"{name} exceeds overflow threshold ({value!r})")
    return EnergyPair(vol, rhs, _ratio(vol, rhs), vol, bnd)


def routes_agree(pair: EnergyPair, tol: float = ROUTE_TOL) -> bool:
    return abs(pair.lhs_volume - pair.lhs_boundary) <= tol * max(1.0, abs(pair.lhs_volume))


def verify_theorem1(psi: PsiSpec, h: BoundaryFunction, constant: float,
                    q: QuadratureConfig | None = None) -> EnergyPair:
    """Check ``D[P(Phi o h)] <= D[Phi o Ph] <= C D[P(Phi o h)]``.

    Raises :class:`QuadratureError` when the two left-hand routes disagree,
    which signals an under-resolved grid rather than a failed inequality.
    """
    pair = energy_pair(psi, h, q)
    if not routes_agree(pair):
        raise QuadratureError(
            f"volume ({pair.lhs_volume!r}) and boundary ({pair.lhs_boundary!r}) "
            "routes disagree; refine the grids"
        )
    tol = 1 + INEQUALITY_SLACK
    # absolute floor keeps identically-zero energies from failing on roundoff
    floor = 1e-12 * max(1.0, pair.lhs, pair.rhs)
    upper = pair.lhs <= constant * pair.rhs * tol + floor
    lower = pair.rhs <= pair.lhs * tol + floor
    return EnergyPair(pair.lhs, pair.rhs, pair.ratio, pair.lhs_volume, pair.lhs_boundary,
                      float(constant), bool(upper and lower))


def truncation_sweep(psi: PsiSpec, h: BoundaryFunction, levels,
                     q: QuadratureConfig | None = None) -> list[TruncationRow]:
    """Energies with ``Psi`` clamped at each level (levels increasing)."""
    levels = list(levels)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("truncation levels must be strictly increasing")
    u = disk.extend(h)
    rng = data_range(h)
    rows = []
    for level in levels:
        clamped = psi.truncated(level)
        lhs = energy_composed_volume(clamped, u, q, rng)
        rhs = energy_of_composed_data(clamped, h)
        rows.append(TruncationRow(float(level), lhs, rhs))
    return rows
