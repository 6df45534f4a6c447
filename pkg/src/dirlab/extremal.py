"""Step/ramp boundary data and the sharpness experiment.

The data equal ``a`` on an arc, ``b`` at arc-length distance ``>= eps`` from
it, and interpolate linearly in the distance on the two transition bands.  As
``eps -> 0`` both boundary energies diverge like ``log(1/eps)``, driven by the
pairs (arc, far side); the ratio of the two sides therefore tends to the
interval ratio ``(b - a) int_a^b Psi**2 / (int_a^b Psi)**2``.

Energies are computed with the same trapezoid rule as
:func:`dirlab.composition.energy_composed_boundary` (centered-difference
diagonal, which vanishes wherever the data are locally constant), split by
node class:

* ``1``: both nodes in the transition bands;
* ``2``: exactly one node in the bands (both orders);
* ``3``: one node on the arc, the other on the far side (both orders).

Pairs inside the arc or inside the far side contribute nothing.  Rows touching
the bands are summed directly; the arc/far-side block only needs the kernel
summed over index differences, obtained from an FFT pair count.  The cost per
evaluation is O(bands * M + M log M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import disk
from .errors import DomainError, ResolutionError, SpecError
from .psi import PsiSpec

TWO_PI = 2 * math.pi
MIN_RAMP_NODES = 8
_ROW_BLOCK = 16
_SNAP = 1e-12


@dataclass(frozen=True)
class StepRampData:
    a: float
    b: float
    epsilon: float
    arc: tuple[float, float] = (0.0, math.pi)

    def __post_init__(self):
        start, end = self.arc
        length = end - start
        if not 0 < length < TWO_PI:
            raise SpecError(f"arc {self.arc} must have length in (0, 2 pi)")
        if self.a == self.b:
            raise SpecError("step/ramp data need a != b")
        gap = TWO_PI - length
        if not 0 < self.epsilon < gap / 2:
            raise SpecError(f"epsilon must lie in (0, {gap / 2}), got {self.epsilon}")

    def distance(self, theta) -> np.ndarray:
        """Arc-length distance from ``theta`` to the closed arc."""
        start, end = self.arc
        rel = np.mod(np.asarray(theta) - start, TWO_PI)
        length = end - start
        past = rel - length
        return np.where(rel <= length, 0.0, np.minimum(past, TWO_PI - rel))

    def values(self, theta) -> np.ndarray:
        d = self.distance(theta)
        # snap roundoff so that nodes on the band edges take the exact plateau values
        d = np.where(np.abs(d - self.epsilon) < _SNAP, self.epsilon, np.where(d < _SNAP, 0.0, d))
        ramp = self.a + (self.b - self.a) * (d / self.epsilon)
        return np.where(d >= self.epsilon, self.b, np.where(d <= 0, self.a, ramp))


@dataclass(frozen=True)
class EnergyParts:
    I1: float
    I2: float
    I3: float
    J1: float
    J2: float
    J3: float

    @property
    def lhs(self) -> float:
        return self.I1 + self.I2 + self.I3

    @property
    def rhs(self) -> float:
        return self.J1 + self.J2 + self.J3


@dataclass(frozen=True)
class ExtremalSweepRow:
    epsilon: float
    grid: int
    lhs: float
    rhs: float
    ratio: float
    diagnostics: EnergyParts

    CSV_COLUMNS = ("epsilon", "M", "lhs", "rhs", "ratio", "I1", "I2", "I3", "J1", "J2", "J3")

    def csv_values(self) -> tuple:
        d = self.diagnostics
        return (self.epsilon, self.grid, self.lhs, self.rhs, self.ratio,
                d.I1, d.I2, d.I3, d.J1, d.J2, d.J3)


@dataclass(frozen=True)
class Extrapolation:
    intercept: float
    slope: float
    residual: float
    monotone: bool
    xs: tuple[float, ...] = field(default=(), repr=False)


def ramp_nodes(epsilon: float, m: int) -> float:
    return epsilon * m / TWO_PI


def make_step_ramp(spec: StepRampData, m: int) -> disk.BoundaryFunction:
    """Sample the data on ``m`` uniform nodes (every ramp spans >= 8 cells)."""
    if ramp_nodes(spec.epsilon, m) < MIN_RAMP_NODES:
        raise ResolutionError(
            f"eps={spec.epsilon:g} spans only {ramp_nodes(spec.epsilon, m):.2f} cells of a "
            f"{m}-node grid (need {MIN_RAMP_NODES})"
        )
    return disk.decompose(spec.values(disk.nodes(m)))


def default_grid(epsilon: float) -> int:
    """``max(256, next power of two >= 64 * 2 pi / eps)``, capped at the grid limit."""
    want = 64 * TWO_PI / epsilon
    m = max(256, 1 << max(0, math.ceil(math.log2(want))))
    return min(m, disk.max_grid_size())


def node_classes(samples: np.ndarray, a: float, b: float):
    """Masks (arc, bands, far side).

    A node belongs to the arc (far side) when it and both neighbours equal
    ``a`` (``b``); everything else is band.  The centered derivative is then
    exactly zero off the bands.
    """
    prev, nxt = np.roll(samples, 1), np.roll(samples, -1)
    arc = (samples == a) & (prev == a) & (nxt == a)
    far = (samples == b) & (prev == b) & (nxt == b)
    band = ~(arc | far)
    return arc, band, far


def cross_kernel_sum(mask_x: np.ndarray, mask_y: np.ndarray) -> float:
    """``sum_{x in X, y in Y, x != y} 1 / sin(pi (x - y) / M)**2`` for index masks."""
    m = len(mask_x)
    fx = np.fft.rfft(mask_x.astype(float))
    fy = np.fft.rfft(mask_y.astype(float))
    counts = np.rint(np.fft.irfft(np.conj(fx) * fy, n=m))
    w = disk.kernel_weights(m)
    nz = np.nonzero(counts)[0]
    return math.fsum(w[nz] * counts[nz])


def _band_rows(f, g, rows, m):
    """Off-diagonal sums over pairs with the first node in ``rows``.

    Returns (sum over second node in the bands, sum over second node elsewhere).
    """
    w = disk.kernel_weights(m)
    band_mask = np.zeros(m, dtype=bool)
    band_mask[rows] = True
    inner = outer = 0.0
    j = np.arange(m)
    for start in range(0, len(rows), _ROW_BLOCK):
        r = rows[start:start + _ROW_BLOCK]
        terms = w[(j[None, :] - r[:, None]) % m] * (f[None, :] - f[r][:, None]) * (g[None, :] - g[r][:, None])
        inner += float(np.sum(terms[:, band_mask]))
        outer += float(np.sum(terms[:, ~band_mask]))
    return inner, outer


def decompose_energy(psi: PsiSpec, spec: StepRampData, m: int) -> EnergyParts:
    """Split both boundary energies of the step/ramp data by node class."""
    h = make_step_ramp(spec, m).samples
    disk.check_boundary_grid(m)
    arc, band, far = node_classes(h, spec.a, spec.b)
    if not arc.any() or not far.any():
        raise ResolutionError("grid does not resolve the arc and its complement")
    rows = np.nonzero(band)[0]
    scale = (TWO_PI / m) ** 2 / (8 * math.pi)

    sq = np.asarray(psi.sq_primitive(h), dtype=float)
    composed = np.asarray(psi.phi(h), dtype=float)
    dh = disk.centered_derivative(h)
    with np.errstate(invalid="ignore"):
        dsq = np.asarray(psi.psi(h)) ** 2 * dh
    dsq = np.where(np.isfinite(dsq), dsq, disk.centered_derivative(sq))
    dcomp = disk.centered_derivative(composed)

    i_in, i_out = _band_rows(h, sq, rows, m)
    j_in, j_out = _band_rows(composed, composed, rows, m)
    i_diag = 4.0 * float(np.sum(dh[rows] * dsq[rows]))
    j_diag = 4.0 * float(np.sum(dcomp[rows] ** 2))

    block = cross_kernel_sum(arc, far)
    jump = spec.b - spec.a
    i3 = 2 * jump * float(psi.int_sq(spec.a, spec.b)) * block
    j3 = 2 * float(psi.phi(spec.b) - psi.phi(spec.a)) ** 2 * block
    return EnergyParts(
        I1=scale * (i_in + i_diag),
        I2=scale * 2 * i_out,
        I3=scale * i3,
        J1=scale * (j_in + j_diag),
        J2=scale * 2 * j_out,
        J3=scale * j3,
    )


def sweep(psi: PsiSpec, a: float, b: float, eps_ladder, arc=(0.0, math.pi),
          grid_rule=default_grid) -> list[ExtremalSweepRow]:
    """One row per ``eps`` (ladder decreasing), energies from the boundary route."""
    ladder = [float(e) for e in eps_ladder]
    if any(e2 >= e1 for e1, e2 in zip(ladder, ladder[1:])):
        raise SpecError("epsilon ladder must be strictly decreasing")
    rows = []
    for eps in ladder:
        spec = StepRampData(a, b, eps, tuple(arc))
        m = grid_rule(eps)
        parts = decompose_energy(psi, spec, m)
        lhs, rhs = parts.lhs, parts.rhs
        ratio = lhs / rhs if rhs > 0 else math.nan
        rows.append(ExtremalSweepRow(eps, m, lhs, rhs, ratio, parts))
    return rows


def geometric_ladder(first: float, last: float) -> list[float]:
    """Halving ladder from ``first`` down to ``last`` inclusive."""
    out = [first]
    while out[-1] / 2 >= last * (1 - 1e-12):
        out.append(out[-1] / 2)
    return out


def extrapolate(rows, noise: float = 1e-3) -> Extrapolation:
    """Least-squares line of ratio against ``1/log(1/eps)``; the intercept is the limit."""
    if len(rows) < 3:
        raise SpecError("extrapolation needs at least three rows")
    eps = np.array([r.epsilon for r in rows])
    if np.any(eps >= 1):
        raise DomainError("extrapolation in 1/log(1/eps) needs eps < 1")
    ratios = np.array([r.ratio for r in rows])
    xs = 1.0 / np.log(1.0 / eps)
    slope, intercept = np.polyfit(xs, ratios, 1)
    fitted = intercept + slope * xs
    residual = float(np.sqrt(np.mean((ratios - fitted) ** 2)))
    monotone = bool(np.all(np.diff(ratios) >= -noise))
    return Extrapolation(float(intercept), float(slope), residual, monotone, tuple(xs))
