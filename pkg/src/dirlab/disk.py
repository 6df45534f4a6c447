"""Harmonic extension and Dirichlet energy on the unit disk.

Boundary data are uniform samples ``h(theta_j)``, ``theta_j = 2 pi j / M``.
The harmonic extension is the Fourier series
``u(r, theta) = a0/2 + sum_n r**n (a_n cos n theta + b_n sin n theta)``
and its Dirichlet energy is available two ways:

* ``energy_fourier``: ``pi * sum_n n (a_n**2 + b_n**2)``;
* ``douglas_energy``: the boundary double integral
  ``1/(8 pi) * iint (h(t) - h(s))**2 / sin((t - s)/2)**2 dt ds``
  (the Laplacian's ``d^2 G / dnu_x dnu_y`` on the circle is
  ``1 / (4 pi sin((t - s)/2)**2)``), by the periodic trapezoid rule with the
  diagonal replaced by its limit ``4 h'(t)**2``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResolutionError, SpecError

DEFAULT_MAX_M = 2**20
MIN_DOUGLAS_M = 16
_OFFSET_BLOCK = 64


def max_grid_size() -> int:
    """Boundary grid cap, overridable through ``DIRLAB_MAX_M``."""
    raw = os.environ.get("DIRLAB_MAX_M")
    if raw is None:
        return DEFAULT_MAX_M
    try:
        value = int(raw)
    except ValueError:
        raise SpecError(f"DIRLAB_MAX_M must be an integer, got {raw!r}") from None
    if value < MIN_DOUGLAS_M:
        raise SpecError(f"DIRLAB_MAX_M must be at least {MIN_DOUGLAS_M}")
    return value


def nodes(m: int) -> np.ndarray:
    return 2 * np.pi * np.arange(m) / m


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class Fourier:
    """Coefficients of ``a0/2 + sum_{n=1..K} (a_n cos n t + b_n sin n t)``."""

    a0: float
    an: np.ndarray
    bn: np.ndarray

    @property
    def modes(self) -> int:
        return len(self.an)

    def synthesize(self, m: int, radius: float = 1.0) -> np.ndarray:
        """Values of the (radially damped) series on ``m`` uniform nodes."""
        k = self.modes
        if k >= m // 2:
            raise ResolutionError(f"{m} nodes cannot carry {k} modes")
        spec = np.zeros(m // 2 + 1, dtype=complex)
        n = np.arange(1, k + 1)
        spec[0] = m * self.a0 / 2
        spec[1:k + 1] = (m / 2) * radius**n * (self.an - 1j * self.bn)
        return np.fft.irfft(spec, n=m)


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Samples of ``h`` on ``M`` uniform nodes plus its low Fourier modes."""

    samples: np.ndarray
    fourier: Fourier

    @property
    def size(self) -> int:
        return len(self.samples)

    @property
    def theta(self) -> np.ndarray:
        return nodes(self.size)

    def map(self, fn) -> BoundaryFunction:
        """Apply ``fn`` pointwise to the samples and re-decompose."""
        return decompose(np.asarray(fn(self.samples), dtype=float))

    @classmethod
    def from_function(cls, fn, m: int) -> BoundaryFunction:
        return decompose(np.asarray(fn(nodes(m)), dtype=float))

    @classmethod
    def trig(cls, m: int, mean: float = 0.0, cos=(), sin=()) -> BoundaryFunction:
        """``mean + sum_n cos[n-1] cos(n t) + sin[n-1] sin(n t)`` sampled on ``m`` nodes."""
        t = nodes(m)
        values = np.full(m, float(mean))
        for n, c in enumerate(cos, start=1):
            values += c * np.cos(n * t)
        for n, s in enumerate(sin, start=1):
            values += s * np.sin(n * t)
        return decompose(values)


@dataclass(frozen=True, eq=False)
class HarmonicExtension:
    """``u = Ph`` represented by the Fourier coefficients of its trace."""

    fourier: Fourier

    def fields(self, radius: float, m: int):
        """``(u, du/dr, (1/r) du/dtheta)`` on ``m`` uniform angles at ``radius``."""
        f = self.fourier
        k = f.modes
        n = np.arange(1, k + 1)
        u = f.synthesize(m, radius)
        # r**(n-1) written out so that r = 0 leaves only the n = 1 mode
        scale = n * np.power(radius, n - 1)
        ur = Fourier(0.0, scale * f.an, scale * f.bn).synthesize(m)
        ut = Fourier(0.0, scale * f.bn, -scale * f.an).synthesize(m)
        return u, ur, ut


def decompose(samples) -> BoundaryFunction:
    """Discrete Fourier decomposition keeping ``K = M/4`` modes."""
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1:
        raise SpecError("boundary samples must be one-dimensional")
    m = len(values)
    if m < 8 or not _is_power_of_two(m):
        raise ResolutionError(f"sample count must be a power of two >= 8, got {m}")
    if not np.all(np.isfinite(values)):
        raise DomainError("boundary samples must be finite")
    spec = np.fft.rfft(values)
    k = m // 4
    a0 = 2 * spec[0].real / m
    an = 2 * spec[1:k + 1].real / m
    bn = -2 * spec[1:k + 1].imag / m
    return BoundaryFunction(values, Fourier(float(a0), an, bn))


def extend(h: BoundaryFunction) -> HarmonicExtension:
    """The Poisson operator: harmonic extension of ``h`` into the disk."""
    return HarmonicExtension(h.fourier)


def poisson_eval(u: HarmonicExtension, r: float, theta: float) -> float:
    if not 0 <= r <= 1:
        raise DomainError(f"radius must lie in [0, 1], got {r}")
    f = u.fourier
    n = np.arange(1, f.modes + 1)
    rn = np.power(float(r), n)
    return float(f.a0 / 2 + np.sum(rn * (f.an * np.cos(n * theta) + f.bn * np.sin(n * theta))))


def gradient_eval(u: HarmonicExtension, r: float, theta: float) -> tuple[float, float]:
    """``(du/dr, (1/r) du/dtheta)`` at a point of the closed disk.

    At ``r = 0`` the angular component is the limit along the ray, carried by
    the ``n = 1`` mode alone.
    """
    if not 0 <= r <= 1:
        raise DomainError(f"radius must lie in [0, 1], got {r}")
    f = u.fourier
    n = np.arange(1, f.modes + 1)
    scale = n * np.power(float(r), n - 1)
    c, s = np.cos(n * theta), np.sin(n * theta)
    du_dr = float(np.sum(scale * (f.an * c + f.bn * s)))
    du_dt = float(np.sum(scale * (-f.an * s + f.bn * c)))
    return du_dr, du_dt


def energy_fourier(u: HarmonicExtension | BoundaryFunction) -> float:
    f = u.fourier
    n = np.arange(1, f.modes + 1)
    return float(np.pi * np.sum(n * (f.an**2 + f.bn**2)))


def disk_kernel(theta, phi):
    """``d^2 G / dnu_x dnu_y`` for the Laplacian on the unit disk."""
    return 1.0 / (4 * np.pi * np.sin((np.asarray(theta) - np.asarray(phi)) / 2) ** 2)


def chord_length(theta, phi):
    return 2 * np.abs(np.sin((np.asarray(theta) - np.asarray(phi)) / 2))


def spectral_derivative(samples: np.ndarray) -> np.ndarray:
    m = len(samples)
    spec = np.fft.rfft(samples)
    n = np.arange(len(spec))
    spec = 1j * n * spec
    if m % 2 == 0:
        spec[-1] = 0.0
    return np.fft.irfft(spec, n=m)


def centered_derivative(samples: np.ndarray) -> np.ndarray:
    m = len(samples)
    return (np.roll(samples, -1) - np.roll(samples, 1)) * (m / (4 * np.pi))


def derivative(samples: np.ndarray, diagonal: str) -> np.ndarray:
    if diagonal == "spectral":
        return spectral_derivative(samples)
    if diagonal == "centered":
        return centered_derivative(samples)
    raise SpecError(f"unknown diagonal rule {diagonal!r}")


def check_boundary_grid(m: int):
    if m < MIN_DOUGLAS_M:
        raise ResolutionError(f"boundary grid of {m} nodes is too coarse (need >= {MIN_DOUGLAS_M})")
    cap = max_grid_size()
    if m > cap:
        raise ResolutionError(f"boundary grid of {m} nodes exceeds the cap {cap} (DIRLAB_MAX_M)")


def kernel_weights(m: int) -> np.ndarray:
    """``1 / sin(pi k / m)**2`` for offsets ``k = 0..m-1`` (``k = 0`` set to 0)."""
    w = np.zeros(m)
    k = np.arange(1, m)
    w[1:] = 1.0 / np.sin(np.pi * k / m) ** 2
    return w


def offset_sums(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``S[k] = sum_j (f_j - f_{j+k}) (g_j - g_{j+k})`` for ``k = 0..m/2``."""
    m = len(f)
    half = m // 2
    out = np.zeros(half + 1)
    j = np.arange(m)
    for start in range(1, half + 1, _OFFSET_BLOCK):
        ks = np.arange(start, min(start + _OFFSET_BLOCK, half + 1))
        idx = (j[None, :] + ks[:, None]) % m
        out[ks] = np.sum((f[None, :] - f[idx]) * (g[None, :] - g[idx]), axis=1)
    return out


def boundary_form(f: np.ndarray, g: np.ndarray, df: np.ndarray, dg: np.ndarray) -> float:
    """Trapezoid value of ``1/(8 pi) iint (f(t)-f(s)) (g(t)-g(s)) / sin((t-s)/2)**2``.

    ``df * dg`` supplies the diagonal limit ``4 f' g'``.
    """
    m = len(f)
    check_boundary_grid(m)
    half = m // 2
    w = kernel_weights(m)
    s = offset_sums(f, g)
    # offsets k and m-k contribute equally
    mult = np.full(half + 1, 2.0)
    mult[0] = 0.0
    mult[half] = 1.0
    off = np.sum(mult * w[: half + 1] * s)
    diag = 4.0 * np.sum(df * dg)
    step = 2 * np.pi / m
    return float(step**2 * (off + diag) / (8 * np.pi))


def douglas_energy(h: BoundaryFunction | np.ndarray, diagonal: str = "spectral") -> float:
    """Dirichlet energy of ``Ph`` from boundary values alone."""
    values = h.samples if isinstance(h, BoundaryFunction) else np.asarray(h, dtype=float)
    d = derivative(values, diagonal)
    return boundary_form(values, values, d, d)


def read_boundary_csv(path) -> BoundaryFunction:
    """One value per line; the row count is the grid size."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text.split(",")[0]))
            except ValueError:
                raise SpecError(f"{path}:{lineno}: not a number: {text!r}") from None
    return decompose(np.array(values))


def random_trig_polynomial(rng: np.random.Generator, m: int = 1024, max_degree: int = 8,
                           bound: float = 2.0) -> BoundaryFunction:
    """Degree drawn from ``1..max_degree``, every coefficient uniform in ``[-bound, bound]``."""
    degree = int(rng.integers(1, max_degree + 1))
    return BoundaryFunction.trig(
        m,
        mean=rng.uniform(-bound, bound),
        cos=rng.uniform(-bound, bound, degree),
        sin=rng.uniform(-bound, bound, degree),
    )


def random_corpus(count: int, seed: int, m: int = 1024, max_degree: int = 8,
                  bound: float = 2.0) -> list[BoundaryFunction]:
    rng = np.random.default_rng(seed)
    return [random_trig_polynomial(rng, m, max_degree, bound) for _ in range(count)]


def shifted_nonnegative(h: BoundaryFunction) -> BoundaryFunction:
    """``h - min(h)``, so that the smallest sample is exactly zero."""
    return decompose(h.samples - np.min(h.samples))
