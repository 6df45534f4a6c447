"""The weight function Psi, its antiderivative Phi and the primitive of Psi**2.

Three families are supported:

* ``power``: ``Psi(t) = |t|**alpha`` with ``alpha > -1/2``;
* ``const``: ``Psi(t) = c``;
* ``pwl``: piecewise linear through sorted ``(t, value)`` breakpoints, extended
  by constants outside the breakpoint range.  Repeated abscissae encode a jump
  (the function is right-continuous there).

Every family can be clamped from above at a level ``N`` (``PsiSpec.truncated``),
which produces ``Psi_N = min(Psi, N)`` and ``Phi_N(t) = int_0^t Psi_N``.  All
integrals are evaluated in closed form; evaluators accept scalars or numpy
arrays and return the same shape.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpecError

WHOLE_LINE = "whole_line"
NONNEGATIVE = "nonnegative_only"
DOMAINS = (WHOLE_LINE, NONNEGATIVE)

_DOMAIN_ALIASES = {
    "whole": WHOLE_LINE,
    "whole_line": WHOLE_LINE,
    "signed": WHOLE_LINE,
    "nonneg": NONNEGATIVE,
    "nonnegative": NONNEGATIVE,
    "nonnegative_only": NONNEGATIVE,
}


def canonical_domain(name: str) -> str:
    try:
        return _DOMAIN_ALIASES[name]
    except KeyError:
        raise SpecError(f"unknown domain {name!r}; expected one of {sorted(_DOMAIN_ALIASES)}") from None


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class PsiSpec:
    """A nonnegative function Psi on the line (or on the half-line).

    Use the :meth:`power`, :meth:`constant` and :meth:`piecewise_linear`
    constructors rather than the raw initializer.
    """

    kind: str
    alpha: float = 0.0
    c: float = 1.0
    breakpoints: tuple[tuple[float, float], ...] = ()
    domain: str = WHOLE_LINE
    cap: float | None = None

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise SpecError(f"unknown domain {self.domain!r}")
        if self.cap is not None and not (self.cap > 0 and math.isfinite(self.cap)):
            raise SpecError("truncation level must be a positive finite number")
        if self.kind == "power":
            if not (math.isfinite(self.alpha) and self.alpha > -0.5):
                raise SpecError(f"power exponent must exceed -1/2, got {self.alpha}")
        elif self.kind == "const":
            if not (math.isfinite(self.c) and self.c >= 0):
                raise SpecError(f"constant must be finite and nonnegative, got {self.c}")
        elif self.kind == "pwl":
            pts = self.breakpoints
            if len(pts) < 1:
                raise SpecError("piecewise-linear spec needs at least one breakpoint")
            ts = [p[0] for p in pts]
            vs = [p[1] for p in pts]
            if not all(math.isfinite(x) for x in ts + vs):
                raise SpecError("breakpoints must be finite")
            if any(b < a for a, b in zip(ts, ts[1:])):
                raise SpecError("breakpoint abscissae must be sorted")
            if any(ts[i] == ts[i + 2] for i in range(len(ts) - 2)):
                raise SpecError("at most two breakpoints may share an abscissa")
            if min(vs) < 0:
                raise SpecError("piecewise-linear values must be nonnegative")
        else:
            raise SpecError(f"unknown kind {self.kind!r}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def power(cls, alpha: float, domain: str = WHOLE_LINE) -> PsiSpec:
        return cls("power", alpha=float(alpha), domain=canonical_domain(domain))

    @classmethod
    def constant(cls, c: float = 1.0, domain: str = WHOLE_LINE) -> PsiSpec:
        return cls("const", c=float(c), domain=canonical_domain(domain))

    @classmethod
    def piecewise_linear(cls, breakpoints, domain: str = WHOLE_LINE) -> PsiSpec:
        pts = tuple((float(t), float(v)) for t, v in breakpoints)
        return cls("pwl", breakpoints=pts, domain=canonical_domain(domain))

    def truncated(self, level: int | float) -> PsiSpec:
        """Return ``min(Psi, level)`` as a new spec."""
        if not level >= 1:
            raise SpecError(f"truncation level must be >= 1, got {level}")
        cap = float(level) if self.cap is None else min(self.cap, float(level))
        return dataclasses.replace(self, cap=cap)

    def untruncated(self) -> PsiSpec:
        return dataclasses.replace(self, cap=None)

    @property
    def is_constant(self) -> bool:
        """True when Psi is the same constant everywhere on its domain."""
        if self.kind == "const":
            return True
        if self.kind == "power":
            return self.alpha == 0.0
        return len({v for _, v in self._pwl_points()[1]}) == 1

    @property
    def has_pole(self) -> bool:
        """True for an untruncated negative power (infinite at the origin)."""
        return self.kind == "power" and self.alpha < 0 and self.cap is None

    # -- evaluation -------------------------------------------------------

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError("argument must be finite")
        if self.domain == NONNEGATIVE and np.any(t < 0):
            raise DomainError("negative argument for a nonnegative_only Psi")
        return t

    def psi(self, t):
        """Pointwise value; ``+inf`` at the pole of a negative power."""
        x = self._check(t)
        if self.kind == "power":
            a = self.alpha
            ax = np.abs(x)
            if a > 0:
                val = ax**a
            elif a == 0:
                val = np.ones_like(ax)
            else:
                with np.errstate(divide="ignore"):
                    val = np.where(ax > 0, ax ** a, np.inf)
        elif self.kind == "const":
            val = np.full_like(x, self.c)
        else:
            val = self._pwl_value(x)
        if self.cap is not None:
            val = np.minimum(val, self.cap)
        return _scalar_or_array(val, t)

    def phi(self, t):
        """``Phi(t) = int_0^t Psi``."""
        x = self._check(t)
        if self.kind == "power":
            val = np.sign(x) * _power_primitive(np.abs(x), self.alpha, self.cap)
        elif self.kind == "const":
            val = self._const_value() * x
        else:
            val = self._pwl_primitive(x, squared=False)
        return _scalar_or_array(val, t)

    def sq_primitive(self, t):
        """``int_0^t Psi**2``."""
        x = self._check(t)
        if self.kind == "power":
            cap = None if self.cap is None else self.cap**2
            val = np.sign(x) * _power_primitive(np.abs(x), 2 * self.alpha, cap)
        elif self.kind == "const":
            val = self._const_value() ** 2 * x
        else:
            val = self._pwl_primitive(x, squared=True)
        return _scalar_or_array(val, t)

    def int_sq(self, a, b):
        """``int_a^b Psi**2`` (antisymmetric in ``a`` and ``b``)."""
        return self.sq_primitive(b) - self.sq_primitive(a)

    def _const_value(self) -> float:
        return self.c if self.cap is None else min(self.c, self.cap)

    # -- piecewise-linear machinery ----------------------------------------

    def _pwl_points(self):
        ts = [p[0] for p in self.breakpoints]
        vs = [p[1] for p in self.breakpoints]
        if self.cap is None:
            return np.array(ts), list(zip(ts, vs))
        cap = self.cap
        out = []
        for i, (t, v) in enumerate(zip(ts, vs)):
            if i > 0:
                t0, v0 = ts[i - 1], vs[i - 1]
                if t > t0 and (v0 - cap) * (v - cap) < 0:
                    out.append((t0 + (cap - v0) * (t - t0) / (v - v0), cap))
            out.append((t, min(v, cap)))
        return np.array([p[0] for p in out]), out

    def _pwl_tables(self):
        xs, pts = self._pwl_points()
        vs = np.array([p[1] for p in pts])
        lengths = np.diff(xs)
        cum1 = np.concatenate([[0.0], np.cumsum(lengths * (vs[:-1] + vs[1:]) / 2)])
        cum2 = np.concatenate(
            [[0.0], np.cumsum(lengths * (vs[:-1] ** 2 + vs[:-1] * vs[1:] + vs[1:] ** 2) / 3)]
        )
        return xs, vs, cum1, cum2

    def _pwl_value(self, x):
        xs, vs, _, _ = self._pwl_tables()
        return _pwl_locate(x, xs, vs)[2]

    def _pwl_from_start(self, x, squared):
        xs, vs, cum1, cum2 = self._pwl_tables()
        idx, left, val = _pwl_locate(x, xs, vs)
        n = len(xs)
        below = x < xs[0]
        inside = ~below & (idx < n - 1)
        p = vs[np.clip(idx, 0, n - 1)]
        dx = x - left
        if squared:
            seg = dx * (p * p + p * val + val * val) / 3
            res = cum2[np.clip(idx, 0, n - 1)] + np.where(inside, seg, dx * vs[-1] ** 2)
            return np.where(below, (x - xs[0]) * vs[0] ** 2, res)
        seg = dx * (p + val) / 2
        res = cum1[np.clip(idx, 0, n - 1)] + np.where(inside, seg, dx * vs[-1])
        return np.where(below, (x - xs[0]) * vs[0], res)

    def _pwl_primitive(self, x, squared):
        return self._pwl_from_start(x, squared) - self._pwl_from_start(np.zeros(1), squared)[0]

    # -- text form --------------------------------------------------------

    def to_text(self) -> str:
        if self.kind == "power":
            body = f"power:{self.alpha!r}"
        elif self.kind == "const":
            body = f"const:{self.c!r}"
        else:
            body = "pwl:" + ";".join(f"{t!r},{v!r}" for t, v in self.breakpoints)
        if self.domain == NONNEGATIVE:
            body += "@nonneg"
        if self.cap is not None:
            body += f"|N={self.cap!r}"
        return body

    def __str__(self):
        return self.to_text()


def _pwl_locate(x, xs, vs):
    """Return (segment index, segment start, value) for each point of ``x``.

    Index -1 means left of the first breakpoint; ``len(xs) - 1`` means at or
    right of the last one.
    """
    n = len(xs)
    idx = np.searchsorted(xs, x, side="right") - 1
    safe = np.clip(idx, 0, n - 1)
    nxt = np.clip(idx + 1, 0, n - 1)
    left = xs[safe]
    span = xs[nxt] - left
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (x - left) / np.where(span > 0, span, 1.0), 0.0)
    val = vs[safe] + (vs[nxt] - vs[safe]) * frac
    val = np.where(idx < 0, vs[0], np.where(idx >= n - 1, vs[-1], val))
    return idx, left, val


def _power_primitive(x, a, cap):
    """``int_0^x min(tau**a, cap) dtau`` for ``x >= 0`` and ``a > -1``."""
    if cap is None or a == 0:
        if a == 0:
            level = 1.0 if cap is None else min(1.0, cap)
            return level * x
        return x ** (a + 1) / (a + 1)
    knee = cap ** (1.0 / a)
    if a > 0:
        return np.minimum(x, knee) ** (a + 1) / (a + 1) + cap * np.maximum(x - knee, 0.0)
    return cap * np.minimum(x, knee) + (np.maximum(x, knee) ** (a + 1) - knee ** (a + 1)) / (a + 1)


# -- operation-level functions --------------------------------------------


def eval_psi(psi: PsiSpec, t):
    return psi.psi(t)


def phi(psi: PsiSpec, t):
    return psi.phi(t)


def int_psi_squared(psi: PsiSpec, a, b):
    return psi.int_sq(a, b)


def psi_truncated(psi: PsiSpec, level: int, t):
    return psi.truncated(level).psi(t)


def phi_truncated(psi: PsiSpec, level: int, t):
    return psi.truncated(level).phi(t)


# -- parsing --------------------------------------------------------------


def parse_psi(text: str) -> PsiSpec:
    """Parse ``power:1.0``, ``const:2.5`` or ``pwl:0,0;1,2;3,1``.

    Optional suffixes: ``@nonneg`` restricts the domain to the half-line and
    ``|N=<level>`` clamps the function.
    """
    src = text.strip()
    cap = None
    if "|" in src:
        src, _, tail = src.partition("|")
        if not tail.startswith("N="):
            raise SpecError(f"malformed truncation suffix in {text!r}")
        cap = _number(tail[2:], text)
    domain = WHOLE_LINE
    if "@" in src:
        src, _, dom = src.partition("@")
        domain = canonical_domain(dom)
    kind, sep, body = src.partition(":")
    if not sep:
        raise SpecError(f"expected '<kind>:<params>', got {text!r}")
    kind = kind.strip().lower()
    if kind == "power":
        spec = PsiSpec.power(_number(body, text), domain)
    elif kind in ("const", "constant"):
        spec = PsiSpec.constant(_number(body, text), domain)
    elif kind == "pwl":
        pts = []
        for chunk in body.split(";"):
            parts = chunk.split(",")
            if len(parts) != 2:
                raise SpecError(f"breakpoint {chunk!r} in {text!r} is not 't,value'")
            pts.append((_number(parts[0], text), _number(parts[1], text)))
        spec = PsiSpec.piecewise_linear(pts, domain)
    else:
        raise SpecError(f"unknown Psi kind {kind!r} in {text!r}")
    if cap is not None:
        spec = dataclasses.replace(spec, cap=cap)
    return spec


def _number(s: str, context: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise SpecError(f"bad number {s!r} in {context!r}") from None
