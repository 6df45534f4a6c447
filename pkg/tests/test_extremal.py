import math

import numpy as np
import pytest

from dirlab import composition, disk, extremal
from dirlab.errors import DomainError, ResolutionError, SpecError
from dirlab.extremal import StepRampData
from dirlab.psi import PsiSpec
from dirlab.reverse_cauchy import interval_ratio


def test_step_ramp_values():
    spec = StepRampData(0.0, 1.0, 0.5)
    t = np.array([1.0, math.pi + 0.25, math.pi + 0.5, 4.5, 2 * math.pi - 0.25])
    np.testing.assert_allclose(spec.values(t), [0.0, 0.5, 1.0, 1.0, 0.5])


@pytest.mark.parametrize("kwargs", [
    dict(a=1.0, b=1.0, epsilon=0.1),
    dict(a=0.0, b=1.0, epsilon=2.0),
    dict(a=0.0, b=1.0, epsilon=0.1, arc=(0.0, 7.0)),
])
def test_step_ramp_validation(kwargs):
    with pytest.raises(SpecError):
        StepRampData(**kwargs)


def test_make_step_ramp_needs_resolved_ramps():
    spec = StepRampData(0.0, 1.0, 0.01)
    with pytest.raises(ResolutionError):
        extremal.make_step_ramp(spec, 1024)
    h = extremal.make_step_ramp(spec, 8192)
    assert h.samples.min() == 0.0 and h.samples.max() == 1.0


def test_default_grid_rule(monkeypatch):
    assert extremal.default_grid(1.0) == 512
    assert extremal.default_grid(10.0) == 256
    monkeypatch.setenv("DIRLAB_MAX_M", "4096")
    assert extremal.default_grid(1e-3) == 4096


@pytest.mark.parametrize("psi", [PsiSpec.power(1.0), PsiSpec.power(2.0),
                                 PsiSpec.piecewise_linear([(-4, 1), (0, 3), (2, 0.5)])], ids=str)
@pytest.mark.parametrize("a,b,arc", [(0.0, 1.0, (0.0, math.pi)),
                                     (-3.7, 1.0, (0.5, 2.0)),
                                     (2.0, -1.0, (1.0, 5.5))])
def test_partition_matches_dense_sum(psi, a, b, arc):
    spec = StepRampData(a, b, 0.2, arc)
    m = 2048
    parts = extremal.decompose_energy(psi, spec, m)
    h = extremal.make_step_ramp(spec, m)
    lhs = composition.energy_composed_boundary(psi, h, diagonal="centered")
    rhs = composition.energy_of_composed_data(psi, h, diagonal="centered")
    assert parts.lhs == pytest.approx(lhs, rel=1e-12)
    assert parts.rhs == pytest.approx(rhs, rel=1e-12)


def test_cross_kernel_sum_against_direct():
    rng = np.random.default_rng(4)
    m = 64
    x, y = rng.random(m) < 0.3, rng.random(m) < 0.3
    w = disk.kernel_weights(m)
    direct = sum(w[(j - i) % m] for i in np.nonzero(x)[0] for j in np.nonzero(y)[0] if i != j)
    assert extremal.cross_kernel_sum(x, y) == pytest.approx(direct, rel=1e-13)


def test_constant_psi_sides_coincide():
    rows = extremal.sweep(PsiSpec.constant(1.0), 0.0, 1.0, [0.4, 0.2, 0.1])
    for row in rows:
        d = row.diagnostics
        assert (d.I1, d.I2, d.I3) == pytest.approx((d.J1, d.J2, d.J3), rel=1e-13)
        assert row.ratio == pytest.approx(1.0, abs=1e-13)


def test_logarithmic_growth_and_bounded_parts():
    psi = PsiSpec.power(1.0)
    ladder = extremal.geometric_ladder(math.pi / 8, math.pi / 128)
    rows = extremal.sweep(psi, 0.0, 1.0, ladder)
    i3 = np.array([r.diagnostics.I3 for r in rows])
    j3 = np.array([r.diagnostics.J3 for r in rows])
    # halving eps adds (1/pi) log 2 times the arc/far-side coefficient
    np.testing.assert_allclose(np.diff(i3), 2 * psi.int_sq(0, 1) * math.log(2) / math.pi, rtol=2e-2)
    np.testing.assert_allclose(np.diff(j3), 2 * psi.phi(1.0) ** 2 * math.log(2) / math.pi, rtol=2e-2)
    i1 = [r.diagnostics.I1 for r in rows]
    assert max(i1) - min(i1) < 0.01 * min(i1)
    ratios = [r.ratio for r in rows]
    assert ratios == sorted(ratios)
    assert ratios[-1] < interval_ratio(psi, 0.0, 1.0).ratio


def test_geometric_ladder():
    assert extremal.geometric_ladder(1.0, 0.125) == [1.0, 0.5, 0.25, 0.125]
    with pytest.raises(SpecError):
        extremal.sweep(PsiSpec.power(1.0), 0.0, 1.0, [0.1, 0.2])


def _rows(eps, ratios):
    parts = extremal.EnergyParts(0, 0, 0, 0, 0, 0)
    return [extremal.ExtremalSweepRow(e, 0, 0.0, 0.0, r, parts) for e, r in zip(eps, ratios)]


def test_extrapolation_recovers_exact_line():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    ratios = 1.5 - 0.7 / np.log(1 / eps)
    fit = extremal.extrapolate(_rows(eps, ratios))
    assert fit.intercept == pytest.approx(1.5, rel=1e-12)
    assert fit.slope == pytest.approx(-0.7, rel=1e-10)
    assert fit.residual < 1e-12 and fit.monotone


def test_extrapolation_guards():
    with pytest.raises(SpecError):
        extremal.extrapolate(_rows([0.1, 0.05], [1, 1]))
    with pytest.raises(DomainError):
        extremal.extrapolate(_rows([2.0, 1.0, 0.5], [1, 1, 1]))
    fit = extremal.extrapolate(_rows([0.1, 0.05, 0.025], [1.2, 1.1, 1.3]))
    assert not fit.monotone


def test_csv_row_layout():
    row = extremal.sweep(PsiSpec.power(1.0), 0.0, 1.0, [0.4])[0]
    values = row.csv_values()
    assert len(values) == len(extremal.ExtremalSweepRow.CSV_COLUMNS)
    assert values[2] == pytest.approx(row.diagnostics.lhs)
