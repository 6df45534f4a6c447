import math

import numpy as np
import pytest
from scipy import special

from dirlab import composition, disk
from dirlab.composition import QuadratureConfig
from dirlab.errors import DomainError, QuadratureError, ResolutionError
from dirlab.psi import NONNEGATIVE, PsiSpec
from dirlab.reverse_cauchy import power_constant


def test_spot_values_linear_psi(coarse):
    # Phi(t) = t^2 / 2 and h = 1 + cos: D[Phi o Ph] = 5 pi / 4, D[P(Phi o h)] = 9 pi / 8
    h = disk.BoundaryFunction.trig(256, mean=1.0, cos=[1.0])
    pair = composition.energy_pair(PsiSpec.power(1.0, NONNEGATIVE), h, coarse)
    assert pair.lhs_volume == pytest.approx(5 * math.pi / 4, rel=1e-10)
    assert pair.lhs_boundary == pytest.approx(5 * math.pi / 4, rel=1e-10)
    assert pair.rhs == pytest.approx(9 * math.pi / 8, rel=1e-10)
    assert pair.ratio == pytest.approx(10 / 9, rel=1e-10)


def test_constant_psi_gives_equal_sides(coarse):
    h = disk.random_corpus(1, 3, 256)[0]
    pair = composition.energy_pair(PsiSpec.constant(2.0), h, coarse)
    assert pair.ratio == pytest.approx(1.0, abs=1e-12)
    assert pair.lhs == pytest.approx(4 * disk.energy_fourier(h), rel=1e-12)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_routes_agree_for_polynomial_psi(alpha):
    q = QuadratureConfig(128, 1024, 512)
    for h in disk.random_corpus(4, int(alpha * 10), 512, max_degree=4):
        pair = composition.energy_pair(PsiSpec.power(alpha), h, q)
        assert pair.lhs_boundary == pytest.approx(pair.lhs_volume, rel=1e-9)


def test_routes_agree_for_square_root_psi():
    # |t|^(1/2) has a kink at the origin; the default grids resolve it to the route tolerance
    h = disk.random_corpus(1, 11, 1024)[0]
    pair = composition.energy_pair(PsiSpec.power(0.5), h)
    assert composition.routes_agree(pair)


def test_chain_rule_density(rng):
    """``Psi(u)^2 |grad u|^2`` equals ``|grad (Phi o u)|^2`` by finite differences."""
    psi = PsiSpec.power(1.5)
    u = disk.extend(disk.random_trig_polynomial(rng, 64, max_degree=3))
    for r, t in [(0.3, 0.2), (0.8, 2.5), (0.55, 4.0)]:
        d = 1e-6
        f = lambda rr, tt: psi.phi(disk.poisson_eval(u, rr, tt))
        gr = (f(r + d, t) - f(r - d, t)) / (2 * d)
        gt = (f(r, t + d) - f(r, t - d)) / (2 * d * r)
        ur, ut = disk.gradient_eval(u, r, t)
        dens = psi.psi(disk.poisson_eval(u, r, t)) ** 2 * (ur**2 + ut**2)
        assert gr**2 + gt**2 == pytest.approx(dens, rel=1e-6)


def test_two_sided_inequality_on_a_corpus(coarse):
    c = power_constant(2.0).value
    for h in disk.random_corpus(6, 21, 256, max_degree=4):
        pair = composition.verify_theorem1(PsiSpec.power(2.0), h, c, QuadratureConfig(128, 1024, 256))
        assert pair.passed
        assert 1 - 1e-9 <= pair.ratio <= c


def test_verify_flags_a_too_small_constant(coarse):
    h = disk.BoundaryFunction.trig(256, cos=[0.0, 1.0])
    pair = composition.verify_theorem1(PsiSpec.power(1.0), h, 1.0, coarse)
    assert pair.ratio > 1.0
    assert not pair.passed


def test_verify_raises_on_unresolved_quadrature():
    h = disk.random_corpus(1, 5, 256)[0]
    with pytest.raises(QuadratureError):
        composition.verify_theorem1(PsiSpec.power(3.0), h, 10.0, QuadratureConfig(3, 256, 256))


def test_nonnegative_psi_rejects_signed_data(coarse):
    h = disk.BoundaryFunction.trig(256, cos=[1.0])
    with pytest.raises(DomainError):
        composition.energy_pair(PsiSpec.power(1.0, NONNEGATIVE), h, coarse)


def test_quadrature_config_validation():
    with pytest.raises(ResolutionError):
        QuadratureConfig(0, 256, 256)
    with pytest.raises(ResolutionError):
        QuadratureConfig(16, 300, 256)


def test_negative_power_boundary_route_through_pole():
    # Psi = |t|^(-1/4), h = cos: the density is |x|^(-1/2), integral 2 B(1/4, 3/2)
    exact = 2 * special.beta(0.25, 1.5)
    h = disk.BoundaryFunction.trig(1024, cos=[1.0])
    psi = PsiSpec.power(-0.25)
    assert composition.energy_composed_boundary(psi, h) == pytest.approx(exact, rel=1e-6)


def test_negative_power_volume_route_is_flagged():
    # the tensor polar rule converges slowly across the level line u = 0;
    # verification reports the disagreement instead of a verdict
    h = disk.BoundaryFunction.trig(256, cos=[1.0])
    psi = PsiSpec.power(-0.25)
    with pytest.raises(QuadratureError):
        composition.verify_theorem1(psi, h, power_constant(-0.25).value,
                                    QuadratureConfig(128, 1024, 256))


def test_truncation_sweep_monotone(coarse):
    h = disk.BoundaryFunction.trig(256, cos=[3.0])
    rows = composition.truncation_sweep(PsiSpec.power(1.0), h, [1, 2, 4], coarse)
    lhs = [r.lhs for r in rows]
    assert lhs == sorted(lhs)
    full = composition.energy_composed_volume(PsiSpec.power(1.0), disk.extend(h), coarse,
                                              composition.data_range(h))
    assert lhs[-1] == pytest.approx(full, rel=1e-12)
    with pytest.raises(ValueError):
        composition.truncation_sweep(PsiSpec.power(1.0), h, [2, 1])


def test_energy_pair_dict_keys(coarse):
    h = disk.BoundaryFunction.trig(256, cos=[1.0])
    d = composition.energy_pair(PsiSpec.power(1.0), h, coarse).to_dict()
    assert set(d) == {"lhs", "rhs", "ratio", "lhs_volume", "lhs_boundary", "C", "pass"}
    zero = composition.energy_pair(PsiSpec.power(1.0), disk.BoundaryFunction.trig(256, mean=1.0),
                                   coarse)
    assert math.isnan(zero.ratio)


def test_overflow_is_reported_not_certified(coarse):
    h = disk.BoundaryFunction.trig(256, cos=[1e200])
    with pytest.raises(QuadratureError, match="overflow threshold"):
        composition.energy_pair(PsiSpec.power(1.0), h, coarse)
