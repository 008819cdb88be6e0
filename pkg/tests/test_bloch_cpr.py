"""Free-energy series, the induced current, and symmetry guarantees."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import central_difference
from ringflux.bloch_cpr import (
    FreeEnergyModel,
    current,
    finite_difference_current_error,
    free_energy,
    fundamental_harmonic,
    reduced_cpr,
    validate_symmetries,
)
from ringflux.fixed_points import find_fixed_points
from ringflux.ring_model import FLUX_QUANTUM, TWO_PI, ReducedParams

PHI0 = FLUX_QUANTUM


def _random_model(seed, k=5, scale=1e-21):
    rng = np.random.default_rng(seed)
    return FreeEnergyModel(tuple(float(c) for c in rng.uniform(-scale, scale, k)), PHI0)


class TestFreeEnergy:
    def test_zero_flux_sums_coefficients(self):
        model = FreeEnergyModel((1e-21, -2e-22, 3e-23), PHI0)
        assert free_energy(model, 0.0) == pytest.approx(sum(model.coeffs), rel=1e-15)

    def test_periodicity_by_construction(self):
        model = _random_model(1)
        for Phi in np.linspace(-PHI0, PHI0, 37):
            assert free_energy(model, Phi + 7 * PHI0) == pytest.approx(
                float(free_energy(model, Phi)), rel=1e-9, abs=1e-33)

    def test_half_quantum_flips_single_harmonic(self):
        model = FreeEnergyModel((4.2e-21,), PHI0)
        assert free_energy(model, PHI0 / 2) == pytest.approx(-4.2e-21, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            FreeEnergyModel((math.nan,), PHI0)
        with pytest.raises(ValueError):
            FreeEnergyModel((1e-21,), 0.0)


class TestCurrent:
    def test_zero_at_zero_flux(self):
        assert current(_random_model(2), 0.0) == pytest.approx(0.0, abs=1e-40)

    def test_single_harmonic_is_sinusoidal(self):
        I0 = 1.0
        model = FreeEnergyModel((I0 * PHI0 / TWO_PI,), PHI0)
        for phi in np.linspace(-1.0, 1.0, 41):
            assert current(model, phi * PHI0) == pytest.approx(
                I0 * math.sin(TWO_PI * phi), abs=1e-12)

    def test_quarter_flux_unit_current(self):
        # c_1 chosen so the fundamental amplitude is exactly 1 A; checked
        # against a central finite difference of the free energy
        model = FreeEnergyModel((PHI0 / TWO_PI,), PHI0)
        value = float(current(model, PHI0 / 4))
        assert value == pytest.approx(1.0, rel=1e-12)
        h = 1e-6 * PHI0
        fd = -central_difference(lambda x: float(free_energy(model, x)), PHI0 / 4, h)
        assert value == pytest.approx(fd, rel=1e-6)

    def test_analytic_matches_finite_difference_everywhere(self):
        model = _random_model(3)
        h = 1e-6 * PHI0
        for Phi in np.linspace(-PHI0, PHI0, 101):
            fd = -central_difference(lambda x: float(free_energy(model, x)), Phi, h)
            scale = max(abs(fd), TWO_PI * max(abs(c) for c in model.coeffs) / PHI0)
            assert abs(float(current(model, Phi)) - fd) <= 1e-6 * scale

    def test_packaged_fd_check_agrees(self):
        assert finite_difference_current_error(_random_model(4)) < 1e-6


class TestSymmetries:
    def test_single_harmonic(self):
        report = validate_symmetries(FreeEnergyModel((1e-21,), PHI0))
        assert report.passed(1e-12)

    def test_random_multi_harmonic(self):
        report = validate_symmetries(_random_model(5), grid_size=128)
        assert report.max_deviation() <= 1e-12

    def test_minimal_grid_smoke(self):
        report = validate_symmetries(_random_model(6), grid_size=16)
        assert report.passed(1e-12)

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            validate_symmetries(_random_model(7), grid_size=8)

    def test_current_odd_and_periodic_on_grid(self):
        model = _random_model(8)
        Phi = np.linspace(-2 * PHI0, 2 * PHI0, 301)
        I = np.asarray(current(model, Phi))
        scale = np.max(np.abs(I))
        assert_allclose(np.asarray(current(model, Phi + PHI0)), I, atol=1e-12 * scale)
        assert_allclose(np.asarray(current(model, -Phi)), -I, atol=1e-12 * scale)


class TestFundamentalHarmonic:
    def test_unit_normalization(self):
        assert fundamental_harmonic(FreeEnergyModel((PHI0 / TWO_PI,), PHI0)) == (
            pytest.approx(1.0, rel=1e-15))

    def test_pure_second_harmonic(self):
        assert fundamental_harmonic(FreeEnergyModel((0.0, 1e-21), PHI0)) == 0.0

    def test_empty_model_rejected(self):
        with pytest.raises(ValueError):
            fundamental_harmonic(FreeEnergyModel((), PHI0))

    def test_sign_follows_coefficient(self):
        assert fundamental_harmonic(FreeEnergyModel((-1e-21,), PHI0)) < 0.0


class TestMinimaPlacement:
    def test_negative_c1_minima_at_integer_flux(self):
        # free-energy minima at Phi = n*Phi0: the current vanishes and is
        # restoring (d2F/dPhi2 > 0, i.e. dI/dPhi < 0) there
        model = FreeEnergyModel((-3e-21,), PHI0)
        h = 1e-7 * PHI0
        for n in (-2, -1, 0, 1, 2):
            Phi = n * PHI0
            assert abs(float(current(model, Phi))) < 1e-12 * abs(
                fundamental_harmonic(model))
            dI = central_difference(lambda x: float(current(model, x)), Phi, h)
            assert dI < 0.0
            d2F = -dI
            assert d2F > 0.0

    def test_positive_c1_minima_at_half_integer_flux(self):
        model = FreeEnergyModel((3e-21,), PHI0)
        h = 1e-7 * PHI0
        for n in (-1, 0, 1):
            Phi = (n + 0.5) * PHI0
            assert abs(float(current(model, Phi))) < 1e-12 * abs(
                fundamental_harmonic(model))
            assert central_difference(lambda x: float(current(model, x)), Phi, h) < 0.0


class TestFixedPointIntegration:
    def test_single_harmonic_reproduces_sinusoidal_roots(self):
        # K=1 with c_1 > 0: the derived relation equals the sinusoid with
        # I_J = 2*pi*c_1/Phi0, so the fixed-point sets must coincide
        c1 = 2.4e-21
        model = FreeEnergyModel((c1,), PHI0)
        i_fun, di_fun, i_j = reduced_cpr(model)
        assert i_j == pytest.approx(TWO_PI * c1 / PHI0, rel=1e-12)
        p = ReducedParams(beta=5.0, phi_fe=0.1)
        for pe in (0.0, -0.3, 0.45, 1.1, 2.4):
            direct = find_fixed_points(pe, p)
            via_model = find_fixed_points(pe, p, cpr=i_fun, cpr_prime=di_fun)
            assert len(direct) == len(via_model)
            for a, b in zip(direct, via_model):
                assert b.phi == pytest.approx(a.phi, abs=1e-10)
                assert b.stability == a.stability

    def test_negative_c1_shifts_roots_by_half_quantum(self):
        # c_1 < 0 flips the relation's sign; the root set at drive c equals
        # the positive-sign set at c + 1/2, shifted down by 1/2
        model = FreeEnergyModel((-2.4e-21,), PHI0)
        i_fun, di_fun, _ = reduced_cpr(model)
        p = ReducedParams(beta=5.0)
        for pe in (0.0, 0.6, -1.2):
            shifted = find_fixed_points(pe + 0.5, p)
            via_model = find_fixed_points(pe, p, cpr=i_fun, cpr_prime=di_fun)
            assert len(via_model) == len(shifted)
            for a, b in zip(via_model, shifted):
                assert a.phi == pytest.approx(b.phi - 0.5, abs=1e-10)

    def test_two_harmonic_model_roots_satisfy_residual(self):
        model = FreeEnergyModel((2e-21, 4e-22), PHI0)
        i_fun, di_fun, i_j = reduced_cpr(model)
        lam_slope = max(abs(float(di_fun(x))) for x in np.linspace(0, 1, 2001))
        p = ReducedParams(beta=4.0)
        roots = find_fixed_points(0.3, p, cpr=i_fun, cpr_prime=di_fun,
                                  cpr_slope_bound=lam_slope)
        assert roots
        for r in roots:
            g = r.phi - 0.3 - p.lam * i_fun(r.phi)
            assert abs(g) <= 1e-12
