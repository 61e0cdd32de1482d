import math

import numpy as np
import pytest

from dms.core import (CayleyKlein, CouplingSet, DetuningProfile, ModelSpec,
                      PopulationDistribution, PulseShape, StateVector,
                      pulse_area, rms_area)


class TestCouplingSet:
    def test_rms_and_partial_norms(self):
        cs = CouplingSet([3.0, 4.0])
        assert cs.chi == 5.0
        np.testing.assert_allclose(cs.partial_norms, [3.0, 5.0])

    def test_partial_norms_monotone(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            cs = CouplingSet(rng.uniform(0.0, 2.0, rng.integers(2, 9)) + 1e-3)
            x = cs.partial_norms
            assert np.all(np.diff(x) >= 0)
            assert x[-1] == pytest.approx(cs.chi, rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            CouplingSet([])
        with pytest.raises(ValueError):
            CouplingSet([1.0, -0.5])
        with pytest.raises(ValueError):
            CouplingSet([0.0, 0.0])

    def test_scaled_to(self):
        cs = CouplingSet([1.0, 2.0, 2.0]).scaled_to(6.0)
        assert cs.chi == pytest.approx(6.0, rel=1e-15)
        np.testing.assert_allclose(cs.chis, [2.0, 4.0, 4.0])


class TestPulseShape:
    def test_sech_values(self):
        s = PulseShape.sech(2.0)
        assert s(0.0) == 1.0
        assert s(2.0) == pytest.approx(1.0 / math.cosh(1.0))

    def test_rect_support(self):
        r = PulseShape.rect(3.0)
        assert r(2.9) == 1.0 and r(3.0) == 1.0 and r(3.1) == 0.0

    def test_custom_interpolation_and_area(self):
        t = np.linspace(-1, 1, 2001)
        v = 1.0 - np.abs(t)  # triangle, area 1
        c = PulseShape.custom(t, v)
        assert c(0.0) == pytest.approx(1.0)
        assert c(5.0) == 0.0
        assert c.envelope_integral() == pytest.approx(1.0, abs=1e-12)

    def test_const_area_undefined(self):
        with pytest.raises(ValueError, match="area undefined"):
            PulseShape.const().envelope_integral()

    def test_custom_validation(self):
        with pytest.raises(ValueError):
            PulseShape.custom([0, 0, 1], [1, 1, 1])
        with pytest.raises(ValueError):
            PulseShape.custom([0, 1], [1, -1])


class TestAreas:
    def test_sech_area_single(self):
        cs = CouplingSet([1.0])
        assert pulse_area(cs, PulseShape.sech(1.0), 1) == pytest.approx(math.pi)

    def test_zero_coupling_zero_area(self):
        cs = CouplingSet([0.0, 1.0])
        assert pulse_area(cs, PulseShape.sech(1.0), 1) == 0.0

    def test_rect_area(self):
        cs = CouplingSet([2.0])
        assert pulse_area(cs, PulseShape.rect(3.0), 1) == pytest.approx(12.0)

    def test_rms_area_examples(self):
        assert rms_area(CouplingSet([3, 4]), PulseShape.sech(1.0)) == pytest.approx(5 * math.pi)
        assert rms_area(CouplingSet([1]), PulseShape.rect(0.5)) == pytest.approx(1.0)
        assert rms_area(CouplingSet([1, 1, 1]),
                        PulseShape.sech(1.0)) == pytest.approx(math.sqrt(3) * math.pi)

    def test_rms_is_root_sum_square_of_individual_areas(self):
        rng = np.random.default_rng(2)
        for _ in range(60):
            n = rng.integers(1, 8)
            cs = CouplingSet(rng.uniform(0.0, 3.0, n) + 1e-6)
            shape = PulseShape.sech(rng.uniform(0.5, 2.0))
            total = sum(pulse_area(cs, shape, k + 1) ** 2 for k in range(n))
            assert rms_area(cs, shape) ** 2 == pytest.approx(total, rel=1e-12)

    def test_const_shape_rejected(self):
        with pytest.raises(ValueError, match="area undefined"):
            rms_area(CouplingSet([1.0]), PulseShape.const())


class TestDetuningProfile:
    def test_profiles(self):
        assert DetuningProfile.zero()(3.0) == 0.0
        assert DetuningProfile.constant(2.5)(-1.0) == 2.5
        assert DetuningProfile.linear(2.0)(3.0) == 6.0
        d = DetuningProfile.tanh(1.0, 2.0, 0.5)
        assert d(0.0) == pytest.approx(1.0)
        assert d(50.0) == pytest.approx(3.0, abs=1e-12)

    def test_linear_needs_positive_slope(self):
        with pytest.raises(ValueError):
            DetuningProfile.linear(-1.0)


class TestModelSpec:
    def test_scaled_parameters(self):
        m = ModelSpec.demkov_kunike(chi=3.0, delta0=2.0, B=1.0, T=2.0)
        assert m.alpha == 3.0 and m.delta == 2.0 and m.beta == 1.0

    def test_nonnegative_parameters_enforced(self):
        with pytest.raises(ValueError):
            ModelSpec.rosen_zener(chi=1.0, delta0=-0.5)
        with pytest.raises(ValueError):
            ModelSpec.landau_zener(chi=1.0, C=-2.0)

    def test_lz_from_lambda(self):
        m = ModelSpec.landau_zener(Lambda=1.0, C=2.0)
        assert m.lz_lambda == pytest.approx(1.0, rel=1e-15)

    def test_resonance_ties_chi_to_area(self):
        m = ModelSpec.resonance(2 * math.pi)
        assert m.chi == pytest.approx(2.0)  # sech T=1: area = pi chi T


class TestContainers:
    def test_cayley_klein_unitarity_checked(self):
        CayleyKlein(a=0.6 + 0j, b=0.8j)
        with pytest.raises(ValueError):
            CayleyKlein(a=1.0 + 0j, b=0.5 + 0j)

    def test_population_distribution_validation(self):
        PopulationDistribution(probs=np.array([0.5, 0.5, 0.0]), initial_index=1)
        with pytest.raises(ValueError):
            PopulationDistribution(probs=np.array([0.7, 0.7]), initial_index=1)
        with pytest.raises(ValueError):
            PopulationDistribution(probs=np.array([0.5, 0.5]), initial_index=3)

    def test_state_vector_basis(self):
        sv = StateVector.basis(4, 4)
        assert sv.amplitudes[3] == 1.0
        assert sv.norm == 1.0
