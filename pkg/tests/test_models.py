import cmath
import math

import numpy as np
import pytest
import scipy.special

from dms.core import ModelSpec
from dms.models import (cayley_klein, gamma, lz_lambda, rz_abs_a_squared,
                        rz_integer_alpha_a)


class TestComplexGamma:
    def test_half_integer_values(self):
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_reflection_identity(self):
        # Gamma(1/2+z) Gamma(1/2-z) = pi / cos(pi z) over the working domain
        rng = np.random.default_rng(10)
        worst = 0.0
        for _ in range(3000):
            z = complex(rng.uniform(-20, 20), rng.uniform(-40, 40))
            lhs = gamma(0.5 + z) * gamma(0.5 - z)
            rhs = cmath.pi / cmath.cos(cmath.pi * z)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        assert worst < 1e-11

    def test_recurrence(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(3000):
            z = complex(rng.uniform(-20, 20), rng.uniform(-40, 40))
            if abs(z.imag) < 1e-3 and abs(z.real - round(z.real)) < 1e-3:
                continue  # stay clear of the poles
            g1, g0 = gamma(z + 1.0), gamma(z)
            worst = max(worst, abs(g1 - z * g0) / abs(g1))
        assert worst < 1e-12

    def test_against_scipy(self):
        rng = np.random.default_rng(12)
        for _ in range(500):
            z = complex(rng.uniform(-15, 15), rng.uniform(-30, 30))
            ref = scipy.special.gamma(z)
            if not np.isfinite(abs(ref)) or abs(ref) < 1e-280:
                continue
            assert abs(gamma(z) - ref) / abs(ref) < 1e-11


class TestResonance:
    def test_full_return_with_sign_flip(self):
        ck = cayley_klein(ModelSpec.resonance(2 * math.pi))
        assert ck.a == pytest.approx(-1.0, abs=1e-15)
        assert ck.b_phase_exact

    def test_half_pi_and_pi(self):
        ck = cayley_klein(ModelSpec.resonance(math.pi))
        assert abs(ck.a) < 1e-15
        assert ck.b == pytest.approx(-1j, abs=1e-15)


class TestRabi:
    def test_matches_matrix_exponential(self):
        # independent oracle: U = expm(-i H 2T) for the constant two-state block
        from scipy.linalg import expm
        rng = np.random.default_rng(13)
        for _ in range(40):
            chi, d0, T = rng.uniform(0.1, 4), rng.uniform(0, 4), rng.uniform(0.3, 2)
            h = 0.5 * np.array([[0, chi], [chi, 2 * d0]], dtype=complex)
            u = expm(-1j * h * 2 * T)
            ck = cayley_klein(ModelSpec.rabi(chi=chi, delta0=d0, T=T))
            assert abs(ck.a - u[0, 0]) < 1e-12

    def test_resonant_limit_is_area_law(self):
        ck = cayley_klein(ModelSpec.rabi(chi=1.5, delta0=0.0, T=2.0))
        assert ck.a == pytest.approx(math.cos(1.5 * 2.0), abs=1e-15)  # area 2 chi T


class TestLandauZener:
    def test_half_survival(self):
        # invert a = exp(-pi chi^2 / 4C) at a = 1/2
        chi2_over_c = 4.0 * math.log(2.0) / math.pi
        ck = cayley_klein(ModelSpec.landau_zener(chi=math.sqrt(chi2_over_c), C=1.0))
        assert ck.a.real == pytest.approx(0.5, rel=1e-14)

    def test_real_positive_and_limits(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            ck = cayley_klein(ModelSpec.landau_zener(chi=rng.uniform(0.01, 5),
                                                     C=rng.uniform(0.1, 5)))
            assert ck.a.imag == 0.0
            assert 0.0 < ck.a.real <= 1.0
        assert cayley_klein(ModelSpec.landau_zener(chi=1e-8, C=1.0)).a.real \
            == pytest.approx(1.0, abs=1e-12)
        assert cayley_klein(ModelSpec.landau_zener(chi=40.0, C=1.0)).a.real \
            == pytest.approx(0.0, abs=1e-12)

    def test_lambda_helper(self):
        assert lz_lambda(2.0, 1.0) == pytest.approx(math.pi)
        with pytest.raises(ValueError):
            lz_lambda(1.0, 0.0)


class TestRosenZener:
    def test_full_return_at_even_chi_t(self):
        ck = cayley_klein(ModelSpec.rosen_zener(chi=2.0, delta0=0.0, T=1.0))
        assert ck.a == pytest.approx(-1.0, abs=1e-12)

    def test_table_row_chi_t_4(self):
        # printed root 1.732; exact root sqrt(3) since atan x + atan(x/3) = pi/2
        ck = cayley_klein(ModelSpec.rosen_zener(chi=4.0, delta0=1.732, T=1.0))
        assert abs(ck.a + 1.0) < 2e-3
        ck = cayley_klein(ModelSpec.rosen_zener(chi=4.0, delta0=math.sqrt(3.0), T=1.0))
        assert abs(ck.a + 1.0) < 1e-10

    def test_abs_a_squared_examples(self):
        assert rz_abs_a_squared(1.0, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert rz_abs_a_squared(0.5, 0.0) == pytest.approx(0.0, abs=1e-15)
        expected = 1 - math.sin(1.5 * math.pi) ** 2 / math.cosh(math.pi) ** 2
        assert rz_abs_a_squared(1.5, 1.0) == pytest.approx(expected, rel=1e-14)

    def test_gamma_form_matches_closed_form_on_grid(self):
        worst = 0.0
        for alpha in np.linspace(0, 15, 41):
            for delta in np.linspace(0, 25, 41):
                a = cayley_klein(ModelSpec.rosen_zener(chi=2 * alpha, delta0=2 * delta)).a
                worst = max(worst, abs(abs(a) ** 2 - rz_abs_a_squared(alpha, delta)))
        assert worst < 1e-10

    def test_half_odd_integer_alpha_gives_full_transfer(self):
        # the pole-free evaluation must give a = 0 cleanly at alpha = l + 1/2
        ck = cayley_klein(ModelSpec.rosen_zener(chi=3.0, delta0=0.0, T=1.0))
        assert abs(ck.a) < 1e-13


class TestIntegerAlphaProduct:
    def test_examples(self):
        assert rz_integer_alpha_a(1, 0.0) == pytest.approx(-1.0)
        assert abs(rz_integer_alpha_a(2, math.sqrt(3.0)) + 1.0) < 1e-10
        assert rz_integer_alpha_a(1, 1e6).real == pytest.approx(1.0, abs=1e-5)

    def test_unimodular(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            a = rz_integer_alpha_a(int(rng.integers(1, 16)), rng.uniform(0, 100))
            assert abs(abs(a) - 1.0) < 1e-12

    def test_matches_gamma_form(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            l = int(rng.integers(1, 16))
            x = rng.uniform(0, 60)
            a_prod = rz_integer_alpha_a(l, x)
            a_gamma = cayley_klein(ModelSpec.rosen_zener(chi=2 * l, delta0=x, T=1.0)).a
            assert abs(a_prod - a_gamma) < 1e-10


class TestDemkovKunikeFamily:
    def test_reduces_to_rz_at_zero_sweep(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            chi, d0 = rng.uniform(0.1, 6), rng.uniform(0, 6)
            a_dk = cayley_klein(ModelSpec.demkov_kunike(chi=chi, delta0=d0, B=0.0)).a
            a_rz = cayley_klein(ModelSpec.rosen_zener(chi=chi, delta0=d0)).a
            assert abs(a_dk - a_rz) < 1e-12

    def test_reduces_to_ae_at_zero_static_detuning(self):
        rng = np.random.default_rng(18)
        for _ in range(50):
            chi, b = rng.uniform(0.1, 6), rng.uniform(0.0, 6)
            a_dk = cayley_klein(ModelSpec.demkov_kunike(chi=chi, delta0=0.0, B=b)).a
            a_ae = cayley_klein(ModelSpec.allen_eberly(chi=chi, B=b)).a
            assert abs(a_dk - a_ae) < 1e-12

    def test_ae_continuation_beyond_alpha(self):
        # beta > alpha: cos of imaginary argument continues to cosh, a stays real
        ck = cayley_klein(ModelSpec.allen_eberly(chi=1.0, B=3.0))
        expected = math.cosh(math.pi * math.sqrt(1.5 ** 2 - 0.5 ** 2)) \
            / math.cosh(math.pi * 1.5)
        assert ck.a.real == pytest.approx(expected, rel=1e-13)
        assert ck.a.imag == 0.0


class TestUnitarity:
    def test_norm_identity_all_models(self):
        rng = np.random.default_rng(19)
        specs = []
        for _ in range(50):
            specs += [
                ModelSpec.resonance(rng.uniform(0, 14)),
                ModelSpec.rabi(chi=rng.uniform(0.1, 4), delta0=rng.uniform(0, 4)),
                ModelSpec.landau_zener(chi=rng.uniform(0.05, 3), C=rng.uniform(0.2, 3)),
                ModelSpec.rosen_zener(chi=rng.uniform(0.1, 6), delta0=rng.uniform(0, 6)),
                ModelSpec.allen_eberly(chi=rng.uniform(0.1, 6), B=rng.uniform(0, 6)),
                ModelSpec.demkov_kunike(chi=rng.uniform(0.1, 6), delta0=rng.uniform(0, 6),
                                        B=rng.uniform(0, 6)),
            ]
        for spec in specs:
            assert abs(cayley_klein(spec).norm_defect) < 1e-12
