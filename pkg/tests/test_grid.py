"""Grid construction, FFT round trips, Parseval, spectral derivatives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotgpe import ComplexField, fft_forward, fft_inverse, make_grid, mass, spectral_derivative
from rotgpe.selfcheck import random_envelope_field


class TestMakeGrid:
    def test_basic_2d(self):
        g = make_grid(2, [8, 8], [4.0, 4.0])
        assert g.h == (1.0, 1.0)
        assert g.x[0][0] == -4.0 and g.x[0][-1] == 3.0

    def test_fine_2d_spacing(self):
        g = make_grid(2, [256, 256], [8.0, 8.0])
        assert g.h == (1.0 / 16.0, 1.0 / 16.0)

    def test_3d_point_count(self):
        g = make_grid(3, [32, 32, 32], [6.0, 6.0, 6.0])
        assert g.npoints == 32768

    def test_spacing_identity_exact(self):
        # h * n == 2 L exactly: powers of two divide exactly in binary
        for n in (8, 64, 128, 512):
            g = make_grid(2, n, 7.3)
            for hj, nj, Lj in zip(g.h, g.n, g.L):
                assert hj * nj == 2.0 * Lj

    def test_coordinates_increasing(self):
        g = make_grid(2, 64, 8.0)
        for xj in g.x:
            assert np.all(np.diff(xj) > 0)
            # symmetric about zero up to one grid offset
            assert xj[0] == -g.L[0]
            assert abs(xj[-1] + xj[0] + g.h[0]) < 1e-15

    def test_wavenumbers(self):
        g = make_grid(2, 64, 8.0)
        for kj, Lj, nj in zip(g.k, g.L, g.n):
            assert kj[0] == 0.0
            assert abs(kj[1] - np.pi / Lj) < 1e-15
            # Nyquist entry sits at index n/2 in FFT ordering
            assert abs(abs(kj[nj // 2]) - np.pi * (nj // 2) / Lj) < 1e-12

    @pytest.mark.parametrize("bad_n", [7, 12, 100, 4])
    def test_rejects_non_power_of_two(self, bad_n):
        with pytest.raises(ValueError):
            make_grid(2, bad_n, 8.0)

    @pytest.mark.parametrize("bad_d", [1, 4, 0])
    def test_rejects_bad_dimension(self, bad_d):
        with pytest.raises(ValueError):
            make_grid(bad_d, 16, 8.0)

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValueError):
            make_grid(2, 16, 0.0)


class TestFFT:
    def test_roundtrip_random(self, grid128, rng):
        f = random_envelope_field(grid128, rng)
        back = fft_inverse(fft_forward(f))
        assert np.max(np.abs(back.data - f.data)) < 1e-13

    def test_constant_field_dc_mode(self, grid64):
        f = ComplexField(grid64, np.ones(grid64.shape, dtype=complex))
        fh = fft_forward(f)
        total = (np.abs(fh.data) ** 2).sum()
        assert abs(fh.data[0, 0]) ** 2 / total > 1.0 - 1e-14

    def test_parseval_gaussian(self, gauss128):
        g = gauss128.grid
        phys = mass(gauss128)
        four = float((np.abs(fft_forward(gauss128).data) ** 2).sum() * g.cell_volume)
        assert abs(phys - four) / phys < 1e-12

    def test_space_flag_enforced(self, gauss128):
        with pytest.raises(ValueError):
            fft_inverse(gauss128)
        with pytest.raises(ValueError):
            fft_forward(fft_forward(gauss128))

    def test_periodization_error_gaussian_mass(self, grid128):
        # L = 8 is 8 standard deviations of exp(-|x|^2/2): tail mass < 1e-12
        g = grid128
        data = np.exp(-0.5 * g.radius_squared()) / np.sqrt(np.pi)
        f = ComplexField(g, data.astype(complex))
        assert abs(mass(f) - 1.0) < 1e-12


class TestSpectralDerivative:
    def test_plane_wave_eigenfunction(self, grid128):
        g = grid128
        k = g.k[0][5]
        f = ComplexField(g, np.exp(1j * k * g.coordinate(0)) * np.ones(g.shape, complex))
        df = spectral_derivative(f, 0)
        assert np.max(np.abs(df.data - 1j * k * f.data)) < 1e-12

    def test_gaussian_derivative(self, grid128):
        g = grid128
        f = ComplexField(g, np.exp(-0.5 * g.radius_squared()).astype(complex))
        df = spectral_derivative(f, 0)
        exact = -g.coordinate(0) * f.data
        assert np.max(np.abs(df.data - exact)) < 1e-10

    def test_constant_along_axis_annihilated(self, grid128):
        g = grid128
        data = np.exp(-0.5 * g.coordinate(0) ** 2) * np.ones(g.shape, complex)
        df = spectral_derivative(ComplexField(g, data), 1)
        assert np.max(np.abs(df.data)) < 1e-12

    @settings(max_examples=10, deadline=None)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linearity(self, grid64, a, b):
        rng = np.random.default_rng(99)
        f = random_envelope_field(grid64, rng)
        g = random_envelope_field(grid64, rng)
        lhs = spectral_derivative(
            ComplexField(grid64, a * f.data + b * g.data), 0).data
        rhs = a * spectral_derivative(f, 0).data + b * spectral_derivative(g, 0).data
        assert np.max(np.abs(lhs - rhs)) < 1e-11 * (1 + abs(a) + abs(b))

    def test_3d_axis(self, grid3d):
        # n = 32^3 at L = 6 resolves the Gaussian spectrum to ~1e-7 only
        g = grid3d
        f = ComplexField(g, np.exp(-0.5 * g.radius_squared()).astype(complex))
        df = spectral_derivative(f, 2)
        exact = -g.coordinate(2) * f.data
        assert np.max(np.abs(df.data - exact)) < 1e-6

    def test_axis_bounds(self, gauss128):
        with pytest.raises(ValueError):
            spectral_derivative(gauss128, 2)


class TestComplexField:
    def test_shape_validation(self, grid64):
        with pytest.raises(ValueError):
            ComplexField(grid64, np.zeros((4, 4), dtype=complex))

    def test_finite_detection(self, grid64):
        f = ComplexField(grid64, np.zeros(grid64.shape, dtype=complex))
        assert f.is_finite()
        f.data[3, 3] = np.nan
        assert not f.is_finite()
