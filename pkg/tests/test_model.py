import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from afmprobe import (
    CUBIC,
    SQUARE,
    InstabilityError,
    LatticeSpec,
    ModelParams,
    diagonal_frequencies,
    kittel_parameters,
    kpath,
    structure_factor,
)
from afmprobe.model import MU_B_MEV_PER_T, path_coordinate


def neighbor_sum_oracle(k, lattice):
    """Independent structure factor: explicit phase sum over the z
    neighbour vectors."""
    total = sum(cmath.exp(1j * np.dot(k, delta))
                for delta in lattice.neighbor_vectors())
    return (total / lattice.coordination).real


class TestStructureFactor:
    def test_square_zone_center(self):
        assert structure_factor((0.0, 0.0), SQUARE) == 1.0

    def test_square_staggered_point(self):
        assert structure_factor((np.pi, np.pi), SQUARE) == pytest.approx(-1.0, abs=1e-15)

    def test_cubic_against_neighbor_sum(self):
        k = (0.0, 0.0, np.pi)
        assert structure_factor(k, CUBIC) == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert structure_factor(k, CUBIC) == pytest.approx(
            neighbor_sum_oracle(k, CUBIC), abs=1e-12)

    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=3))
    def test_even_under_inversion(self, k):
        assert structure_factor(k, CUBIC) == pytest.approx(
            structure_factor([-x for x in k], CUBIC), abs=1e-12)

    @given(st.lists(st.floats(-10, 10), min_size=2, max_size=2))
    def test_matches_neighbor_sum(self, k):
        assert structure_factor(k, SQUARE) == pytest.approx(
            neighbor_sum_oracle(k, SQUARE), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            structure_factor((0.0, 0.0), CUBIC)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            structure_factor((np.nan, 0.0), SQUARE)


FIG2 = ModelParams(lattice=SQUARE, J=1.0, Kz=0.01, S=0.5)


class TestKittelParameters:
    def test_zone_boundary_decoupled(self):
        km = kittel_parameters((np.pi, 0.0), FIG2)
        assert km.g_mm == 0.0
        assert km.omega_a == pytest.approx(2.01, abs=1e-14)
        assert km.omega_b == pytest.approx(2.01, abs=1e-14)

    def test_zone_center_coupling(self):
        km = kittel_parameters((0.0, 0.0), FIG2)
        assert km.g_mm == pytest.approx(2.0, abs=1e-14)
        assert km.Gamma == pytest.approx(2.0 / 2.01, abs=1e-14)

    def test_field_splitting_any_k(self):
        m = ModelParams(lattice=SQUARE, J=1.0, Kz=0.01, muB_B=1.0, S=0.5)
        for k in [(0.3, 1.1), (2.0, -0.4)]:
            km = kittel_parameters(k, m)
            assert km.omega_a - km.omega_b == pytest.approx(2.0, abs=1e-14)

    def test_tesla_conversion(self):
        m = ModelParams.with_field_tesla(CUBIC, J=10.0, Kz=0.1, B_tesla=2.5)
        assert m.muB_B == pytest.approx(2.5 * MU_B_MEV_PER_T, abs=1e-15)
        assert m.muB_B == pytest.approx(0.1447, abs=1e-10)

    def test_spin_flop_field_raises(self):
        m = ModelParams(lattice=SQUARE, J=1.0, Kz=0.01, muB_B=3.0, S=0.5)
        with pytest.raises(InstabilityError):
            kittel_parameters((0.5, 0.5), m)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            ModelParams(lattice=SQUARE, J=-1.0)
        with pytest.raises(ValueError):
            ModelParams(lattice=SQUARE, J=1.0, S=0.0)
        with pytest.raises(ValueError):
            ModelParams(lattice=SQUARE, J=1.0, Kz=-0.1)


class TestDiagonalFrequencies:
    def test_anisotropy_gap_at_zone_center(self):
        disp = diagonal_frequencies(kittel_parameters((0.0, 0.0), FIG2))
        expected = 0.20024984394500786  # sqrt(2.01^2 - 2^2), high precision
        assert disp.omega_alpha == pytest.approx(expected, rel=1e-12)
        assert disp.omega_beta == pytest.approx(expected, rel=1e-12)

    def test_decoupled_limit(self):
        km = kittel_parameters((np.pi, 0.0), FIG2)
        disp = diagonal_frequencies(km)
        assert disp.omega_alpha == pytest.approx(km.omega_a, abs=1e-14)
        assert disp.omega_beta == pytest.approx(km.omega_b, abs=1e-14)

    def test_degenerate_without_field(self):
        for kx in np.linspace(0, np.pi, 31):
            for ky in np.linspace(0, np.pi, 7):
                disp = diagonal_frequencies(kittel_parameters((kx, ky), FIG2))
                assert disp.omega_alpha == disp.omega_beta

    def test_splitting_is_field_exactly(self):
        m = ModelParams(lattice=SQUARE, J=1.0, Kz=0.3, muB_B=0.5, S=0.5)
        for k in [(1.0, 2.0), (np.pi, 0.1), (0.4, -0.9)]:
            disp = diagonal_frequencies(kittel_parameters(k, m))
            assert disp.omega_alpha - disp.omega_beta == pytest.approx(1.0, abs=1e-12)

    def test_fig2_field_unstable_near_zone_center(self):
        m = ModelParams(lattice=SQUARE, J=1.0, Kz=0.01, muB_B=1.0, S=0.5)
        with pytest.raises(InstabilityError):
            diagonal_frequencies(kittel_parameters((0.05, 0.0), m))
        # but stable at the zone boundary
        disp = diagonal_frequencies(kittel_parameters((np.pi, 0.0), m))
        assert disp.omega_beta > 0


class TestKPath:
    def test_linear_interpolation(self):
        pts = kpath(SQUARE, [((0, 0), (np.pi, 0), 3)])
        assert np.allclose(pts, [(0, 0), (np.pi / 2, 0), (np.pi, 0)])

    def test_zero_length_segment(self):
        pts = kpath(SQUARE, [((1, 1), (1, 1), 4)])
        assert np.allclose(pts, np.ones((4, 2)))

    def test_fig5_direction(self):
        pts = kpath(CUBIC, [((0, 0, 0), (0, 0, np.pi), 11)])
        assert pts.shape == (11, 3)
        assert np.all(pts[:, :2] == 0)
        assert pts[-1, 2] == pytest.approx(np.pi)

    def test_empty_segments(self):
        with pytest.raises(ValueError):
            kpath(SQUARE, [])

    def test_count_too_small(self):
        with pytest.raises(ValueError):
            kpath(SQUARE, [((0, 0), (1, 0), 1)])

    def test_path_coordinate(self):
        pts = kpath(SQUARE, [((0, 0), (2, 0), 3)])
        assert np.allclose(path_coordinate(pts), [0, 1, 2])


class TestLatticeSpec:
    def test_coordination(self):
        assert SQUARE.coordination == 4
        assert CUBIC.coordination == 6

    def test_string_kind(self):
        assert LatticeSpec("cubic").coordination == 6

    def test_bad_lattice_constant(self):
        with pytest.raises(ValueError):
            LatticeSpec("square", lattice_constant=0.0)
