"""Tests for the 2D constrained-block construction and torus contraction.

The contraction is validated against the exhaustive hidden sum, which is the
defining oracle for the 2D amplitude; symmetry checks guard the fused-index
bookkeeping.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from comps import (
    CopepsBlock,
    Urbm2dParameters,
    build_copeps_block,
    copeps_amplitude_torus,
    copeps_hidden_factor,
    copeps_visible_factor,
    urbm2d_amplitude_direct,
)


def random_params(rng, layers=1, scale=0.5):
    return Urbm2dParameters(
        k0=rng.uniform(-scale, scale),
        k=rng.uniform(-scale, scale, layers),
        j=rng.uniform(-scale, scale, layers),
    )


def random_grid(rng, size):
    return rng.choice([-1, 1], size=(size, size))


class TestBlockFactors:
    def test_zero_couplings_visible_pattern(self):
        for sigma in (1, -1):
            aa = copeps_visible_factor(0.0, sigma)
            a = np.array([[1.0, 0.0], [sigma, 0.0]])
            assert_allclose(aa, np.einsum("ab,gd->abgd", a, a))

    def test_zero_couplings_hidden_is_delta_times_ones(self):
        params = Urbm2dParameters(k0=0.0, k=np.zeros(1), j=np.zeros(1))
        for sigma in (1, -1):
            bb = copeps_hidden_factor(params, sigma)
            expected = np.einsum("ab,gd,ag->abgd", np.ones((2, 2)), np.ones((2, 2)), np.eye(2))
            assert_allclose(bb, expected)

    def test_block_chi_matches_layers(self):
        rng = np.random.default_rng(1)
        for layers, chi in ((1, 4), (2, 8)):
            block = build_copeps_block(random_params(rng, layers))
            assert block.chi == chi

    def test_block_shape_validation(self):
        with pytest.raises(ValueError):
            CopepsBlock(np.zeros((2, 4, 4, 4)))
        bad = np.zeros((2, 4, 4, 4, 4))
        bad[0, 0, 0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            CopepsBlock(bad)


class TestTorusAmplitude:
    def test_zero_parameters_count_hidden_configs(self):
        """Every hidden configuration contributes 1, so the 3x3 single-layer
        amplitude is 2^9 regardless of the spin grid."""
        params = Urbm2dParameters(k0=0.0, k=np.zeros(1), j=np.zeros(1))
        block = build_copeps_block(params)
        rng = np.random.default_rng(2)
        for _ in range(3):
            grid = random_grid(rng, 3)
            assert_allclose(copeps_amplitude_torus(block, grid), 512.0, rtol=1e-12)

    def test_matches_exhaustive_sum_3x3(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            params = random_params(rng)
            block = build_copeps_block(params)
            for _ in range(4):
                grid = random_grid(rng, 3)
                assert_allclose(
                    copeps_amplitude_torus(block, grid),
                    urbm2d_amplitude_direct(params, grid),
                    rtol=1e-8,
                )

    def test_matches_exhaustive_sum_2x2_doubled_bonds(self):
        """On the 2-torus the wrapped neighbor sums visit each bond twice;
        contraction and oracle share that convention."""
        rng = np.random.default_rng(4)
        for _ in range(5):
            params = random_params(rng)
            block = build_copeps_block(params)
            grid = random_grid(rng, 2)
            assert_allclose(
                copeps_amplitude_torus(block, grid),
                urbm2d_amplitude_direct(params, grid),
                rtol=1e-8,
            )

    def test_two_layer_block_matches_oracle(self):
        rng = np.random.default_rng(5)
        params = random_params(rng, layers=2)
        block = build_copeps_block(params)
        grid = random_grid(rng, 3)
        assert_allclose(
            copeps_amplitude_torus(block, grid),
            urbm2d_amplitude_direct(params, grid),
            rtol=1e-8,
        )

    def test_translation_invariance(self):
        rng = np.random.default_rng(6)
        params = random_params(rng)
        block = build_copeps_block(params)
        grid = random_grid(rng, 3)
        base = copeps_amplitude_torus(block, grid)
        assert_allclose(copeps_amplitude_torus(block, np.roll(grid, 1, axis=0)), base, rtol=1e-10)
        assert_allclose(copeps_amplitude_torus(block, np.roll(grid, 1, axis=1)), base, rtol=1e-10)

    def test_global_spin_flip_invariance(self):
        rng = np.random.default_rng(7)
        params = random_params(rng)
        block = build_copeps_block(params)
        grid = random_grid(rng, 3)
        assert_allclose(
            copeps_amplitude_torus(block, -grid),
            copeps_amplitude_torus(block, grid),
            rtol=1e-10,
        )

    def test_transpose_symmetry(self):
        """The construction treats rows and columns on the same footing."""
        rng = np.random.default_rng(8)
        params = random_params(rng)
        block = build_copeps_block(params)
        grid = random_grid(rng, 3)
        assert_allclose(
            copeps_amplitude_torus(block, grid.T),
            copeps_amplitude_torus(block, grid),
            rtol=1e-10,
        )

    def test_unsupported_torus_size(self):
        params = Urbm2dParameters(k0=0.0, k=np.zeros(1), j=np.zeros(1))
        block = build_copeps_block(params)
        with pytest.raises(ValueError):
            copeps_amplitude_torus(block, np.ones((4, 4), dtype=int))

    def test_bad_grid_entries(self):
        params = Urbm2dParameters(k0=0.0, k=np.zeros(1), j=np.zeros(1))
        block = build_copeps_block(params)
        with pytest.raises(ValueError):
            copeps_amplitude_torus(block, np.zeros((3, 3), dtype=int))


class TestDirectOracle:
    def test_size_guard(self):
        params = Urbm2dParameters(k0=0.0, k=np.zeros(3), j=np.zeros(3))
        with pytest.raises(ValueError):
            urbm2d_amplitude_direct(params, np.ones((3, 3), dtype=int))

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            Urbm2dParameters(k0=np.inf, k=np.zeros(1), j=np.zeros(1))
        with pytest.raises(ValueError):
            Urbm2dParameters(k0=0.0, k=np.zeros(2), j=np.zeros(1))
