import numpy as np
import pytest

from wavecore import CoreGeometry, NoiseSpec, QuantSpec
from wavecore.conv import conv_oracle, im2col, integer_out_quant, lowered_weight_matrix, run_conv
from wavecore.engine import DIFFERENTIAL_PAIR, ZERO_NOISE


def random_instance(rng, k, c_in_max=4, c_out_max=4, spatial_max=6, levels=16):
    c_in = int(rng.integers(1, c_in_max + 1))
    c_out = int(rng.integers(1, c_out_max + 1))
    h = int(rng.integers(k, spatial_max + 1))
    w = int(rng.integers(k, spatial_max + 1))
    acts = rng.integers(0, levels, size=(c_in, h, w)).astype(float)
    weights = rng.integers(0, levels, size=(c_out, c_in, k, k)).astype(float)
    return acts, weights


def grids(levels=16):
    return (
        QuantSpec(bits=4, lo=0.0, hi=float(levels - 1)),
        QuantSpec(bits=4, lo=0.0, hi=float(levels - 1)),
    )


class TestIm2col:
    def test_reconstructs_matmul_conv(self):
        rng = np.random.default_rng(0)
        acts, weights = random_instance(rng, k=3)
        cols = im2col(acts, 3)
        mat = lowered_weight_matrix(weights)
        direct = conv_oracle(acts, weights)
        lowered = (mat.T @ cols).reshape(direct.shape)
        assert np.array_equal(lowered, direct)

    def test_stride_two(self):
        rng = np.random.default_rng(1)
        acts = rng.integers(0, 8, size=(2, 7, 7)).astype(float)
        weights = rng.integers(0, 8, size=(3, 2, 3, 3)).astype(float)
        cols = im2col(acts, 3, stride=2)
        mat = lowered_weight_matrix(weights)
        direct = conv_oracle(acts, weights, stride=2)
        assert np.array_equal((mat.T @ cols).reshape(direct.shape), direct)


class TestEngineConvMatchesOracle:
    @pytest.mark.parametrize("k", [1, 3])
    @pytest.mark.parametrize("pack", [False, True])
    def test_zero_noise_exact(self, k, pack):
        geom = CoreGeometry(18, 8)
        rng = np.random.default_rng(42 + k)
        in_q, w_q = grids()
        for _ in range(25):
            acts, weights = random_instance(rng, k=k)
            out_q = integer_out_quant(in_q, w_q, rows=acts.shape[0] * k * k)
            got = run_conv(acts, weights, geom, in_q, w_q, out_q, ZERO_NOISE, pack_pointwise=pack)
            assert np.array_equal(got, conv_oracle(acts, weights))

    def test_stride_two_exact(self):
        geom = CoreGeometry(9, 8)
        rng = np.random.default_rng(9)
        in_q, w_q = grids()
        acts = rng.integers(0, 16, size=(3, 7, 7)).astype(float)
        weights = rng.integers(0, 16, size=(5, 3, 3, 3)).astype(float)
        out_q = integer_out_quant(in_q, w_q, rows=27)
        got = run_conv(acts, weights, geom, in_q, w_q, out_q, ZERO_NOISE, stride=2)
        assert np.array_equal(got, conv_oracle(acts, weights, stride=2))

    def test_row_tiling_partials_sum_exactly(self):
        # any row-tile partition of the same instance gives the identical result
        rng = np.random.default_rng(23)
        acts, weights = random_instance(rng, k=3, c_in_max=8, spatial_max=5)
        in_q, w_q = grids()
        out_q = integer_out_quant(in_q, w_q, rows=acts.shape[0] * 9)
        outputs = [
            run_conv(acts, weights, CoreGeometry(groups * 9, 8), in_q, w_q, out_q, ZERO_NOISE)
            for groups in (1, 2, 4, 16)
        ]
        for y in outputs[1:]:
            assert np.array_equal(y, outputs[0])

    def test_column_tiling_exact(self):
        rng = np.random.default_rng(31)
        acts = rng.integers(0, 16, size=(2, 5, 5)).astype(float)
        weights = rng.integers(0, 16, size=(20, 2, 3, 3)).astype(float)
        in_q, w_q = grids()
        out_q = integer_out_quant(in_q, w_q, rows=18)
        got = run_conv(acts, weights, CoreGeometry(18, 8), in_q, w_q, out_q, ZERO_NOISE)
        assert np.array_equal(got, conv_oracle(acts, weights))

    def test_signed_weights_differential(self):
        rng = np.random.default_rng(37)
        acts = rng.integers(0, 16, size=(2, 5, 5)).astype(float)
        weights = rng.integers(-15, 16, size=(3, 2, 3, 3)).astype(float)
        in_q = QuantSpec(bits=4, lo=0.0, hi=15.0)
        w_q = QuantSpec(bits=4, lo=-15.0, hi=15.0, signed_mode=DIFFERENTIAL_PAIR)
        got = run_conv(acts, weights, CoreGeometry(18, 8), in_q, w_q, None, ZERO_NOISE)
        assert np.allclose(got, conv_oracle(acts, weights))

    def test_noisy_run_is_reproducible(self):
        rng = np.random.default_rng(41)
        acts, weights = random_instance(rng, k=3)
        in_q, w_q = grids()
        noise = NoiseSpec(seed=5)
        geom = CoreGeometry(36, 8)
        a = run_conv(acts, weights, geom, in_q, w_q, None, noise)
        b = run_conv(acts, weights, geom, in_q, w_q, None, noise)
        assert np.array_equal(a, b)
