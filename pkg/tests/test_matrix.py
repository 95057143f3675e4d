import numpy as np
import pytest

from elma.matrix import (
    add_awgn,
    as_matrix,
    frobenius_norm_sq,
    make_rng,
    random_gaussian,
    read_matrix_csv,
    rng_from_key,
    write_matrix_csv,
)


class TestFrobeniusNormSq:
    def test_zero_matrix(self):
        assert frobenius_norm_sq(np.zeros((3, 3))) == 0.0

    def test_identity(self):
        assert frobenius_norm_sq(np.eye(2)) == 2.0

    def test_hand_sum(self):
        assert frobenius_norm_sq([[1.0, 2.0], [3.0, 4.0]]) == 30.0

    def test_equals_trace_of_gram(self):
        rng = make_rng(1)
        m = rng.standard_normal((17, 9))
        direct = frobenius_norm_sq(m)
        via_trace = float(np.trace(m.T @ m))
        assert abs(direct - via_trace) <= 1e-10 * via_trace

    def test_quadratic_scaling(self):
        rng = make_rng(2)
        m = rng.standard_normal((6, 11))
        base = frobenius_norm_sq(m)
        for c in (-3.7, -1.0, 0.0, 0.25, 19.5):
            assert frobenius_norm_sq(c * m) == pytest.approx(c * c * base, rel=1e-12)


class TestValidation:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="finite"):
            as_matrix([[1.0, float("nan")]])

    def test_rejects_inf(self):
        with pytest.raises(ValueError, match="finite"):
            as_matrix([[float("inf")], [0.0]])

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            as_matrix([1.0, 2.0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((0, 3)))


class TestAddAwgn:
    def test_sigma_zero_is_exact_copy(self):
        rng = make_rng(3)
        m = rng.standard_normal((5, 5))
        out = add_awgn(m, 0.0, make_rng(4))
        assert np.array_equal(out, m)
        assert out is not m

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError, match="sigma"):
            add_awgn(np.zeros((2, 2)), -0.1, make_rng(0))

    def test_noise_statistics(self):
        # 500x500 zeros at sigma = 2: mean within 0.05, std within 2%.
        out = add_awgn(np.zeros((500, 500)), 2.0, make_rng(5))
        assert abs(out.mean()) < 0.05
        assert abs(out.std() - 2.0) < 0.04

    def test_large_sample_statistics(self):
        sigma = 1.3
        n = 400 * 400
        m = np.zeros((400, 400))
        w = add_awgn(m, sigma, make_rng(6)) - m
        assert abs(w.mean()) < 4 * sigma / np.sqrt(n)
        assert abs(w.var() - sigma**2) < 0.05 * sigma**2

    def test_deterministic_per_seed(self):
        m = np.ones((8, 3))
        a = add_awgn(m, 1.5, make_rng(42))
        b = add_awgn(m, 1.5, make_rng(42))
        assert np.array_equal(a, b)


class TestRandomGaussian:
    def test_deterministic_per_seed(self):
        a = random_gaussian(1, 1, make_rng(9))
        b = random_gaussian(1, 1, make_rng(9))
        assert np.array_equal(a, b)

    def test_sample_mean(self):
        m = random_gaussian(1000, 1, make_rng(10))
        assert abs(m.mean()) < 0.1

    def test_shape(self):
        assert random_gaussian(2, 3, make_rng(0)).shape == (2, 3)

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            random_gaussian(0, 3, make_rng(0))


class TestRngDerivation:
    def test_key_streams_independent_and_stable(self):
        a = rng_from_key(0, 1, 2, 3).standard_normal(4)
        b = rng_from_key(0, 1, 2, 3).standard_normal(4)
        c = rng_from_key(0, 1, 2, 4).standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_negative_seed_accepted(self):
        assert make_rng(-7).random() == make_rng(-7).random()


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        rng = make_rng(11)
        m = rng.standard_normal((7, 4)) * 10.0 ** rng.integers(-8, 8, size=(7, 4))
        path = tmp_path / "m.csv"
        write_matrix_csv(m, path)
        assert np.array_equal(read_matrix_csv(path), m)

    def test_scientific_notation_accepted(self, tmp_path):
        path = tmp_path / "sci.csv"
        path.write_text("1e3,-2.5E-4\n+0.5,6.02e23\n")
        m = read_matrix_csv(path)
        assert m[0, 0] == 1000.0 and m[1, 1] == 6.02e23

    def test_ragged_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError, match="ragged"):
            read_matrix_csv(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,x\n")
        with pytest.raises(ValueError):
            read_matrix_csv(path)

    def test_non_finite_literal_rejected(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("1,inf\n2,3\n")
        with pytest.raises(ValueError, match="finite"):
            read_matrix_csv(path)
