"""Transform, truth-table and truncation tests against direct-summation oracles."""

from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import direct_residuals, direct_transform
from walshlab.core import (
    BooleanFunction,
    _butterfly,
    _float_transform,
    LowFrequencyData,
    Spectrum,
    low_frequency_data,
    low_masks,
    mask_degrees,
    parse_wbf,
    read_wbf,
    spectrum,
    truncate,
    truncate_batch,
    walsh_sign,
    wht,
)
from walshlab.rng import sample_signs


def functions(max_p=8):
    @st.composite
    def build(draw):
        p = draw(st.integers(1, max_p))
        bits = draw(st.lists(st.integers(0, 1), min_size=1 << p, max_size=1 << p))
        return BooleanFunction.from_bits(p, bits)
    return build()


class TestWalshHadamard:
    def test_constant(self):
        assert wht([1, 1, 1, 1]).tolist() == [4, 0, 0, 0]

    def test_single_character(self):
        assert wht([1, -1, 1, -1]).tolist() == [0, 4, 0, 0]

    def test_self_inverse_exhaustive_p2(self):
        """Every vector in {-2,-1,0,1}^4 (256 of them) against the O(N^2) oracle."""
        for v in product((-2, -1, 0, 1), repeat=4):
            s = wht(list(v))
            assert s.tolist() == direct_transform(list(v))
            assert wht(s).tolist() == [4 * x for x in v]

    @pytest.mark.parametrize("p", range(0, 9))
    def test_matches_direct_sum(self, p):
        v = np.random.default_rng(p).integers(-50, 50, size=1 << p)
        assert wht(v).tolist() == direct_transform(v.tolist())

    def test_batch_rows_independent(self):
        rows = np.random.default_rng(3).integers(-9, 9, size=(5, 64))
        out = wht(rows)
        for r, o in zip(rows, out):
            assert np.array_equal(wht(r), o)

    def test_large_entries_exact(self):
        v = np.full(1 << 6, 2**32, dtype=np.int64)
        v[::3] = -(2**32)
        assert wht(v).tolist() == direct_transform([int(x) for x in v])

    def test_int64_path_at_full_scale(self):
        """bound * N = 2**53 leaves the float path; a scaled character has a one-hot transform."""
        p, mask = 21, 0b101100111000010110101
        v = (2**32) * walsh_sign(np.arange(1 << p), mask)
        out = wht(v)
        assert out[mask] == 2**32 * (1 << p)
        assert np.count_nonzero(out) == 1

    @given(st.integers(0, 12), st.integers(0, 2**32 - 1))
    def test_float_and_integer_paths_agree(self, p, seed):
        rows = np.random.default_rng(seed).integers(-(2**20), 2**20, size=(3, 1 << p))
        ref = rows.copy()
        _butterfly(ref)
        assert np.array_equal(_float_transform(rows, 1 << p), ref)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError, match="power of two"):
            wht([1, 2, 3])

    def test_rejects_overflow(self):
        with pytest.raises(ValueError, match="2\\*\\*32"):
            wht(np.array([2**32 + 1, 0], dtype=np.int64))

    def test_rejects_float(self):
        with pytest.raises(TypeError):
            wht(np.array([1.0, 2.0]))

    @given(st.integers(0, 10).flatmap(
        lambda p: st.lists(st.integers(-(2**20), 2**20), min_size=1 << p, max_size=1 << p)))
    def test_self_inversion_property(self, v):
        a = np.array(v, dtype=np.int64)
        assert np.array_equal(wht(wht(a)), len(v) * a)


class TestBooleanFunction:
    def test_bit_convention(self):
        f = BooleanFunction.from_bits(2, [0, 1, 1, 0])
        assert f.signs().tolist() == [1, -1, -1, 1]
        assert BooleanFunction.constant(3).packed == b"\x00"

    def test_padding_must_be_zero(self):
        with pytest.raises(ValueError):
            BooleanFunction(2, b"\xff")

    def test_p_range(self):
        with pytest.raises(ValueError):
            BooleanFunction.constant(0)
        with pytest.raises(ValueError):
            BooleanFunction.from_bits(25, [])

    def test_character_is_parity(self):
        f = BooleanFunction.character(3, 7)
        assert f.signs().tolist() == [1, -1, -1, 1, -1, 1, 1, -1]

    def test_flip_and_negation(self):
        f = BooleanFunction.constant(3)
        assert f.flip(range(8)) == -f
        assert f.flip([2]).bits().tolist() == [0, 0, 1, 0, 0, 0, 0, 0]
        assert hash(-(-f)) == hash(f)

    @given(functions(10))
    def test_wbf_round_trip(self, f):
        assert parse_wbf(f.to_wbf()) == f

    def test_read_wbf(self, tmp_path):
        path = tmp_path / "f.wbf"
        path.write_text("WBF1\n2\n+--+\n")
        assert read_wbf(path) == BooleanFunction.character(2, 3)

    @pytest.mark.parametrize("text", [
        "WBF1\n2\n+--+\n\n",
        "WBF1\n2\n+--+x\n",
        "WBF2\n2\n+--+\n",
        "WBF1\n+2\n+--+\n",
        "WBF1\n 2\n+--+\n",
        "WBF1\n2\n+--\n",
        "WBF1\n2\n+-0+\n",
        "WBF1\r\n2\r\n+--+\r\n",
        "WBF1\n2",
        "WBF1\n0\n+\n",
        "",
    ])
    def test_wbf_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_wbf(text)


class TestSpectrum:
    def test_minus_one(self):
        s = spectrum(BooleanFunction.constant(3, -1))
        assert s.coeffs.tolist() == [-8, 0, 0, 0, 0, 0, 0, 0]

    def test_parity(self):
        s = spectrum(BooleanFunction.character(3, 7))
        assert s.coeffs.tolist() == [0] * 7 + [8]

    def test_random_p10_parseval_and_oracle(self):
        f = BooleanFunction.from_signs(10, sample_signs(10, 99, [0])[0])
        s = spectrum(f)
        assert int((s.coeffs**2).sum()) == 2**20
        signs = f.signs().tolist()
        for J in (0, 1, 5, 513, 1023):
            assert s.coeffs[J] == sum(signs[m] * (-1) ** bin(m & J).count("1") for m in range(1024))

    def test_fourier_fraction(self):
        s = spectrum(BooleanFunction.from_bits(2, [1, 0, 0, 0]))
        assert s.fourier(0) == pytest.approx(0.5) and s.fourier(0).denominator == 2

    def test_coeffs_readonly(self):
        s = spectrum(BooleanFunction.constant(2))
        with pytest.raises(ValueError):
            s.coeffs[0] = 1

    @given(functions())
    def test_invariants(self, f):
        s = spectrum(f).coeffs
        n = f.n
        assert np.all(np.abs(s) <= n)
        assert np.all((s - n) % 2 == 0)
        assert int((s**2).sum()) == n * n

    @given(functions())
    def test_negation_symmetry(self, f):
        assert np.array_equal(spectrum(-f).coeffs, -spectrum(f).coeffs)

    @given(functions(7), st.randoms(use_true_random=False))
    def test_coordinate_permutation(self, f, rnd):
        p = f.p
        sigma = list(range(p))
        rnd.shuffle(sigma)

        def perm(m):
            return sum(((m >> i) & 1) << sigma[i] for i in range(p))

        idx = np.array([perm(m) for m in range(f.n)])
        g = BooleanFunction.from_signs(p, f.signs()[idx])
        assert np.array_equal(spectrum(g).coeffs, spectrum(f).coeffs[idx])


class TestLowFrequencyData:
    def test_sizes(self):
        s = spectrum(BooleanFunction.character(4, 3))
        assert low_frequency_data(s, 4).entries.size == 16
        assert low_frequency_data(s, 0).entries.tolist() == [0]
        assert low_frequency_data(s, 1).entries.size == 5

    def test_mask_order(self):
        assert low_masks(3, 1).tolist() == [0, 1, 2, 4]
        assert mask_degrees(3).tolist() == [0, 1, 1, 2, 1, 2, 2, 3]

    def test_degree_range(self):
        s = spectrum(BooleanFunction.constant(3))
        for d in (-1, 4):
            with pytest.raises(ValueError):
                low_frequency_data(s, d)
        with pytest.raises(TypeError):
            low_frequency_data(s, 1.5)

    def test_count_validated(self):
        with pytest.raises(ValueError):
            LowFrequencyData(4, 1, [1, 2, 3])

    def test_equality_and_key(self):
        a = LowFrequencyData(3, 1, [8, 0, 0, 0])
        b = LowFrequencyData(3, 1, np.array([8, 0, 0, 0]))
        assert a == b and hash(a) == hash(b) and a.key() == b.key()
        assert a != LowFrequencyData(3, 1, [8, 0, 0, 2])

    def test_spectrum_shape_validated(self):
        with pytest.raises(ValueError):
            Spectrum(3, [0] * 7)


class TestTruncation:
    def test_full_degree_exact(self):
        f = BooleanFunction.from_signs(6, sample_signs(6, 1, [0])[0])
        tr = truncate(f, 6)
        assert not tr.residual_numerators.any()
        assert np.array_equal(tr.trunc_numerators, 64 * f.signs())

    @pytest.mark.parametrize("p", range(1, 9))
    def test_parity_has_no_low_mass(self, p):
        f = BooleanFunction.character(p, (1 << p) - 1)
        for d in range(p):
            tr = truncate(f, d)
            assert not tr.trunc_numerators.any()
            assert np.all(np.abs(tr.residual_numerators) == 1 << p)

    def test_majority_against_direct_sum(self):
        # majority of three coordinates
        signs = [1 if bin(m).count("1") <= 1 else -1 for m in range(8)]
        f = BooleanFunction.from_signs(3, signs)
        t, rho = direct_residuals(3, 1, signs)
        tr = truncate(f, 1)
        assert tr.trunc_numerators.tolist() == t
        assert tr.residual_numerators.tolist() == rho
        assert t == [12, 4, 4, -4, 4, -4, -4, -12]

    @given(functions(), st.data())
    def test_parseval_on_complement(self, f, data):
        d = data.draw(st.integers(0, f.p))
        tr = truncate(f, d)
        s = spectrum(f).coeffs
        high = mask_degrees(f.p) > d
        assert int((tr.residual_numerators**2).sum()) == f.n * int((s[high] ** 2).sum())
        assert int((s[~high] ** 2).sum()) + int((s[high] ** 2).sum()) == f.n**2
        assert np.all(tr.trunc_numerators % 2 == 0)
        assert np.all(tr.residual_numerators % 2 == 0)

    def test_batch_matches_single(self):
        signs = sample_signs(7, 5, range(6))
        t, rho = truncate_batch(signs, 3)
        for row, tt, rr in zip(signs, t, rho):
            tr = truncate(BooleanFunction.from_signs(7, row), 3)
            assert np.array_equal(tt, tr.trunc_numerators)
            assert np.array_equal(rr, tr.residual_numerators)

    def test_walsh_sign_broadcast(self):
        assert walsh_sign(np.arange(4)[:, None], np.arange(4)[None, :]).tolist() == [
            [1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]
