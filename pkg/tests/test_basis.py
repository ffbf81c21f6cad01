import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_jacobi, eval_sh_legendre

from sivfie.basis import (
    BasisOverflowError,
    build_basis,
    eval_basis_1d,
    eval_basis_2d,
    jacobi_crosscheck,
    monomials,
)
from sivfie.opmat import gram_matrix_1d
from sivfie.quadproj import gauss_legendre_rule

SQ3 = np.sqrt(3.0)
GRID = np.linspace(0.0, 1.0, 11)
_TOO_WIDE = pytest.mark.xfail(
    strict=True,
    reason="entries of H reach 1e5-1e7; rounding H to double alone moves "
           "H @ Hinv by more than the 1e-12 target",
)


class TestBuildBasis:
    def test_chelyshkov_degree_one(self):
        b = build_basis("chelyshkov", 1)
        assert b.int_coeffs == ((2, -3), (0, 1))
        np.testing.assert_allclose(b.H, [[2.0, -3.0], [0.0, SQ3]], rtol=0, atol=1e-15)

    def test_chelyshkov_degree_zero(self):
        b = build_basis("chelyshkov", 0)
        np.testing.assert_array_equal(b.H, [[1.0]])

    def test_shifted_legendre_degree_one(self):
        b = build_basis("slp", 1)
        np.testing.assert_allclose(b.H, [[1.0, 0.0], [-SQ3, 2 * SQ3]], atol=1e-15)

    @pytest.mark.parametrize("kind,N", [
        pytest.param(kind, N, marks=_TOO_WIDE)
        if (kind == "chelyshkov" and N >= 8) or (kind == "slp" and N >= 9)
        else (kind, N)
        for kind in ("chelyshkov", "slp") for N in range(11)
    ])
    def test_inverse(self, kind, N):
        b = build_basis(kind, N)
        assert np.max(np.abs(b.H @ b.Hinv - np.eye(N + 1))) < 1e-12

    @pytest.mark.parametrize("N", range(9))
    def test_chelyshkov_triangular_with_closed_form_diagonal(self, N):
        from math import comb

        H = build_basis("chelyshkov", N).H
        assert np.all(np.tril(H, -1) == 0)
        diag = [np.sqrt(2 * i + 1) * comb(N + i + 1, N - i) for i in range(N + 1)]
        np.testing.assert_allclose(np.diag(H), diag, rtol=1e-15)

    def test_top_right_entry_follows_expansion(self):
        from math import comb

        N = 4
        b = build_basis("chelyshkov", N)
        assert b.int_coeffs[0][N] == (-1) ** N * comb(2 * N + 1, N)

    def test_overflow_is_loud(self):
        build_basis("chelyshkov", 26)
        with pytest.raises(BasisOverflowError):
            build_basis("chelyshkov", 27)
        with pytest.raises(BasisOverflowError):
            build_basis("slp", 40)

    @pytest.mark.parametrize("bad", [-1, 1.5])
    def test_invalid_degree(self, bad):
        with pytest.raises(ValueError):
            build_basis("chelyshkov", bad)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown basis kind"):
            build_basis("hermite", 2)

    def test_immutable(self):
        b = build_basis("chelyshkov", 2)
        with pytest.raises(ValueError):
            b.H[0, 0] = 1.0


class TestEvaluation:
    def test_endpoints_degree_one(self):
        b = build_basis("chelyshkov", 1)
        np.testing.assert_allclose(eval_basis_1d(b, 0.0), [2.0, 0.0])
        np.testing.assert_allclose(eval_basis_1d(b, 1.0), [-1.0, SQ3])

    @pytest.mark.parametrize("N", range(1, 7))
    def test_last_member_vanishes_at_zero(self, N):
        assert eval_basis_1d(build_basis("chelyshkov", N), 0.0)[N] == 0.0

    @pytest.mark.parametrize("N", [0, 1, 2, 5, 8])
    def test_shifted_legendre_matches_scipy(self, N):
        vals = eval_basis_1d(build_basis("slp", N), GRID)
        ref = np.stack([np.sqrt(2 * i + 1) * eval_sh_legendre(i, GRID) for i in range(N + 1)], 1)
        np.testing.assert_allclose(vals, ref, atol=1e-10)

    def test_2d_origin(self):
        b = build_basis("chelyshkov", 1)
        np.testing.assert_allclose(eval_basis_2d(b, 0.0, 0.0), [4.0, 0.0, 0.0, 0.0])

    def test_2d_degree_zero(self):
        b = build_basis("chelyshkov", 0)
        np.testing.assert_allclose(eval_basis_2d(b, 0.3, 0.9), [1.0])

    @given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 5))
    @settings(max_examples=50, deadline=None)
    def test_2d_kronecker_order(self, s, t, N):
        b = build_basis("chelyshkov", N)
        ps, pt = eval_basis_1d(b, s), eval_basis_1d(b, t)
        v = eval_basis_2d(b, s, t)
        for i in range(N + 1):
            for j in range(N + 1):
                assert v[i * (N + 1) + j] == pytest.approx(ps[i] * pt[j], rel=1e-14, abs=1e-14)

    def test_vectorised_shapes(self):
        b = build_basis("chelyshkov", 3)
        assert eval_basis_1d(b, np.zeros((2, 5))).shape == (2, 5, 4)
        assert eval_basis_2d(b, np.zeros(7), 0.5).shape == (7, 16)

    @pytest.mark.parametrize("kind", ["chelyshkov", "slp"])
    @pytest.mark.parametrize("s", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_round_trip_to_monomials(self, kind, s):
        b = build_basis(kind, 6)
        np.testing.assert_allclose(b.Hinv @ eval_basis_1d(b, s), monomials(s, 6), atol=1e-10)

    @pytest.mark.parametrize("kind", ["chelyshkov", "slp"])
    @pytest.mark.parametrize("N", range(9))
    def test_orthonormal(self, kind, N):
        b = build_basis(kind, N)
        g = gram_matrix_1d(b, gauss_legendre_rule(N + 2))
        assert np.max(np.abs(g - np.eye(N + 1))) < 1e-10


class TestJacobi:
    def test_examples(self):
        assert jacobi_crosscheck(build_basis("chelyshkov", 1), 1, 0.5) == pytest.approx(0.5)
        assert jacobi_crosscheck(build_basis("chelyshkov", 1), 0, 0.0) == pytest.approx(2.0, abs=1e-12)
        assert jacobi_crosscheck(build_basis("chelyshkov", 2), 2, 1.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("n", range(7))
    @pytest.mark.parametrize("beta", [1.0, 3.0, 7.0])
    def test_recurrence_matches_scipy(self, n, beta):
        from sivfie.basis import jacobi_p

        x = np.linspace(-1, 1, 9)
        np.testing.assert_allclose(jacobi_p(n, 0.0, beta, x), eval_jacobi(n, 0.0, beta, x),
                                   rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("N", range(6))
    def test_identity(self, N):
        b = build_basis("chelyshkov", N)
        vals = eval_basis_1d(b, GRID)
        for i in range(N + 1):
            via_jacobi = np.sqrt(2 * i + 1) * jacobi_crosscheck(b, i, GRID)
            np.testing.assert_allclose(via_jacobi, vals[:, i], rtol=0, atol=1e-10)

    def test_rejects_other_kind(self):
        with pytest.raises(ValueError):
            jacobi_crosscheck(build_basis("slp", 2), 0, 0.5)
