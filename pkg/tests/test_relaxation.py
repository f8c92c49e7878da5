import numpy as np
import pytest

from papr_pts.brute_force import brute_force
from papr_pts.ofdm import generate_symbols, qam16
from papr_pts.pts import PhaseAlphabet, make_partition, peak_matrices, symbol_matrix
from papr_pts.relaxation import (DegenerateSolutionError, RelaxationProblem,
                                 RelaxationSolution, build_relaxation,
                                 embed_real, rank1_approximation,
                                 unembed_matrix, unembed_vector)
from papr_pts.solver import SolverConfig, SpectrahedronPoint, solve_minmax


def random_hermitian(rng, d):
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (Z + Z.conj().T) / 2


def build_peaks(K, P, seed, J=4):
    sym = generate_symbols(K, qam16(), seed)
    mat = symbol_matrix(sym, make_partition(K, P, "adjacent"))
    return mat, peak_matrices(mat, J)


def solution_from_rank1(b, kind):
    X = np.outer(b, np.conj(b))
    if kind == "real-sym":
        X = X.real
    return RelaxationSolution.from_point(SpectrahedronPoint.from_matrix(X), 0.0, kind)


class TestEmbedReal:
    def test_vector(self):
        assert np.allclose(embed_real(np.array([1j])), [0.0, 1.0])

    def test_identity_matrix(self):
        assert np.allclose(embed_real(np.eye(3, dtype=complex)), np.eye(6))

    def test_trace_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            C = random_hermitian(rng, 4)
            Y = random_hermitian(rng, 4)
            lhs = np.trace(embed_real(C) @ embed_real(Y))
            rhs = 2.0 * np.trace(C @ Y)
            assert np.isclose(lhs, rhs.real) and abs(rhs.imag) < 1e-10

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            embed_real(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_unembed_roundtrip(self):
        rng = np.random.default_rng(1)
        C = random_hermitian(rng, 5)
        assert np.allclose(unembed_matrix(embed_real(C)), C)
        z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        assert np.allclose(unembed_vector(embed_real(z)), z)


class TestBuildRelaxation:
    def test_l2_real_form_matches_quadratic(self):
        _, peaks = build_peaks(8, 4, 0)
        prob = build_relaxation(peaks, 2)
        assert prob.kind == "real-sym" and prob.dimension == 4
        rng = np.random.default_rng(0)
        for n in (0, 5, 17):
            Cn = peaks.matrix(n)
            Re = prob.constraint_matrix(n)
            for _ in range(3):
                b = rng.choice([-1.0, 1.0], size=4)
                assert np.isclose(b @ Re @ b, (np.conj(b) @ Cn @ b).real)

    def test_l4_embedding_identity(self):
        _, peaks = build_peaks(8, 4, 1)
        prob = build_relaxation(peaks, 4)
        assert prob.kind == "real-embedded" and prob.dimension == 8
        rng = np.random.default_rng(1)
        for n in (0, 9):
            Cn = peaks.matrix(n)
            Tn = prob.constraint_matrix(n)
            for _ in range(3):
                bh = rng.choice([-1.0, 1.0], 4) + 1j * rng.choice([-1.0, 1.0], 4)
                emb = embed_real(bh)
                assert np.isclose(emb @ Tn @ emb, (np.conj(bh) @ Cn @ bh).real)

    def test_general_l_keeps_hermitian(self):
        _, peaks = build_peaks(8, 4, 2)
        prob = build_relaxation(peaks, 8)
        assert prob.kind == "hermitian" and prob.dimension == 4
        for n in (0, 3, 30):
            assert np.allclose(prob.constraint_matrix(n), peaks.matrix(n), atol=1e-12)

    def test_from_matrices_identity(self):
        prob = RelaxationProblem.from_matrices([np.eye(3)], "real-sym")
        assert prob.count == 1
        assert np.allclose(prob.constraint_matrix(0), np.eye(3))

    def test_from_matrices_rejects_indefinite(self):
        with pytest.raises(ValueError):
            RelaxationProblem.from_matrices([np.diag([1.0, -1.0])], "real-sym")


class TestRank1Approximation:
    def test_exact_rank1_recovered_l2(self):
        rng = np.random.default_rng(3)
        b = rng.choice([-1.0, 1.0], size=5)
        sol = solution_from_rank1(b, "real-sym")
        out = rank1_approximation(sol, 2).phases.real
        assert np.allclose(out, b) or np.allclose(out, -b)

    def test_l4_hand_map(self):
        # q = (0.3, -0.2) for P = 1: signs (+, -) give (1/sqrt2)e^{-j pi/4}(1 - j) = -j
        q = np.array([0.3, -0.2]) / np.hypot(0.3, 0.2)
        Q = np.column_stack([q, [q[1], -q[0]]])
        sol = RelaxationSolution(
            SpectrahedronPoint.from_matrix(np.outer(q, q)), 0.0,
            np.array([1.0, 0.0]), Q, "real-embedded")
        out = rank1_approximation(sol, 4)
        assert np.allclose(out.phases, [-1j])

    def test_l8_nearest_phase(self):
        q = np.array([np.exp(0.1j)])
        sol = solution_from_rank1(q, "hermitian")
        out = rank1_approximation(sol, 8)
        assert np.allclose(out.phases, [1.0])

    def test_zero_tie_goes_to_first_element(self):
        sol = RelaxationSolution(
            SpectrahedronPoint.from_matrix(np.eye(2, dtype=complex)), 0.0,
            np.array([1.0, 1.0]), np.eye(2, dtype=complex), "hermitian")
        out = rank1_approximation(sol, 8)
        # second coordinate of the leading eigenvector is 0: rounds to index 0
        assert np.isclose(out.phases[1], 1.0)

    def test_degenerate_rejected(self):
        sol = RelaxationSolution(
            SpectrahedronPoint.from_matrix(np.zeros((2, 2))), 0.0,
            np.zeros(2), np.eye(2), "real-sym")
        with pytest.raises(DegenerateSolutionError):
            rank1_approximation(sol, 2)

    def test_output_always_feasible(self):
        rng = np.random.default_rng(4)
        for L, kind in ((2, "real-sym"), (4, "real-embedded"), (8, "hermitian")):
            d = 8 if kind == "real-embedded" else 4
            R = rng.standard_normal((d, d))
            if kind == "hermitian":
                R = R + 1j * rng.standard_normal((d, d))
            X = R @ R.conj().T
            X = X / np.max(np.abs(np.diagonal(X)))
            np.fill_diagonal(X, 1.0)
            sol = RelaxationSolution.from_point(
                SpectrahedronPoint.from_matrix(X), 0.0, kind)
            out = rank1_approximation(sol, L)
            el = PhaseAlphabet(L).elements
            dist = np.min(np.abs(out.phases[:, None] - el[None, :]), axis=1)
            assert np.max(dist) < 1e-12


class TestRelaxationBounds:
    def test_lower_bound_vs_brute_force(self):
        cfg = SolverConfig(max_iters=4000)
        for seed in range(4):
            K, P = 24, 4
            sym = generate_symbols(K, qam16(), seed)
            mat = symbol_matrix(sym, make_partition(K, P, "adjacent"))
            peaks = peak_matrices(mat, 4)
            sol, _ = solve_minmax(build_relaxation(peaks, 2), cfg)
            bf = brute_force(mat, 2, 4, float(K))
            scale = float(np.max(peaks.traces())) / P
            assert sol.lambda_star <= bf.best_papr.linear * K + cfg.obj_tol * scale + 1e-5 * scale

    def test_l4_embedded_matches_hermitian_path(self):
        # same instance solved through T(C_n) and through C_n agrees within
        # solver accuracy once the embedded optimum is halved
        cfg = SolverConfig(max_iters=6000)
        _, peaks = build_peaks(8, 4, 7)
        sol4, _ = solve_minmax(build_relaxation(peaks, 4), cfg)
        solH, _ = solve_minmax(
            RelaxationProblem.from_peak_rows(peaks.rows, "hermitian"), cfg)
        assert abs(sol4.lambda_star - solH.lambda_star) <= 3e-2 * solH.lambda_star
