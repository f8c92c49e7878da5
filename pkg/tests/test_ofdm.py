import math

import numpy as np
import pytest

from papr_pts.ofdm import (ConstellationSpec, PowerRatio, SymbolVector,
                           baseband_samples, bpsk, constellation_from_points,
                           ensemble_average_power, generate_symbols,
                           oversampling_bound_factor, pmepr, qam16, rf_papr)


def direct_samples(symbols, J):
    """Oracle: evaluate the analytic carrier sum at every grid point."""
    A = symbols.symbols
    K = A.size
    n = np.arange(J * K)
    k = np.arange(K)
    return (A[None, :] * np.exp(2j * np.pi * np.outer(n, k) / (J * K))).sum(axis=1)


class TestConstellations:
    def test_qam16_unit_energy(self):
        c = qam16()
        assert c.points.size == 16
        assert np.isclose(np.mean(np.abs(c.points) ** 2), 1.0)

    def test_energy_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ConstellationSpec(np.array([1.0, -1.0]), 2.0)

    def test_unnormalized_16qam_energy(self):
        levels = np.array([-3.0, -1.0, 1.0, 3.0])
        pts = (levels[:, None] + 1j * levels[None, :]).ravel()
        c = constellation_from_points(pts)
        assert np.isclose(c.average_energy, 10.0)
        assert np.isclose(ensemble_average_power(c, 1), 10.0)


class TestGenerateSymbols:
    def test_closure_binary(self):
        c = bpsk()
        sym = generate_symbols(1, c, 123)
        assert sym.symbols[0] in (1.0, -1.0)

    def test_determinism(self):
        c = qam16()
        a = generate_symbols(4, c, 7)
        b = generate_symbols(4, c, 7)
        assert np.array_equal(a.symbols, b.symbols)

    def test_law_of_large_numbers(self):
        sym = generate_symbols(10 ** 5, qam16(), 11)
        assert abs(np.mean(np.abs(sym.symbols) ** 2) - 1.0) < 0.02

    def test_zero_carriers_rejected(self):
        with pytest.raises(ValueError):
            generate_symbols(0, qam16(), 0)


class TestBasebandSamples:
    def test_single_tone_constant(self):
        sym = SymbolVector(np.array([0.7 - 0.2j]))
        sig = baseband_samples(sym, 4)
        assert np.allclose(sig.samples, 0.7 - 0.2j)

    def test_coherent_sum_at_origin(self):
        sig = baseband_samples(SymbolVector(np.ones(4)), 2)
        assert np.isclose(sig.samples[0], 4.0)

    def test_matches_direct_summation(self):
        sym = generate_symbols(8, qam16(), 3)
        sig = baseband_samples(sym, 4)
        ref = direct_samples(sym, 4)
        assert np.max(np.abs(sig.samples - ref)) <= 1e-10 * np.max(np.abs(ref))

    def test_fft_direct_equivalence_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            K = int(rng.integers(1, 65))
            J = int(rng.integers(1, 9))
            sym = generate_symbols(K, qam16(), int(rng.integers(0, 2 ** 31)))
            sig = baseband_samples(sym, J)
            ref = direct_samples(sym, J)
            scale = max(np.max(np.abs(ref)), 1e-30)
            assert np.max(np.abs(sig.samples - ref)) <= 1e-10 * scale


class TestPmepr:
    def test_all_ones_peak(self):
        sig = baseband_samples(SymbolVector(np.ones(16)), 4)
        assert np.isclose(pmepr(sig, 16.0).linear, 16.0)

    def test_constant_envelope(self):
        c = 0.3 + 0.4j
        sig = baseband_samples(SymbolVector(np.array([c])), 4)
        assert np.isclose(pmepr(sig, abs(c) ** 2).linear, 1.0)

    def test_fine_grid_oracle(self):
        # coarse-grid peak times the Eq.-style factor dominates a 2^16 grid peak
        sym = generate_symbols(8, qam16(), 5)
        coarse = pmepr(baseband_samples(sym, 4), 8.0).linear
        fine = pmepr(baseband_samples(sym, 2 ** 16 // 8), 8.0).linear
        factor = oversampling_bound_factor(4) ** 2
        assert fine <= factor * coarse
        assert coarse <= fine + 1e-12

    def test_invalid_power(self):
        sig = baseband_samples(SymbolVector(np.ones(2)), 2)
        with pytest.raises(ValueError):
            pmepr(sig, 0.0)

    def test_pmepr_at_least_one_for_realized_power(self):
        sym = generate_symbols(32, qam16(), 9)
        sig = baseband_samples(sym, 4)
        realized = float(np.sum(np.abs(sym.symbols) ** 2))
        assert pmepr(sig, realized).linear >= 1.0

    def test_triangle_upper_limit(self):
        K = 12
        sym = generate_symbols(K, qam16(), 21)
        sig = baseband_samples(sym, 4)
        limit = K ** 2 * np.max(np.abs(qam16().points)) ** 2 / K
        assert pmepr(sig, float(K)).linear <= limit


class TestSamplingSandwich:
    def test_fine_vs_coarse_grids(self):
        factor_sq = oversampling_bound_factor(4) ** 2
        for seed in range(25):
            sym = generate_symbols(64, qam16(), seed)
            fine = baseband_samples(sym, 64).peak_power()
            coarse = baseband_samples(sym, 4).peak_power()
            assert fine <= factor_sq * coarse


class TestRfPapr:
    def test_pure_carrier_unit_peak(self):
        sym = SymbolVector(np.array([1.0 + 0j]))
        assert np.isclose(rf_papr(sym, 64, 4, 1.0).linear, 1.0)

    def test_bounded_by_pmepr_on_shared_grid(self):
        for seed in range(10):
            sym = generate_symbols(16, qam16(), seed)
            r, J = 64, 4
            n = 16 * math.ceil(max(J * 16, 8 * r) / 16)
            papr = rf_papr(sym, r, J, 16.0)
            env = pmepr(baseband_samples(sym, n // 16), 16.0)
            assert papr.linear <= env.linear + 1e-12

    def test_sandwich_regime(self):
        K, r = 16, 2048
        delta = math.pi ** 2 * K ** 2 / (2 * r ** 2)
        for seed in range(5):
            sym = generate_symbols(K, qam16(), seed)
            papr = rf_papr(sym, r, 16, float(K), min_cycle_samples=1024).linear
            n = K * math.ceil(1024 * r / K)
            env = pmepr(baseband_samples(sym, n // K), float(K)).linear
            assert (1.0 - delta) * env <= papr <= env + 1e-12

    def test_carrier_below_band_rejected(self):
        sym = generate_symbols(16, qam16(), 0)
        with pytest.raises(ValueError):
            rf_papr(sym, 8, 4, 16.0)


class TestOversamplingBound:
    def test_reference_value(self):
        # direct evaluation of sqrt(16/(16 - pi^2/2))
        assert abs(oversampling_bound_factor(4) - 1.2024870291618341) < 1e-12

    def test_limit_to_one(self):
        assert abs(oversampling_bound_factor(10 ** 6) - 1.0) < 1e-9

    def test_small_factor_rejected(self):
        with pytest.raises(ValueError):
            oversampling_bound_factor(2)


class TestEnsemblePower:
    def test_qam16_scaling(self):
        assert np.isclose(ensemble_average_power(qam16(), 256), 256.0)

    def test_bpsk(self):
        assert np.isclose(ensemble_average_power(bpsk(), 8), 8.0)


class TestPowerRatio:
    def test_db_consistency(self):
        r = PowerRatio(7.345)
        assert abs(r.db - 10.0 * math.log10(7.345)) <= 1e-12 * abs(r.db)

    def test_zero_linear(self):
        assert PowerRatio(0.0).db == -math.inf

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            PowerRatio(-1.0)
