"""OFDM baseband/RF signal synthesis and peak-power metrics.

The baseband signal is s(t) = sum_k A_k exp(2*pi*j*(k-1)*t/T) with the
symbol duration normalized to T = 1.  Signals are evaluated on the
oversampled grid t_n = n/(J*K) via an unnormalized inverse DFT, so the
samples match the analytic sum exactly (up to floating point).

PMEPR is the peak envelope power of the baseband signal over the average
power P_av; PAPR is the same ratio for the real RF signal at carrier
frequency f_c = r/T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_MIN_OVERSAMPLING = math.pi / math.sqrt(2.0)


@dataclass(frozen=True)
class ConstellationSpec:
    """A finite symbol constellation with its ensemble average energy E{|A|^2}."""

    points: np.ndarray
    average_energy: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "points", pts)
        if pts.size == 0:
            raise ValueError("constellation needs at least one point")
        mean_energy = float(np.mean(np.abs(pts) ** 2))
        if self.average_energy <= 0:
            raise ValueError("average_energy must be positive")
        if not math.isclose(mean_energy, self.average_energy, rel_tol=1e-9):
            raise ValueError(
                f"average_energy {self.average_energy} does not match constellation "
                f"mean |point|^2 = {mean_energy}"
            )


def constellation_from_points(points) -> ConstellationSpec:
    pts = np.asarray(points, dtype=complex)
    return ConstellationSpec(pts, float(np.mean(np.abs(pts) ** 2)))


def qam16() -> ConstellationSpec:
    """16QAM on {-3,-1,1,3}^2 scaled by 1/sqrt(10) so E{|A|^2} = 1."""
    levels = np.array([-3.0, -1.0, 1.0, 3.0])
    pts = (levels[:, None] + 1j * levels[None, :]).ravel() / math.sqrt(10.0)
    return ConstellationSpec(pts, 1.0)


def bpsk() -> ConstellationSpec:
    return ConstellationSpec(np.array([1.0 + 0j, -1.0 + 0j]), 1.0)


@dataclass(frozen=True)
class SymbolVector:
    """K complex symbols A_k; constellation is None for derived (rotated) vectors."""

    symbols: np.ndarray
    constellation: ConstellationSpec | None = None

    def __post_init__(self):
        sym = np.asarray(self.symbols, dtype=complex)
        object.__setattr__(self, "symbols", sym)
        if sym.ndim != 1 or sym.size == 0:
            raise ValueError("symbols must be a nonempty 1-d vector")

    @property
    def carrier_count(self) -> int:
        return self.symbols.size


@dataclass(frozen=True)
class SampledSignal:
    """A length J*K sample grid s(n/(J*K)), n = 0..J*K-1."""

    samples: np.ndarray
    oversampling_factor: int
    base_length: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", s)
        if s.size != self.oversampling_factor * self.base_length:
            raise ValueError("sample count must equal J*K")

    def peak_power(self) -> float:
        return float(np.max(np.abs(self.samples) ** 2))

    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass(frozen=True)
class PowerRatio:
    """A peak-to-average power ratio in linear units, with dB view."""

    linear: float

    def __post_init__(self):
        if self.linear < 0:
            raise ValueError("power ratio cannot be negative")

    @property
    def db(self) -> float:
        if self.linear == 0.0:
            return -math.inf
        return 10.0 * math.log10(self.linear)


def generate_symbols(K: int, constellation: ConstellationSpec, seed) -> SymbolVector:
    """Draw K i.i.d. uniform symbols from the constellation, deterministic under seed."""
    if K < 1:
        raise ValueError("K must be at least 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, constellation.points.size, size=K)
    return SymbolVector(constellation.points[idx], constellation)


def baseband_samples(symbols: SymbolVector, J: int) -> SampledSignal:
    """Sample s(t) on the J-times oversampled grid via a J*K-point inverse DFT.

    Uses the unnormalized convention, samples[n] = sum_k A_k exp(2*pi*j*(k-1)*n/(J*K)),
    i.e. numpy's ifft scaled back by J*K.
    """
    if J < 1:
        raise ValueError("oversampling factor must be at least 1")
    K = symbols.carrier_count
    n = J * K
    spec = np.zeros(n, dtype=complex)
    spec[:K] = symbols.symbols
    return SampledSignal(np.fft.ifft(spec) * n, J, K)


def pmepr(signal: SampledSignal, p_av: float) -> PowerRatio:
    """Peak envelope power over average power, max_n |s_n|^2 / P_av."""
    if p_av <= 0:
        raise ValueError("average power must be positive")
    return PowerRatio(signal.peak_power() / p_av)


def rf_papr(symbols: SymbolVector, r: int, J: int, p_av: float,
            min_cycle_samples: int = 8) -> PowerRatio:
    """PAPR of the real RF signal Re{s(t) exp(2*pi*j*r*t)} on a carrier-resolving grid.

    The grid has at least max(J*K, min_cycle_samples*r) points per symbol
    duration (rounded up to a multiple of K so it refines the baseband grid).
    The default 8 samples per carrier cycle resolves the oscillation; callers
    that compare PAPR against PMEPR at tight tolerances should raise
    min_cycle_samples so the peak of the carrier is captured accurately.
    """
    if p_av <= 0:
        raise ValueError("average power must be positive")
    K = symbols.carrier_count
    if r < K:
        raise ValueError("carrier index r must be at least K (PAPR/PMEPR sandwich regime)")
    if min_cycle_samples < 1:
        raise ValueError("min_cycle_samples must be at least 1")
    n = K * math.ceil(max(J * K, min_cycle_samples * r) / K)
    if n <= r + K - 1:
        n = K * math.ceil((r + K) / K)
    spec = np.zeros(n, dtype=complex)
    spec[r:r + K] = symbols.symbols
    rf = np.real(np.fft.ifft(spec) * n)
    return PowerRatio(float(np.max(rf ** 2)) / p_av)


def oversampling_bound_factor(J) -> float:
    """Factor bounding the continuous peak by the sampled peak, sqrt(J^2/(J^2 - pi^2/2))."""
    if J <= _MIN_OVERSAMPLING:
        raise ValueError(f"oversampling factor must exceed pi/sqrt(2) ~ {_MIN_OVERSAMPLING:.4f}")
    return math.sqrt(J * J / (J * J - math.pi ** 2 / 2.0))


def ensemble_average_power(constellation: ConstellationSpec, K: int) -> float:
    """P_av = sum_k E{|A_k|^2} = K * E{|A|^2} for i.i.d. symbols."""
    if K < 1:
        raise ValueError("K must be at least 1")
    return K * constellation.average_energy
