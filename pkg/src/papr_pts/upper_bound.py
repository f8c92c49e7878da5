"""Aperiodic autocorrelations, the time-independent envelope bound, and the
quartic surrogate objective built from circulant diagonalizations.

The envelope of any rotated symbol vector c = A b obeys

    |s(t)|^2 <= sum_k |c_k|^2 + 2 sum_{i>=1} |rho(i)|,

with rho the aperiodic autocorrelation of c, so shrinking the correlation
tail shrinks the peak without reference to a sampling grid.  The weighted
correlation energy splits into periodic and odd-periodic parts,

    rho(k) +- conj(rho(K-k)),

realized by the cyclic and negacyclic shift matrices.  Both families
diagonalize in closed form (a DFT and a half-sample-shifted DFT), which turns
the correlation energy into the quartic K/2 * sum_k |alpha_k|^4 + |beta_k|^4
of the spectra alpha = V A b, beta = V^ A b.  All index conventions here are
zero-based; the decomposition identities then hold exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .pts import RotationVector, SymbolMatrix
from .randomization import GaussianSampler, sample
from .solver import QuarticObjectiveSpec

_DIRECT_LIMIT = 64


@dataclass(frozen=True)
class Autocorrelation:
    """rho(0..K-1) of a length-K sequence, with rho(K) defined as 0."""

    rho: np.ndarray
    source_length: int

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=complex))

    def weighted_norm_sq(self) -> float:
        """|rho^|^2 for rho^ = (rho(0), sqrt2*rho(1), ..., sqrt2*rho(K-1))."""
        r = self.rho
        return float(np.abs(r[0]) ** 2 + 2.0 * np.sum(np.abs(r[1:]) ** 2))


def autocorrelation(c, method: str = "auto") -> Autocorrelation:
    """Aperiodic autocorrelation rho(i) = sum_{k} c_k conj(c_{k+i}).

    method "auto" sums directly for short sequences and switches to the
    zero-padded FFT otherwise; "direct" and "fft" force one path (the two
    agree to roundoff and are cross-tested).
    """
    c = np.asarray(c, dtype=complex).ravel()
    K = c.size
    if K < 1:
        raise ValueError("sequence must be nonempty")
    if method == "auto":
        method = "direct" if K <= _DIRECT_LIMIT else "fft"
    if method == "direct":
        rho = np.array([np.sum(c[: K - i] * np.conj(c[i:])) for i in range(K)])
    elif method == "fft":
        m = next_fast_len(2 * K)
        F = np.fft.fft(c, m)
        rho = np.conj(np.fft.ifft(F * np.conj(F))[:K])
    else:
        raise ValueError(f"unknown autocorrelation method {method!r}")
    return Autocorrelation(rho, K)


def envelope_bound(symbols) -> float:
    """Time-free upper bound on the peak envelope power of the given symbols."""
    ac = autocorrelation(symbols)
    return float(ac.rho[0].real + 2.0 * np.sum(np.abs(ac.rho[1:])))


@dataclass(frozen=True)
class DiagonalizationKit:
    """Unitary V, V^ and phase diagonals decomposing the shift matrices.

    With zero-based m, n the identities B_(1,1)^(k) = V^H D^(k) V and
    B_(-1,1)^(k) = V^^H D^^(k) V^ hold to machine precision.
    """

    size: int
    V: np.ndarray
    V_hat: np.ndarray

    def d_diagonal(self, k: int) -> np.ndarray:
        n = np.arange(self.size)
        return np.exp(-2j * np.pi * k * n / self.size)

    def d_hat_diagonal(self, k: int) -> np.ndarray:
        n = np.arange(self.size)
        return np.exp(-2j * np.pi * k * (n / self.size + 1.0 / (2.0 * self.size)))

    def b_matrix(self, k: int) -> np.ndarray:
        """Cyclic shift [[0, I_k], [I_{K-k}, 0]]."""
        K = self.size
        B = np.zeros((K, K))
        B[np.arange(K), (np.arange(K) - k) % K] = 1.0
        return B

    def b_hat_matrix(self, k: int) -> np.ndarray:
        """Negacyclic shift [[0, -I_k], [I_{K-k}, 0]]."""
        B = self.b_matrix(k)
        B[:k, :] *= -1.0
        return B


def build_kit(K: int) -> DiagonalizationKit:
    if K < 2:
        raise ValueError("kit needs K >= 2")
    m = np.arange(K)
    V = np.exp(-2j * np.pi * np.outer(m, m) / K) / np.sqrt(K)
    V_hat = V * np.exp(-1j * np.pi * m / K)[None, :]
    return DiagonalizationKit(K, V, V_hat)


def l2_correlation_norm(rotation: RotationVector, matrix: SymbolMatrix) -> float:
    """|rho^|^2 of the rotated symbol vector A b."""
    return autocorrelation(matrix.rotated_symbols(rotation)).weighted_norm_sq()


def quartic_spec(matrix: SymbolMatrix) -> QuarticObjectiveSpec:
    """Masks M_k = A^H V^H G_k V A and M^_k = A^H V^^H G_k V^ A, as factor rows.

    The k-th mask row is the k-th row of V A (resp. V^ A); the masks are the
    Gram matrices of those rows, hence PSD, and

        K/2 * F(b) = |rho^|^2  with  F(b) = sum_k (b^H M_k b)^2 + (b^H M^_k b)^2.
    """
    kit = build_kit(matrix.carrier_count)
    return QuarticObjectiveSpec(kit.V @ matrix.entries, kit.V_hat @ matrix.entries)


def quartic_value(spec: QuarticObjectiveSpec, b) -> float:
    """F(b) on an arbitrary complex vector (not restricted to the alphabet)."""
    b = np.asarray(b, dtype=complex)
    return float(np.sum(np.abs(spec.rows_v @ b) ** 4)
                 + np.sum(np.abs(spec.rows_vhat @ b) ** 4))


@dataclass(frozen=True)
class ConvexityProbeResult:
    max_violation: float
    scale: float


def convexity_probe(spec: QuarticObjectiveSpec, trials: int, seed) -> ConvexityProbeResult:
    """Max over random chords of F(gamma b1 + (1-gamma) b2) - gamma F(b1) - (1-gamma) F(b2).

    Convexity makes the true value nonpositive; anything beyond roundoff
    (~1e-9 of the probed F scale) indicates a broken objective.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    p = spec.dimension
    worst = -np.inf
    scale = 0.0
    for _ in range(trials):
        b1 = rng.standard_normal(p) + 1j * rng.standard_normal(p)
        b2 = rng.standard_normal(p) + 1j * rng.standard_normal(p)
        gamma = rng.uniform()
        f1, f2 = quartic_value(spec, b1), quartic_value(spec, b2)
        mix = quartic_value(spec, gamma * b1 + (1.0 - gamma) * b2)
        worst = max(worst, mix - gamma * f1 - (1.0 - gamma) * f2)
        scale = max(scale, f1, f2)
    return ConvexityProbeResult(float(worst), float(scale))


@dataclass(frozen=True)
class MomentSandwichResult:
    lower_ok: bool
    upper_ok: bool
    estimate: float
    trace_sq: float
    std_error: float


def moment_sandwich_probe(G: np.ndarray, X, samples: int, seed) -> MomentSandwichResult:
    """Monte-Carlo check of Tr(GX)^2 <= E{(xi^H G xi)^2} <= 3 Tr(GX)^2 for xi ~ CN(0, X).

    Each bound is allowed three standard errors of slack.
    """
    if samples < 10 ** 4:
        raise ValueError("need at least 1e4 samples for a meaningful bound check")
    G = np.asarray(G, dtype=complex)
    Xm = np.asarray(getattr(X, "matrix", X), dtype=complex)
    sampler = GaussianSampler.from_covariance(Xm, kind="complex")
    xi = sample(sampler, samples, seed)
    q = np.einsum("ij,jk,ik->i", np.conj(xi), G, xi).real
    q2 = q * q
    est = float(np.mean(q2))
    se = float(np.std(q2, ddof=1) / np.sqrt(samples))
    tr_sq = float(np.trace(G @ Xm).real ** 2)
    return MomentSandwichResult(
        lower_ok=bool(tr_sq - 3.0 * se <= est),
        upper_ok=bool(est <= 3.0 * tr_sq + 3.0 * se),
        estimate=est,
        trace_sq=tr_sq,
        std_error=se,
    )
