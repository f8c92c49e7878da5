"""Gaussian randomization rounding and the phase-random baseline.

Candidates are drawn from N(0, X*) (real kinds) or CN(0, X*) (complex kind,
realized by sampling the doubled real embedding with covariance T(X*)/2),
projected onto the alphabet, and the lowest-PMEPR candidate is kept.  With an
identity covariance the rounded law is uniform on Omega_L^P, which is exactly
the phase-random baseline.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import PowerRatio
from .pts import (PeakMatrixSet, PhaseAlphabet, RotationVector, SymbolMatrix,
                  papr_from_peaks, peak_matrices)


def derive_seed(*path) -> np.random.SeedSequence:
    """Counter-style seed derivation; equal paths give equal streams."""
    return np.random.SeedSequence(tuple(int(p) for p in path))


def _as_matrix(covariance) -> np.ndarray:
    return np.asarray(getattr(covariance, "matrix", covariance))


@dataclass(frozen=True)
class GaussianSampler:
    """A zero-mean sampler with factored covariance S S^T.

    kind "real" draws from N(0, X); kind "complex" draws from CN(0, X) by
    sampling N(0, T(X)/2) in the embedding and mapping back.  Negative
    eigenvalues left by solver feasibility tolerances are floored at zero.
    """

    factor: np.ndarray
    kind: str
    dimension: int

    @classmethod
    def from_covariance(cls, covariance, kind: str = "real") -> "GaussianSampler":
        X = _as_matrix(covariance)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError("covariance must be square")
        if kind == "real":
            C = np.asarray(X, dtype=float)
            dim = X.shape[0]
        elif kind == "complex":
            Xc = np.asarray(X, dtype=complex)
            C = np.block([[Xc.real, -Xc.imag], [Xc.imag, Xc.real]]) / 2.0
            dim = X.shape[0]
        else:
            raise ValueError(f"unknown sampler kind {kind!r}")
        C = (C + C.T) / 2.0
        w, Q = np.linalg.eigh(C)
        S = Q * np.sqrt(np.clip(w, 0.0, None))
        return cls(S, kind, dim)


def sample(sampler: GaussianSampler, n: int, seed) -> np.ndarray:
    """n seeded draws, shaped (n, d) real or (n, P) complex."""
    if n < 1:
        raise ValueError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, sampler.factor.shape[0]))
    out = g @ sampler.factor.T
    if sampler.kind == "complex":
        p = sampler.dimension
        return out[:, :p] + 1j * out[:, p:]
    return out


def _round_indices(xi: np.ndarray, L: int) -> np.ndarray:
    """Alphabet indices for a batch of sampled vectors (rows)."""
    if L == 2:
        return np.where(xi.real >= 0, 0, 1)
    if L == 4:
        if xi.shape[-1] % 2 != 0:
            raise ValueError("L=4 rounding needs an even-length real vector")
        p = xi.shape[-1] // 2
        sr, si = xi.real[..., :p] >= 0, xi.real[..., p:] >= 0
        return np.where(si, np.where(sr, 0, 1), np.where(sr, 3, 2))
    theta = np.mod(np.angle(xi), 2.0 * np.pi)
    return np.minimum(np.floor(theta * L / (2.0 * np.pi)).astype(int), L - 1)


def round_to_alphabet(xi: np.ndarray, L: int) -> RotationVector:
    """Project one sampled vector onto Omega_L^P.

    Expects a real vector of length P for L=2, a real vector of length 2P for
    L=4, and a complex vector of length P otherwise (f_L bucketing by angle,
    with Arg(0) treated as 0).
    """
    xi = np.atleast_1d(np.asarray(xi))
    if xi.ndim != 1:
        raise ValueError("expected a single vector")
    if L in (2, 4) and np.iscomplexobj(xi) and np.any(xi.imag != 0):
        raise ValueError("L=2 and L=4 rounding consume real-embedded samples")
    alphabet = PhaseAlphabet(L)
    return RotationVector.from_indices(_round_indices(xi, L), alphabet)


@dataclass(frozen=True)
class CandidateSet:
    """Rounded candidates with their PMEPR values and the winner's index."""

    rotations: tuple
    papr_values: np.ndarray
    best_index: int

    def __post_init__(self):
        vals = np.asarray(self.papr_values, dtype=float)
        object.__setattr__(self, "papr_values", vals)
        if len(self.rotations) < 1 or vals.size != len(self.rotations):
            raise ValueError("need one PAPR value per candidate")
        if vals[self.best_index] > np.min(vals):
            raise ValueError("best_index does not attain the minimum")

    @property
    def best_rotation(self) -> RotationVector:
        return self.rotations[self.best_index]

    @property
    def best_papr(self) -> PowerRatio:
        return PowerRatio(float(self.papr_values[self.best_index]))


def best_of_n(matrix: SymbolMatrix, sampler: GaussianSampler, L: int, n: int,
              J: int, p_av: float, seed) -> CandidateSet:
    """Sample n candidates, round each, and keep the lowest PMEPR."""
    if n < 1:
        raise ValueError("candidate count must be at least 1")
    peaks = peak_matrices(matrix, J)
    draws = sample(sampler, n, seed)
    idx = _round_indices(draws, L)
    return candidate_set_from_indices(peaks, idx, L, p_av)


def candidate_set_from_indices(peaks: PeakMatrixSet, indices: np.ndarray, L: int,
                               p_av: float) -> CandidateSet:
    """Evaluate a batch of alphabet-index candidates through the peak rows."""
    if p_av <= 0:
        raise ValueError("average power must be positive")
    alphabet = PhaseAlphabet(L)
    B = alphabet.elements[indices].T          # P x n
    vals = np.max(np.abs(peaks.rows @ B) ** 2, axis=0) / p_av
    rotations = tuple(RotationVector.from_indices(indices[i], alphabet)
                      for i in range(indices.shape[0]))
    return CandidateSet(rotations, vals, int(np.argmin(vals)))


def phase_random(P: int, L: int, n: int, seed) -> list:
    """n i.i.d. rotation vectors uniform on Omega_L^P."""
    if n < 1:
        raise ValueError("candidate count must be at least 1")
    alphabet = PhaseAlphabet(L)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, L, size=(n, P))
    return [RotationVector.from_indices(idx[i], alphabet) for i in range(n)]


def phase_random_indices(P: int, L: int, n: int, seed) -> np.ndarray:
    """Index form of phase_random, for batch evaluation."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, L, size=(n, P))
