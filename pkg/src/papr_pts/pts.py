"""Partial transmit sequences: carrier partitions, phase alphabets, rotation
vectors, the masked symbol matrix A, and the sampled peak quadratic forms.

Carrier indices are 0-based throughout.  The instantaneous power of a rotated
signal at grid point n is |u_n b|^2 where u_n is the n-th row of the J*K x P
array obtained by transforming each column of A; those rows are the rank-1
factors of the Hermitian peak matrices C_n and are kept in factored form.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .ofdm import PowerRatio, SampledSignal, SymbolVector, baseband_samples

PARTITION_SCHEMES = ("adjacent", "interleaved", "random")


@dataclass(frozen=True)
class Partition:
    """P disjoint index subsets covering {0..K-1}."""

    subsets: tuple
    scheme: str
    carrier_count: int

    def __post_init__(self):
        subs = tuple(np.asarray(s, dtype=int) for s in self.subsets)
        object.__setattr__(self, "subsets", subs)
        all_idx = np.concatenate(subs) if subs else np.array([], dtype=int)
        if len(np.unique(all_idx)) != all_idx.size:
            raise ValueError("partition subsets overlap")
        if all_idx.size != self.carrier_count or (
            all_idx.size and (all_idx.min() < 0 or all_idx.max() >= self.carrier_count)
        ):
            raise ValueError("partition must cover exactly {0..K-1}")

    @property
    def subset_count(self) -> int:
        return len(self.subsets)


def make_partition(K: int, P: int, scheme: str = "adjacent", seed=None) -> Partition:
    """Split {0..K-1} into P equal blocks: contiguous, strided, or seeded-random."""
    if P < 1:
        raise ValueError("P must be at least 1")
    if scheme not in PARTITION_SCHEMES:
        raise ValueError(f"unknown partition scheme {scheme!r}")
    if K % P != 0:
        raise ValueError(f"P={P} must divide K={K} for equal-size subsets")
    block = K // P
    if scheme == "adjacent":
        subsets = tuple(np.arange(p * block, (p + 1) * block) for p in range(P))
    elif scheme == "interleaved":
        subsets = tuple(np.arange(p, K, P) for p in range(P))
    else:
        perm = np.random.default_rng(seed).permutation(K)
        subsets = tuple(np.sort(perm[p * block:(p + 1) * block]) for p in range(P))
    return Partition(subsets, scheme, K)


@dataclass(frozen=True)
class PhaseAlphabet:
    """The L-th roots of unity Omega_L = {exp(2*pi*j*l/L)}, l = 0..L-1."""

    order: int

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("alphabet order L must be at least 2")

    @property
    def elements(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.order) / self.order)


@dataclass(frozen=True)
class RotationVector:
    """P unit-modulus phase factors b_p, all members of the alphabet."""

    phases: np.ndarray
    alphabet: PhaseAlphabet

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=complex)
        object.__setattr__(self, "phases", ph)
        dist = np.abs(ph[:, None] - self.alphabet.elements[None, :])
        if ph.ndim != 1 or np.max(np.min(dist, axis=1), initial=0.0) > 1e-9:
            raise ValueError("every phase must be a member of the alphabet")

    @classmethod
    def from_indices(cls, indices, alphabet: PhaseAlphabet) -> "RotationVector":
        idx = np.asarray(indices, dtype=int)
        if np.any(idx < 0) or np.any(idx >= alphabet.order):
            raise ValueError("phase index out of range")
        return cls(alphabet.elements[idx], alphabet)

    @classmethod
    def identity(cls, P: int, alphabet: PhaseAlphabet) -> "RotationVector":
        return cls(np.ones(P, dtype=complex), alphabet)

    @property
    def subset_count(self) -> int:
        return self.phases.size

    def canonicalized(self) -> "RotationVector":
        """Rotate by conj(b_1) so the first entry is 1 (PAPR is unchanged)."""
        return RotationVector(self.phases * np.conj(self.phases[0]), self.alphabet)


@dataclass(frozen=True)
class SymbolMatrix:
    """K x P matrix with entry (k,p) = A_k if carrier k is in subset p, else 0."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", e)
        if e.ndim != 2:
            raise ValueError("entries must be a K x P matrix")
        if np.any(np.sum(e != 0, axis=1) > 1):
            raise ValueError("each row may hold at most one nonzero entry")

    @property
    def carrier_count(self) -> int:
        return self.entries.shape[0]

    @property
    def subset_count(self) -> int:
        return self.entries.shape[1]

    def rotated_symbols(self, rotation: RotationVector) -> np.ndarray:
        if rotation.subset_count != self.subset_count:
            raise ValueError("rotation length must equal the subset count")
        return self.entries @ rotation.phases


def symbol_matrix(symbols: SymbolVector, partition: Partition) -> SymbolMatrix:
    if partition.carrier_count != symbols.carrier_count:
        raise ValueError("partition and symbol vector disagree on K")
    K = symbols.carrier_count
    entries = np.zeros((K, partition.subset_count), dtype=complex)
    for p, idx in enumerate(partition.subsets):
        entries[idx, p] = symbols.symbols[idx]
    return SymbolMatrix(entries)


@dataclass(frozen=True)
class PeakMatrixSet:
    """The J*K Hermitian rank-1 peak matrices C_n = u_n^H u_n, stored as rows u_n."""

    rows: np.ndarray
    oversampling: int

    def __post_init__(self):
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=complex))

    @property
    def count(self) -> int:
        return self.rows.shape[0]

    @property
    def dimension(self) -> int:
        return self.rows.shape[1]

    def matrix(self, n: int) -> np.ndarray:
        """Densify C_n (tests and small problems only)."""
        u = self.rows[n]
        return np.outer(np.conj(u), u)

    def quadratic_forms(self, phases: np.ndarray) -> np.ndarray:
        """b^H C_n b for all n at once, as |u_n b|^2."""
        return np.abs(self.rows @ phases) ** 2

    def traces(self) -> np.ndarray:
        return np.sum(np.abs(self.rows) ** 2, axis=1)


def peak_matrices(matrix: SymbolMatrix, J: int) -> PeakMatrixSet:
    """Rows u_n = v_{t_n}^T A via one length-J*K inverse DFT per column of A."""
    if J < 1:
        raise ValueError("oversampling factor must be at least 1")
    K, P = matrix.entries.shape
    n = J * K
    spec = np.zeros((n, P), dtype=complex)
    spec[:K, :] = matrix.entries
    rows = np.fft.ifft(spec, axis=0) * n
    return PeakMatrixSet(rows, J)


def modified_signal(matrix: SymbolMatrix, rotation: RotationVector, J: int) -> SampledSignal:
    """Sampled signal of the rotated symbol vector A b."""
    rotated = matrix.rotated_symbols(rotation)
    return baseband_samples(SymbolVector(rotated), J)


def papr_of_rotation(matrix: SymbolMatrix, rotation: RotationVector, J: int,
                     p_av: float) -> PowerRatio:
    """PMEPR of the rotated signal, max_n |u_n b|^2 / P_av."""
    if p_av <= 0:
        raise ValueError("average power must be positive")
    sig = modified_signal(matrix, rotation, J)
    return PowerRatio(sig.peak_power() / p_av)


def papr_from_peaks(peaks: PeakMatrixSet, phases: np.ndarray, p_av: float) -> float:
    """Same ratio evaluated through the peak-matrix quadratic forms (linear units)."""
    if p_av <= 0:
        raise ValueError("average power must be positive")
    return float(np.max(peaks.quadratic_forms(phases))) / p_av


def side_info_bits(P: int, L: int) -> float:
    """Side information needed to convey b with b_1 fixed: (P-1)*log2(L) bits."""
    if P < 1:
        raise ValueError("P must be at least 1")
    if L < 2:
        raise ValueError("L must be at least 2")
    return (P - 1) * math.log2(L)
