"""Exhaustive search over Omega_L^(P-1) for ground-truth optima on small instances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import PowerRatio
from .pts import PhaseAlphabet, RotationVector, SymbolMatrix, peak_matrices

ENUMERATION_LIMIT = 10 ** 6


@dataclass(frozen=True)
class BruteForceResult:
    best_rotation: RotationVector
    best_papr: PowerRatio
    candidates_evaluated: int


def brute_force(matrix: SymbolMatrix, L: int, J: int, p_av: float,
                chunk: int = 4096) -> BruteForceResult:
    """Evaluate every rotation with b_1 = 1 and return the PMEPR argmin.

    Candidates are enumerated in mixed-radix little-endian order over the
    phase indices of b_2..b_P; ties go to the earliest candidate.  Evaluation
    is chunked through the peak rows so the cost is O(L^(P-1) * J*K) with BLAS
    constants.
    """
    if p_av <= 0:
        raise ValueError("average power must be positive")
    alphabet = PhaseAlphabet(L)
    P = matrix.subset_count
    total = L ** (P - 1)
    if total > ENUMERATION_LIMIT:
        raise ValueError(
            f"brute force over {total} candidates exceeds the {ENUMERATION_LIMIT} guard; "
            "reduce P or L, or use the randomization methods"
        )
    rows = peak_matrices(matrix, J).rows
    place = L ** np.arange(max(P - 1, 0), dtype=np.int64)
    best_val = np.inf
    best_idx = 0
    for c0 in range(0, total, chunk):
        idx = np.arange(c0, min(c0 + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // place[None, :]) % L if P > 1 else np.zeros((idx.size, 0), int)
        B = np.ones((P, idx.size), dtype=complex)
        if P > 1:
            B[1:, :] = alphabet.elements[digits].T
        vals = np.max(np.abs(rows @ B) ** 2, axis=0) / p_av
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_idx = c0 + i
    digits = (best_idx // place) % L if P > 1 else np.zeros(0, int)
    indices = np.concatenate([[0], digits.astype(int)])
    rotation = RotationVector.from_indices(indices, alphabet)
    return BruteForceResult(rotation, PowerRatio(best_val), total)
