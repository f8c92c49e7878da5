"""Semidefinite relaxations of the min-max peak-power problem.

Dropping the rank-1 constraint from X = b b^H yields a convex problem over the
spectrahedron {X PSD, diag(X) = 1}.  Three shapes arise from the alphabet
order: real symmetric matrices Re(C_n) for L = 2, the doubled real embedding
T(C_n) for L = 4, and Hermitian C_n for any other L.  The embedding is

    T(z) = (Re z; Im z),  T(Z) = [[Re Z, -Im Z], [Im Z, Re Z]],

with Tr(T(X) T(Y)) = 2 Tr(X Y) for Hermitian X, Y.

Constraint matrices are kept as stacked real rank-1 factor rows so solvers can
evaluate every trace as a cheap quadratic form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .pts import PeakMatrixSet, PhaseAlphabet, RotationVector

if TYPE_CHECKING:
    from .solver import SpectrahedronPoint

KINDS = ("real-sym", "real-embedded", "hermitian")


class DegenerateSolutionError(ValueError):
    """Raised when a relaxation solution has no usable leading eigenvector."""


def embed_real(z):
    """T(z) for a complex vector, or T(Z) for a Hermitian matrix."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 1:
        return np.concatenate([z.real, z.imag])
    if z.ndim == 2 and z.shape[0] == z.shape[1]:
        scale = 1.0 + float(np.max(np.abs(z), initial=0.0))
        if np.max(np.abs(z - z.conj().T)) > 1e-12 * scale:
            raise ValueError("matrix embedding requires a Hermitian input")
        return np.block([[z.real, -z.imag], [z.imag, z.real]])
    raise ValueError("expected a vector or a square matrix")


def unembed_matrix(Y: np.ndarray) -> np.ndarray:
    """Map a 2P x 2P symmetric PSD Y back to a Hermitian P x P matrix.

    The image X = ((Y11 + Y22) + j(Y21 - Y12))/2 is PSD with the same unit
    diagonal and satisfies Tr(C X) = Tr(T(C) Y)/2 for every Hermitian C, so
    optima are preserved between the two formulations.
    """
    d = Y.shape[0]
    if d % 2 != 0:
        raise ValueError("embedded matrix must have even dimension")
    p = d // 2
    y11, y12 = Y[:p, :p], Y[:p, p:]
    y21, y22 = Y[p:, :p], Y[p:, p:]
    return ((y11 + y22) + 1j * (y21 - y12)) / 2.0


def unembed_vector(y: np.ndarray) -> np.ndarray:
    d = y.shape[0]
    if d % 2 != 0:
        raise ValueError("embedded vector must have even dimension")
    return y[: d // 2] + 1j * y[d // 2:]


def _psd_factor_rows(M: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Rows f_i with M = sum_i f_i^T f_i; rejects inputs that are not PSD."""
    M = np.asarray(M)
    if np.iscomplexobj(M):
        M = embed_real(M)
    w, Q = np.linalg.eigh((M + M.T) / 2.0)
    scale = max(1.0, float(w[-1]))
    if w[0] < -tol * scale:
        raise ValueError(f"constraint matrix is not PSD (min eigenvalue {w[0]:.3e})")
    keep = w > 1e-14 * scale
    return (Q[:, keep] * np.sqrt(np.clip(w[keep], 0.0, None))).T


@dataclass(frozen=True)
class RelaxationProblem:
    """The J*K trace constraints of a relaxed problem, in factored form.

    kind selects the formulation: "real-sym" uses Re(C_n) at dimension P,
    "real-embedded" uses T(C_n) at dimension 2P, "hermitian" keeps C_n at
    dimension P (solved internally through the embedding).
    """

    kind: str
    dimension: int
    factor_rows: np.ndarray     # stacked real rows, one slice per constraint
    row_owner: np.ndarray       # constraint index owning each factor row
    count: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown relaxation kind {self.kind!r}")
        if self.factor_rows.shape[0] != self.row_owner.shape[0]:
            raise ValueError("factor rows and owners disagree")

    @classmethod
    def from_peak_rows(cls, rows: np.ndarray, kind: str) -> "RelaxationProblem":
        rows = np.asarray(rows, dtype=complex)
        n, p = rows.shape
        re, im = rows.real, rows.imag
        if kind == "real-sym":
            # Re(C_n) = a^T a + b^T b with a = Re u_n, b = Im u_n
            g = np.vstack([re, im])
            dim = p
        elif kind in ("real-embedded", "hermitian"):
            # T(C_n) = t1 t1^T + t2 t2^T with t1 = (Re u, -Im u), t2 = (Im u, Re u)
            g = np.vstack([np.hstack([re, -im]), np.hstack([im, re])])
            dim = 2 * p if kind == "real-embedded" else p
        else:
            raise ValueError(f"unknown relaxation kind {kind!r}")
        owner = np.tile(np.arange(n), 2)
        return cls(kind, dim, g, owner, n)

    @classmethod
    def from_matrices(cls, matrices, kind: str) -> "RelaxationProblem":
        """Build from dense PSD matrices (each factored by eigendecomposition)."""
        blocks, owners = [], []
        for i, M in enumerate(matrices):
            rows = _psd_factor_rows(M)
            blocks.append(rows)
            owners.append(np.full(rows.shape[0], i))
        g = np.vstack(blocks)
        dim = np.asarray(matrices[0]).shape[0]
        return cls(kind, dim, g, np.concatenate(owners), len(blocks))

    @property
    def solver_dimension(self) -> int:
        """Side of the real symmetric matrices the solver iterates on."""
        return 2 * self.dimension if self.kind == "hermitian" else self.dimension

    @property
    def report_scale(self) -> float:
        """Multiplier taking internal trace values to b^H C b units."""
        return 0.5 if self.kind in ("real-embedded", "hermitian") else 1.0

    def trace_values(self, X: np.ndarray) -> np.ndarray:
        """Internal Tr(C~_n X) for all constraints at the solver dimension."""
        q = np.einsum("ij,ij->i", self.factor_rows @ X, self.factor_rows)
        return np.bincount(self.row_owner, weights=q, minlength=self.count)

    def weighted_gradient(self, weights: np.ndarray) -> np.ndarray:
        """sum_n w_n C~_n as a dense symmetric matrix."""
        wr = weights[self.row_owner]
        return (self.factor_rows * wr[:, None]).T @ self.factor_rows

    def constraint_matrix(self, n: int) -> np.ndarray:
        """Densify constraint n in the spec formulation (small problems/tests)."""
        rows = self.factor_rows[self.row_owner == n]
        m = rows.T @ rows
        if self.kind == "hermitian":
            return unembed_matrix(m)    # T is inverted exactly on its image
        return m

    def constraint_matrices(self) -> list:
        return [self.constraint_matrix(n) for n in range(self.count)]


def build_relaxation(peaks: PeakMatrixSet, L: int) -> RelaxationProblem:
    """Relaxed problem matching the alphabet order L."""
    if L < 2:
        raise ValueError("alphabet order L must be at least 2")
    if L == 2:
        kind = "real-sym"
    elif L == 4:
        kind = "real-embedded"
    else:
        kind = "hermitian"
    return RelaxationProblem.from_peak_rows(peaks.rows, kind)


@dataclass(frozen=True)
class RelaxationSolution:
    """A solved relaxation: feasible X*, its optimum, and its eigensystem."""

    X_star: "SpectrahedronPoint"
    lambda_star: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kind: str

    def __post_init__(self):
        X = self.X_star.matrix
        rec = (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T
        norm = max(np.linalg.norm(X), 1e-30)
        if np.linalg.norm(rec - X) > 1e-8 * norm:
            raise ValueError("eigendecomposition does not reconstruct X*")

    @classmethod
    def from_point(cls, point: "SpectrahedronPoint", lambda_star: float,
                   kind: str) -> "RelaxationSolution":
        w, Q = np.linalg.eigh(point.matrix)
        return cls(point, lambda_star, w[::-1].copy(), Q[:, ::-1].copy(), kind)


def _leading_eigenvector(solution: RelaxationSolution) -> np.ndarray:
    """Leading eigenvector scaled by sqrt(lambda_1), with deterministic ties.

    Eigenvalues within 1e-9 relative of the largest are treated as tied; the
    tie goes to the eigenvector whose absolute-component sequence is
    lexicographically largest.
    """
    lam = solution.eigenvalues
    if lam.size == 0 or lam[0] <= 0:
        raise DegenerateSolutionError("leading eigenvalue is not positive")
    tied = np.nonzero(lam >= lam[0] * (1.0 - 1e-9))[0]
    best = max(tied, key=lambda i: tuple(np.abs(solution.eigenvectors[:, i])))
    return np.sqrt(lam[0]) * solution.eigenvectors[:, best]


def rank1_approximation(solution: RelaxationSolution, L: int) -> RotationVector:
    """Project the scaled leading eigenvector onto the feasible set Omega_L^P."""
    alphabet = PhaseAlphabet(L)
    q = _leading_eigenvector(solution)
    if L == 2:
        if solution.kind != "real-sym":
            raise ValueError("L=2 rounding expects a real-sym solution")
        idx = np.where(q.real >= 0, 0, 1)    # sgn with sgn(0) = +1
    elif L == 4:
        if solution.kind != "real-embedded":
            raise ValueError("L=4 rounding expects a real-embedded solution")
        p = q.shape[0] // 2
        sr, si = q.real[:p] >= 0, q.real[p:] >= 0
        # (1/sqrt2) e^{-j pi/4} (sgn_re + j sgn_im) lands on Omega_4 exactly
        idx = np.where(si, np.where(sr, 0, 1), np.where(sr, 3, 2))
    else:
        if solution.kind != "hermitian":
            raise ValueError("general-L rounding expects a hermitian solution")
        dist = np.abs(q[:, None] - alphabet.elements[None, :])
        idx = np.argmin(dist, axis=1)        # ties fall to the smaller index
    return RotationVector.from_indices(idx, alphabet)
