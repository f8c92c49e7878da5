"""First-order convex solver over the spectrahedron {X PSD, diag(X) = 1}.

Two problem shapes are supported: the epigraph min-max of linear trace
functions max_n Tr(C_n X), smoothed with a softmax (log-sum-exp) temperature
schedule, and the smooth convex quartic sum_k Tr(M_k X)^2 + Tr(M^_k X)^2.
Both are minimized by projected gradient descent with backtracking; the
projection alternates an eigenvalue clamp with resetting the diagonal to one.

Hermitian problems are solved in the doubled real embedding and mapped back,
using Tr(T(C) T(X)) = 2 Tr(C X).  Every constraint/mask is a Gram matrix, so
traces are evaluated as quadratic forms of a few factor rows instead of dense
matrix products.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, softmax

from .relaxation import RelaxationProblem, RelaxationSolution, unembed_matrix


@dataclass(frozen=True)
class SolverConfig:
    feas_tol: float = 1e-7
    obj_tol: float = 1e-7          # relative objective stagnation
    max_iters: int = 20000         # total gradient/projection evaluations per solve
    mu_start: float = 0.1          # softmax temperature schedule, relative to scale
    mu_end: float = 1e-4
    smoothing_stages: int = 7
    restarts: int = 3
    stall_limit: int = 5
    seed: int = 0

    def __post_init__(self):
        if min(self.feas_tol, self.obj_tol, self.mu_start, self.mu_end) <= 0:
            raise ValueError("tolerances and temperatures must be positive")
        if self.max_iters < 1 or self.restarts < 1 or self.smoothing_stages < 1:
            raise ValueError("iteration counts must be positive")


@dataclass(frozen=True)
class SpectrahedronPoint:
    """A (near-)feasible point: PSD up to psd_violation, unit diagonal up to diag_violation."""

    matrix: np.ndarray
    psd_violation: float
    diag_violation: float

    @classmethod
    def from_matrix(cls, X: np.ndarray) -> "SpectrahedronPoint":
        X = np.asarray(X)
        w = np.linalg.eigvalsh(X)
        psd = float(max(0.0, -w[0]))
        diag = float(np.max(np.abs(np.diagonal(X).real - 1.0)))
        return cls(X, psd, diag)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SolverReport:
    iterations: int
    final_objective: float
    psd_violation: float
    diag_violation: float
    converged: bool
    objective_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    stage_breaks: tuple = ()


@dataclass(frozen=True)
class QuarticObjectiveSpec:
    """The 2K rank-1 Gram masks M_k, M^_k of the quartic objective, as rows.

    mask k of the first block is m_k^H m_k with m_k the k-th row of rows_v;
    the second block uses rows_vhat.
    """

    rows_v: np.ndarray
    rows_vhat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows_v", np.asarray(self.rows_v, dtype=complex))
        object.__setattr__(self, "rows_vhat", np.asarray(self.rows_vhat, dtype=complex))
        if self.rows_v.shape != self.rows_vhat.shape:
            raise ValueError("mask row blocks must have matching shapes")

    @property
    def count(self) -> int:
        return 2 * self.rows_v.shape[0]

    @property
    def dimension(self) -> int:
        return self.rows_v.shape[1]

    def all_rows(self) -> np.ndarray:
        return np.vstack([self.rows_v, self.rows_vhat])

    def mask(self, i: int) -> np.ndarray:
        """Densify mask i (first K are M_k, next K are M^_k)."""
        rows = self.all_rows()
        u = rows[i]
        return np.outer(np.conj(u), u)


def project_spectrahedron(M: np.ndarray, config: SolverConfig | None = None) -> SpectrahedronPoint:
    """Alternate eigenvalue clamping with a unit-diagonal reset.

    Stops once both residuals are within feas_tol (or after 500 rounds); the
    result is a nearby feasible point, not the exact metric projection.
    """
    cfg = config or SolverConfig()
    X = np.asarray(M)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("expected a square matrix")
    X = (X + X.conj().T) / 2.0
    for _ in range(500):
        w, Q = np.linalg.eigh(X)
        diag_dev = np.max(np.abs(np.diagonal(X).real - 1.0))
        # the diagonal reset is exact, so demand diag_dev == 0; a tolerance
        # here would let optimizers harvest objective from the slack
        if w[0] >= -cfg.feas_tol and diag_dev == 0.0:
            break
        X = (Q * np.clip(w, 0.0, None)) @ Q.conj().T
        X = (X + X.conj().T) / 2.0
        np.fill_diagonal(X, 1.0)
    return SpectrahedronPoint.from_matrix(X)


def _start_points(problem: RelaxationProblem, cfg: SolverConfig):
    """Seeded starts: identity, the dominant constraint's direction, random feasible."""
    d = problem.solver_dimension
    starts = [np.eye(d)]
    if cfg.restarts >= 2:
        traces = np.bincount(problem.row_owner,
                             weights=np.sum(problem.factor_rows ** 2, axis=1),
                             minlength=problem.count)
        n_star = int(np.argmax(traces))
        rows = problem.factor_rows[problem.row_owner == n_star]
        M = rows.T @ rows
        tr = np.trace(M)
        if tr > 0:
            starts.append(project_spectrahedron(M * (d / tr), cfg).matrix)
        else:
            starts.append(np.eye(d))
    rng = np.random.default_rng(cfg.seed)
    while len(starts) < cfg.restarts:
        R = rng.standard_normal((d, d))
        starts.append(project_spectrahedron((R + R.T) / 2.0, cfg).matrix)
    return starts[: cfg.restarts]


def _descend(problem, X, value_grad, budget, cfg, trace_log, alpha=None):
    """Monotone projected gradient descent with a Barzilai-Borwein step guess.

    Each BB step is safeguarded by backtracking until the objective strictly
    decreases, so the recorded objective is non-increasing.  Returns
    (X, f, iterations, stagnated, alpha) so the adapted step size can be
    threaded through smoothing stages.
    """
    f, grad = value_grad(X)
    if alpha is None:
        gnorm = float(np.linalg.norm(grad))
        alpha = 0.1 * X.shape[0] / (gnorm + 1e-30)
    used = 0
    stall = 0
    X_prev = grad_prev = None
    while used < budget and stall < cfg.stall_limit:
        if X_prev is not None:
            s = X - X_prev
            y = grad - grad_prev
            sy = float(np.sum(s * y))
            if sy > 1e-30:
                bb = float(np.sum(s * s)) / sy
                alpha = min(max(bb, 1e-3 * alpha), 1e3 * alpha)
        step_accepted = False
        step_collapsed = False
        while used < budget:
            Xc = project_spectrahedron(X - alpha * grad, cfg).matrix
            fc, gc = value_grad(Xc)
            used += 1
            if fc < f:
                step_accepted = True
                break
            alpha *= 0.5
            if alpha < 1e-18:
                step_collapsed = True
                break
        if not step_accepted:
            # a machine-precision step with no descent means we are stationary
            return X, f, used, step_collapsed, alpha
        improvement = f - fc
        X_prev, grad_prev = X, grad
        X, f, grad = Xc, fc, gc
        trace_log.append(f)
        alpha *= 1.05
        if improvement <= cfg.obj_tol * max(abs(f), 1e-30):
            stall += 1
        else:
            stall = 0
    return X, f, used, stall >= cfg.stall_limit, alpha


def _finish_point(problem, X):
    """Map the internal real iterate to the reported formulation."""
    if problem.kind == "hermitian":
        return SpectrahedronPoint.from_matrix(unembed_matrix(X))
    return SpectrahedronPoint.from_matrix(X)


def solve_minmax(problem: RelaxationProblem, config: SolverConfig | None = None):
    """Minimize max_n Tr(C_n X) over the spectrahedron.

    Returns (RelaxationSolution, SolverReport); lambda_star is in b^H C b
    units for every problem kind.
    """
    cfg = config or SolverConfig()
    d = problem.solver_dimension
    traces = np.bincount(problem.row_owner,
                         weights=np.sum(problem.factor_rows ** 2, axis=1),
                         minlength=problem.count)
    scale = float(np.max(traces)) / d if problem.count else 0.0
    if scale <= 0.0:
        point = _finish_point(problem, np.eye(d))
        sol = RelaxationSolution.from_point(point, 0.0, problem.kind)
        return sol, SolverReport(0, 0.0, point.psd_violation, point.diag_violation, True)

    mus = np.geomspace(cfg.mu_start, cfg.mu_end, cfg.smoothing_stages) * scale
    budget_per_start = max(cfg.max_iters // cfg.restarts, cfg.smoothing_stages)
    per_stage = max(budget_per_start // cfg.smoothing_stages, 1)

    best = None
    total_used = 0
    trace_log: list = []
    stage_breaks: list = []
    for X0 in _start_points(problem, cfg):
        X = X0
        alpha = None
        start_done = True
        for mu in mus:
            def value_grad(Xi, _mu=mu):
                t = problem.trace_values(Xi)
                f = _mu * logsumexp(t / _mu)
                w = softmax(t / _mu)
                return f, problem.weighted_gradient(w)

            X, _, used, stage_converged, alpha = _descend(
                problem, X, value_grad, per_stage, cfg, trace_log, alpha)
            total_used += used
            stage_breaks.append(len(trace_log))
            start_done = start_done and stage_converged
        lam_true = float(np.max(problem.trace_values(X)))
        if best is None or lam_true < best[0]:
            best = (lam_true, X, start_done)

    lam_int, X_best, schedule_done = best
    point = _finish_point(problem, X_best)
    lam = lam_int * problem.report_scale
    feasible = point.psd_violation <= cfg.feas_tol and point.diag_violation <= cfg.feas_tol
    report = SolverReport(total_used, lam, point.psd_violation, point.diag_violation,
                          bool(feasible and schedule_done),
                          np.asarray(trace_log), tuple(stage_breaks))
    return RelaxationSolution.from_point(point, lam, problem.kind), report


def _quartic_problem(spec: QuarticObjectiveSpec, kind: str) -> RelaxationProblem:
    return RelaxationProblem.from_peak_rows(spec.all_rows(), kind)


def quartic_objective(spec: QuarticObjectiveSpec, X: np.ndarray, kind: str = "hermitian") -> float:
    """F^(X) = sum_k Tr(M_k X)^2 + Tr(M^_k X)^2 in the formulation of `kind`."""
    prob = _quartic_problem(spec, kind)
    Xi = _embed_if_needed(X, kind)
    t = prob.trace_values(Xi) * prob.report_scale
    return float(np.sum(t * t))


def quartic_gradient(spec: QuarticObjectiveSpec, X: np.ndarray, kind: str = "hermitian") -> np.ndarray:
    """Gradient sum_k 2 Tr(M_k X) M_k + 2 Tr(M^_k X) M^_k, in the space of X."""
    rows = spec.all_rows()
    if kind == "hermitian":
        t = np.einsum("kp,pq,kq->k", rows, X, np.conj(rows)).real
        return (rows.conj() * (2.0 * t)[:, None]).T @ rows
    prob = _quartic_problem(spec, kind)
    t = prob.trace_values(X) * prob.report_scale
    return prob.weighted_gradient(2.0 * t * prob.report_scale)


def _embed_if_needed(X: np.ndarray, kind: str) -> np.ndarray:
    if kind == "hermitian":
        from .relaxation import embed_real
        return embed_real(np.asarray(X, dtype=complex))
    return np.asarray(X, dtype=float)


def solve_quartic(spec: QuarticObjectiveSpec, config: SolverConfig | None = None,
                  kind: str = "hermitian"):
    """Minimize the convex quartic over the spectrahedron.

    Returns (SpectrahedronPoint, SolverReport).  The point lives in the
    formulation selected by `kind`: real P x P for "real-sym", real 2P x 2P
    for "real-embedded", Hermitian P x P for "hermitian".
    """
    cfg = config or SolverConfig()
    prob = _quartic_problem(spec, kind)
    d = prob.solver_dimension
    c = prob.report_scale

    mask_traces = np.bincount(prob.row_owner,
                              weights=np.sum(prob.factor_rows ** 2, axis=1),
                              minlength=prob.count)
    if float(np.max(mask_traces, initial=0.0)) == 0.0:
        point = _finish_point(prob, np.eye(d))
        return point, SolverReport(0, 0.0, point.psd_violation, point.diag_violation, True)

    def value_grad(Xi):
        t = prob.trace_values(Xi) * c
        f = float(np.sum(t * t))
        return f, prob.weighted_gradient(2.0 * c * t)

    budget_per_start = max(cfg.max_iters // cfg.restarts, 1)
    best = None
    total_used = 0
    trace_log: list = []
    stage_breaks: list = []
    for X0 in _start_points(prob, cfg):
        X, f, used, done, _ = _descend(prob, X0, value_grad, budget_per_start, cfg, trace_log)
        total_used += used
        stage_breaks.append(len(trace_log))
        if best is None or f < best[0]:
            best = (f, X, done)

    f_best, X_best, done = best
    point = _finish_point(prob, X_best)
    feasible = point.psd_violation <= cfg.feas_tol and point.diag_violation <= cfg.feas_tol
    report = SolverReport(total_used, f_best, point.psd_violation, point.diag_violation,
                          bool(feasible and done), np.asarray(trace_log), tuple(stage_breaks))
    return point, report
