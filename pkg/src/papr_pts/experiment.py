"""Monte-Carlo CCDF experiments comparing the PAPR-reduction methods.

Each trial draws one 16QAM symbol vector and evaluates every enabled method
on it, so methods are paired.  Per-trial and per-method random streams are
derived from the master seed by a counter scheme, which makes the emitted CSV
byte-identical across runs of the same configuration.

Config files are flat `key = value` text ('#' starts a comment).  Recognized
keys are the ExperimentConfig field names; methods and n_candidates take
comma-separated values, e.g.

    K = 64
    methods = original, rand-papr, phase-random
    n_candidates = 10, 70
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .brute_force import ENUMERATION_LIMIT, brute_force
from .ofdm import ensemble_average_power, generate_symbols, qam16
from .pts import PARTITION_SCHEMES, make_partition, peak_matrices, symbol_matrix
from .randomization import (GaussianSampler, candidate_set_from_indices,
                            derive_seed, phase_random_indices, sample,
                            _round_indices)
from .relaxation import build_relaxation, rank1_approximation
from .solver import SolverConfig, solve_minmax, solve_quartic
from .upper_bound import quartic_spec

METHODS = ("original", "brute-force", "l2-approx", "rand-papr", "rand-upper",
           "phase-random")
_N_DEPENDENT = ("rand-papr", "rand-upper", "phase-random")
GRID_STEP_DB = 0.1


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ExperimentError(RuntimeError):
    """A trial failed; the message carries the trial index."""


@dataclass(frozen=True)
class ExperimentConfig:
    K: int = 64
    P: int = 8
    L: int = 2
    J: int = 8
    methods: tuple = METHODS
    n_candidates: tuple = (10, 70)
    trials: int = 500
    seed: int = 0
    partition: str = "adjacent"
    out: str | None = None
    brute_force_trials: int | None = None
    solver_max_iters: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "n_candidates", tuple(int(n) for n in self.n_candidates))
        if min(self.K, self.P, self.J) < 1 or self.L < 2:
            raise ConfigError("K, P, J must be >= 1 and L >= 2")
        if self.K % self.P != 0:
            raise ConfigError(f"P={self.P} must divide K={self.K}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if any(n < 1 for n in self.n_candidates) or not self.n_candidates:
            raise ConfigError("n_candidates must be positive")
        if self.partition not in PARTITION_SCHEMES:
            raise ConfigError(f"partition must be one of {PARTITION_SCHEMES}")
        if "brute-force" in self.methods and self.L ** (self.P - 1) > ENUMERATION_LIMIT:
            raise ConfigError(
                f"brute-force over L^(P-1) = {self.L ** (self.P - 1)} candidates "
                f"exceeds the {ENUMERATION_LIMIT} guard; drop the method or shrink P/L"
            )
        if self.brute_force_trials is not None and self.brute_force_trials < 1:
            raise ConfigError("brute_force_trials must be >= 1 when given")

    @property
    def effective_brute_force_trials(self) -> int:
        n = self.trials if self.brute_force_trials is None else self.brute_force_trials
        return min(n, self.trials)

    def columns(self) -> list:
        cols = []
        for m in self.methods:
            if m in _N_DEPENDENT:
                cols.extend(f"{m}-N{n}" for n in self.n_candidates)
            else:
                cols.append(m)
        return cols


PRESETS = {
    # desk scale: every method is exact or cheap enough for CI-style runs
    "desk": ExperimentConfig(K=64, P=8, L=2, J=8, trials=500, seed=1),
    # paper scale, K=256 / J=16, 2000 trials (200 for brute force)
    "fig1": ExperimentConfig(K=256, P=16, L=2, J=16, trials=2000,
                             brute_force_trials=200, seed=1),
    "fig2": ExperimentConfig(K=256, P=8, L=4, J=16, trials=2000,
                             brute_force_trials=200, seed=1),
    # brute force is beyond the enumeration guard at (P, L) = (8, 8)
    "fig3": ExperimentConfig(K=256, P=8, L=8, J=16, trials=2000, seed=1,
                             methods=tuple(m for m in METHODS if m != "brute-force")),
}


@dataclass(frozen=True)
class CcdfTable:
    """Empirical Pr{PAPR > gamma} per method on a 0.1 dB grid."""

    gamma_db: np.ndarray
    columns: dict
    counts: dict

    def __post_init__(self):
        object.__setattr__(self, "gamma_db", np.asarray(self.gamma_db, dtype=float))
        for name, probs in self.columns.items():
            probs = np.asarray(probs, dtype=float)
            self.columns[name] = probs
            if probs.size != self.gamma_db.size:
                raise ValueError(f"column {name} length mismatch")
            if np.any(probs < 0) or np.any(probs > 1) or np.any(np.diff(probs) > 1e-12):
                raise ValueError(f"column {name} is not a CCDF")


def _sampler_kind(L: int) -> str:
    return "real" if L in (2, 4) else "complex"


def _quartic_kind(L: int) -> str:
    if L == 2:
        return "real-sym"
    if L == 4:
        return "real-embedded"
    return "hermitian"


def _db(linear: float) -> float:
    return 10.0 * math.log10(linear)


def _prefix_best_db(values: np.ndarray, n_list) -> dict:
    return {n: _db(float(np.min(values[:n]))) for n in n_list}


def run_experiment(config: ExperimentConfig) -> CcdfTable:
    """Run all trials and aggregate the per-method CCDF table."""
    constellation = qam16()
    p_av = ensemble_average_power(constellation, config.K)
    partition = make_partition(config.K, config.P, config.partition,
                               derive_seed(config.seed, 0, 99))
    solver_cfg = SolverConfig(seed=config.seed) if config.solver_max_iters is None \
        else SolverConfig(seed=config.seed, max_iters=config.solver_max_iters)
    n_max = max(config.n_candidates)
    bf_trials = config.effective_brute_force_trials
    need_minmax = bool({"l2-approx", "rand-papr"} & set(config.methods))

    samples: dict = {col: [] for col in config.columns()}
    for trial in range(config.trials):
        try:
            symbols = generate_symbols(config.K, constellation,
                                       derive_seed(config.seed, trial, 0))
            matrix = symbol_matrix(symbols, partition)
            peaks = peak_matrices(matrix, config.J)

            if "original" in config.methods:
                ident = np.ones(config.P, dtype=complex)
                samples["original"].append(
                    _db(float(np.max(peaks.quadratic_forms(ident))) / p_av))

            if "brute-force" in config.methods and trial < bf_trials:
                bf = brute_force(matrix, config.L, config.J, p_av)
                samples["brute-force"].append(bf.best_papr.db)

            if need_minmax:
                problem = build_relaxation(peaks, config.L)
                solution, _ = solve_minmax(problem, solver_cfg)
                if "l2-approx" in config.methods:
                    rot = rank1_approximation(solution, config.L)
                    val = float(np.max(peaks.quadratic_forms(rot.phases))) / p_av
                    samples["l2-approx"].append(_db(val))
                if "rand-papr" in config.methods:
                    sampler = GaussianSampler.from_covariance(
                        solution.X_star, _sampler_kind(config.L))
                    draws = sample(sampler, n_max, derive_seed(config.seed, trial, 1))
                    cand = candidate_set_from_indices(
                        peaks, _round_indices(draws, config.L), config.L, p_av)
                    for n, db in _prefix_best_db(cand.papr_values,
                                                 config.n_candidates).items():
                        samples[f"rand-papr-N{n}"].append(db)

            if "rand-upper" in config.methods:
                point, _ = solve_quartic(quartic_spec(matrix), solver_cfg,
                                         _quartic_kind(config.L))
                sampler = GaussianSampler.from_covariance(point, _sampler_kind(config.L))
                draws = sample(sampler, n_max, derive_seed(config.seed, trial, 2))
                cand = candidate_set_from_indices(
                    peaks, _round_indices(draws, config.L), config.L, p_av)
                for n, db in _prefix_best_db(cand.papr_values,
                                             config.n_candidates).items():
                    samples[f"rand-upper-N{n}"].append(db)

            if "phase-random" in config.methods:
                idx = phase_random_indices(config.P, config.L, n_max,
                                           derive_seed(config.seed, trial, 3))
                cand = candidate_set_from_indices(peaks, idx, config.L, p_av)
                for n, db in _prefix_best_db(cand.papr_values,
                                             config.n_candidates).items():
                    samples[f"phase-random-N{n}"].append(db)
        except Exception as exc:
            raise ExperimentError(f"trial {trial}: {exc}") from exc

    return table_from_samples({k: np.asarray(v) for k, v in samples.items()},
                              config.columns())


def table_from_samples(samples: dict, column_order=None) -> CcdfTable:
    """Aggregate per-trial PAPR dB samples into a CCDF table on the 0.1 dB grid."""
    cols = list(column_order) if column_order is not None else list(samples)
    allv = np.concatenate([samples[c] for c in cols])
    lo = math.floor(float(np.min(allv)) / GRID_STEP_DB) - 1
    hi = math.ceil(float(np.max(allv)) / GRID_STEP_DB)
    gamma = np.arange(lo, hi + 1) * GRID_STEP_DB
    columns = {}
    counts = {}
    for c in cols:
        vals = samples[c]
        columns[c] = np.mean(vals[None, :] > gamma[:, None], axis=1)
        counts[c] = int(vals.size)
    return CcdfTable(gamma, columns, counts)


def emit_csv(table: CcdfTable, path) -> None:
    """Write `gamma_db,<method>...` rows, 6 significant digits, LF endings."""
    names = list(table.columns)
    lines = ["gamma_db" + "".join("," + n for n in names)]
    for i, g in enumerate(table.gamma_db):
        row = [f"{g:.6g}"] + [f"{table.columns[n][i]:.6g}" for n in names]
        lines.append(",".join(row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ExperimentError(f"cannot write CSV to {path}: {exc}") from exc


def load_csv(path) -> CcdfTable:
    """Read a table written by emit_csv; trial counts are unknown (set to 1)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ExperimentError(f"cannot read CSV from {path}: {exc}") from exc
    header = lines[0].split(",")
    if header[0] != "gamma_db":
        raise ExperimentError(f"{path} is not a CCDF table")
    names = header[1:]
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    if data.size == 0:
        data = np.empty((0, len(names) + 1))
    return CcdfTable(data[:, 0], {n: data[:, i + 1] for i, n in enumerate(names)},
                     {n: 1 for n in names})


def summarize(table: CcdfTable, level: float) -> dict:
    """Per-method PAPR (dB) at the requested exceedance level, NaN if unresolved."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    out = {}
    for name, probs in table.columns.items():
        count = table.counts.get(name, 1)
        if level < 1.0 / max(count, 1) or probs.size == 0 or probs[0] <= level:
            out[name] = math.nan
            continue
        idx = int(np.argmax(probs <= level))
        if probs[idx] > level:         # never crosses the level
            out[name] = math.nan
            continue
        g0, g1 = table.gamma_db[idx - 1], table.gamma_db[idx]
        p0, p1 = probs[idx - 1], probs[idx]
        out[name] = float(g0 + (g1 - g0) * (p0 - level) / (p0 - p1))
    return out


def merge_tables(tables, weights=None) -> CcdfTable:
    """Pool CCDF tables column-wise, weighted by trial counts.

    Tables loaded from CSV carry no counts; pass explicit weights (one per
    table) to pool runs of different sizes correctly.
    """
    tables = list(tables)
    if not tables:
        raise ValueError("nothing to merge")
    names = list(tables[0].columns)
    for t in tables:
        if list(t.columns) != names:
            raise ExperimentError("tables have mismatched method columns")
    lo = min(int(round(t.gamma_db[0] / GRID_STEP_DB)) for t in tables)
    hi = max(int(round(t.gamma_db[-1] / GRID_STEP_DB)) for t in tables)
    gamma = np.arange(lo, hi + 1) * GRID_STEP_DB
    columns = {}
    counts = {}
    for name in names:
        acc = np.zeros(gamma.size)
        wsum = 0.0
        total = 0
        for k, t in enumerate(tables):
            w = float(weights[k]) if weights is not None else float(t.counts.get(name, 1))
            start = int(round(t.gamma_db[0] / GRID_STEP_DB)) - lo
            probs = np.ones(gamma.size)      # CCDF extends as 1 below, 0 above
            probs[start:start + t.gamma_db.size] = t.columns[name]
            probs[start + t.gamma_db.size:] = 0.0
            acc += w * probs
            wsum += w
            total += t.counts.get(name, 0)
        columns[name] = acc / wsum
        counts[name] = total
    return CcdfTable(gamma, columns, counts)


def load_config_file(path) -> dict:
    """Parse the flat key = value grammar into a raw string dict."""
    raw = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, value = (part.strip() for part in text.split("=", 1))
                raw[key] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return raw


_INT_KEYS = {"K", "P", "L", "J", "trials", "seed", "brute_force_trials",
             "solver_max_iters"}
_LIST_KEYS = {"methods", "n_candidates"}


def config_from_strings(raw: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Apply raw key/value overrides (config-file or CLI) onto a base config."""
    cfg = base if base is not None else ExperimentConfig()
    known = {f.name for f in fields(ExperimentConfig)}
    updates = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if name in _INT_KEYS:
            try:
                updates[name] = int(value)
            except ValueError:
                raise ConfigError(f"{key} expects an integer, got {value!r}") from None
        elif name == "n_candidates":
            try:
                updates[name] = tuple(int(v) for v in str(value).split(",") if v.strip())
            except ValueError:
                raise ConfigError(f"{key} expects comma-separated integers") from None
        elif name == "methods":
            updates[name] = tuple(v.strip() for v in str(value).split(",") if v.strip())
        else:
            updates[name] = value
    try:
        return replace(cfg, **updates)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
