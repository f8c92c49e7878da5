"""PTS-based OFDM PAPR reduction via semidefinite relaxation and randomization."""

from .brute_force import BruteForceResult, brute_force
from .experiment import (CcdfTable, ExperimentConfig, PRESETS, emit_csv,
                         merge_tables, run_experiment, summarize)
from .ofdm import (ConstellationSpec, PowerRatio, SampledSignal, SymbolVector,
                   baseband_samples, bpsk, constellation_from_points,
                   ensemble_average_power, generate_symbols,
                   oversampling_bound_factor, pmepr, qam16, rf_papr)
from .pts import (Partition, PeakMatrixSet, PhaseAlphabet, RotationVector,
                  SymbolMatrix, make_partition, modified_signal,
                  papr_of_rotation, peak_matrices, side_info_bits,
                  symbol_matrix)
from .randomization import (CandidateSet, GaussianSampler, best_of_n,
                            phase_random, round_to_alphabet, sample)
from .relaxation import (DegenerateSolutionError, RelaxationProblem,
                         RelaxationSolution, build_relaxation, embed_real,
                         rank1_approximation, unembed_matrix)
from .solver import (QuarticObjectiveSpec, SolverConfig, SolverReport,
                     SpectrahedronPoint, project_spectrahedron, solve_minmax,
                     solve_quartic)
from .upper_bound import (Autocorrelation, DiagonalizationKit, autocorrelation,
                          build_kit, convexity_probe, envelope_bound,
                          l2_correlation_norm, moment_sandwich_probe,
                          quartic_spec, quartic_value)

__version__ = "0.1.0"
