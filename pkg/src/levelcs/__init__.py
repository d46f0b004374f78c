"""Compressed sensing with sparsity in levels.

Thresholding operators, the IHTL / NIHTL / CoSaMPL / OMPL decoders, RICL
certification, guarantee constants and a seeded phase-transition harness.
"""
from .analysis import (COSAMP_THRESHOLD, IHT_THRESHOLD, EnumerationCapError,
                       GuaranteeReport, LevelWeights, best_approx_error,
                       cosamp_guarantee, default_weights, gaussian_sample_bound,
                       iht_guarantee, qcbp_threshold, ricl_bruteforce,
                       ricl_worst_case, unit_weights, weighted_l1_norm, zeta_xi)
from .experiments import (ExperimentConfig, StructureRule, TrialOutcome,
                          run_trial, sweep_phase_grid, sweep_phase_line)
from .gen import derive_trial_seed, gaussian_matrix, random_levels_signal
from .levels import (LevelStructure, SupportSet, hard_threshold, is_levels_sparse,
                     level_slice, new_level_structure, parse_structure, restrict,
                     scale_sparsities, top_support)
from .linalg import apply, least_squares_on_support, normalize_columns, spectral_norm
from .report import emit_csv, emit_svg_heatmap
from .solvers import (DivergenceError, SolveOptions, SolveResult, StopReason,
                      cosampl, ihtl, nihtl, ompl)

__version__ = "0.1.0"
