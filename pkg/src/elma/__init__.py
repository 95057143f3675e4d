"""Enhanced low-rank matrix approximation.

Denoise a matrix by thresholding its singular values with a parameterized
non-convex penalty whose weight is capped so the overall objective stays
strictly convex; the minimizer is closed form. Includes the classical
soft-thresholding (nuclear norm), p-shrinkage and one-shot weighted
soft-thresholding baselines, a synthetic RSE benchmark, and a non-local
self-similarity image denoiser built on the same solver.
"""

from .bench import BenchConfig, BenchRecord, generate_low_rank, rse, run_sweep, summarize
from .image import NssConfig, PatchGroup, block_match, denoise_group, denoise_image, psnr, read_pgm, write_pgm
from .lrma import LrmaResult, objective_eval, rank_of, solve
from .matrix import add_awgn, frobenius_norm_sq, make_rng, random_gaussian, read_matrix_csv, write_matrix_csv
from .methods import spec_for_method
from .penalty import PenaltySpec, UnsupportedFamilyError, convexity_max_a, emit_curves, penalty_eval, s_eval, threshold
from .svd import SvdConvergenceError, SvdFactors, reconstruct, svd

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "LrmaResult",
    "NssConfig",
    "PatchGroup",
    "PenaltySpec",
    "SvdConvergenceError",
    "SvdFactors",
    "UnsupportedFamilyError",
    "add_awgn",
    "block_match",
    "convexity_max_a",
    "denoise_group",
    "denoise_image",
    "emit_curves",
    "frobenius_norm_sq",
    "generate_low_rank",
    "make_rng",
    "objective_eval",
    "penalty_eval",
    "psnr",
    "random_gaussian",
    "rank_of",
    "read_matrix_csv",
    "read_pgm",
    "reconstruct",
    "rse",
    "run_sweep",
    "s_eval",
    "solve",
    "spec_for_method",
    "summarize",
    "svd",
    "threshold",
    "write_matrix_csv",
    "write_pgm",
]
