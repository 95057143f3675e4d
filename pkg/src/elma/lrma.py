"""Low-rank matrix approximation by singular-value thresholding.

The estimation problem is

    minimize_X  (1/2) * |Y - X|_F^2 + lam * sum_i phi(sigma_i(X); a)

and its solution is closed form: take the SVD of Y and push the singular
values through the penalty's threshold operator. For the firm family with
``a < 1/lam`` the objective is strictly convex, so :func:`solve` returns its
unique global minimizer; with ``a = 0`` it reduces to classical
soft-thresholding of the singular values (nuclear-norm solution). The
pshrink and wsoft baselines reuse the same machinery but carry no objective
of their own, so only the data term is reported for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import penalty as pen
from . import svd as svd_mod
from .matrix import as_matrix, frobenius_norm_sq

__all__ = ["LrmaResult", "objective_eval", "solve", "rank_of"]


@dataclass(frozen=True)
class LrmaResult:
    """Outcome of one thresholded-SVD solve.

    ``objective`` is the full value (data term plus penalty term) when the
    family defines a penalty, otherwise the data term alone;
    ``penalty_term`` is ``None`` in that case.
    """

    x_hat: np.ndarray
    sigma_in: np.ndarray
    sigma_out: np.ndarray
    objective: float
    penalty_term: Optional[float]


def objective_eval(y, x, spec: pen.PenaltySpec) -> float:
    """Evaluate ``(1/2)|Y-X|_F^2 + lam * sum phi(sigma_i(X))``.

    Requires a family with a penalty expression (firm or soft).
    """
    y = as_matrix(y)
    x = as_matrix(x)
    if y.shape != x.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {x.shape}")
    sig = svd_mod.svd(x).sigma
    return 0.5 * frobenius_norm_sq(y - x) + spec.lam * float(
        np.sum(pen.penalty_eval(spec, sig))
    )


def solve(y, spec: pen.PenaltySpec) -> LrmaResult:
    """Threshold the singular values of ``y`` under *spec*.

    Returns the thresholded reconstruction together with the input and
    output spectra. The threshold operators are monotone, so the output
    spectrum stays non-increasing and entrywise within [0, sigma_in].
    """
    f = svd_mod.svd(y)
    sigma_out = pen.apply_to_sigma(spec, f.sigma)
    x_hat = svd_mod.reconstruct(svd_mod.SvdFactors(f.u, sigma_out, f.v))
    data_term = 0.5 * frobenius_norm_sq(np.asarray(y, dtype=np.float64) - x_hat)
    if spec.family in ("firm", "soft"):
        penalty_term = spec.lam * float(np.sum(pen.penalty_eval(spec, sigma_out)))
        objective = data_term + penalty_term
    else:
        penalty_term = None
        objective = data_term
    return LrmaResult(
        x_hat=x_hat,
        sigma_in=f.sigma,
        sigma_out=sigma_out,
        objective=objective,
        penalty_term=penalty_term,
    )


def rank_of(result: LrmaResult, tol: float = 0.0) -> int:
    """Number of output singular values strictly above *tol*."""
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    return int(np.count_nonzero(result.sigma_out > tol))
