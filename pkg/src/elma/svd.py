"""Full SVD of dense real matrices.

The decomposition itself is delegated to LAPACK through ``numpy.linalg.svd``
(divide-and-conquer driver); this module owns the contract around it:
non-increasing singular values, orthonormal factors, a clamp that zeroes
noise-floor singular values, and a typed error when the iteration fails to
converge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import as_matrix, frobenius_norm_sq

__all__ = ["SvdFactors", "SvdConvergenceError", "svd", "reconstruct"]

# Singular values below this fraction of sigma_1 are clamped to exactly 0,
# so rank decisions do not depend on platform noise-floor values.
CLAMP_REL = 1e-12


class SvdConvergenceError(RuntimeError):
    """Raised when the underlying SVD iteration does not converge."""


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``Y = U diag(sigma) V^T``.

    u is m-by-k, v is n-by-k, sigma has length k = min(m, n), sorted
    non-increasing with nonnegative entries.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def k(self) -> int:
        return self.sigma.shape[0]


def svd(y) -> SvdFactors:
    """Thin SVD of a dense real matrix.

    Singular values smaller than ``CLAMP_REL * sigma_1`` are set to exactly
    zero. LAPACK already returns them sorted non-increasing; ties keep the
    order LAPACK produced, which is deterministic for identical input.
    """
    y = as_matrix(y)
    try:
        u, s, vh = np.linalg.svd(y, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(
            f"SVD failed to converge on {y.shape[0]}x{y.shape[1]} matrix "
            f"(|Y|_F^2 = {frobenius_norm_sq(y):.6g}): {exc}"
        ) from exc
    if s.size and s[0] > 0:
        s = np.where(s < CLAMP_REL * s[0], 0.0, s)
    return SvdFactors(u=u, sigma=s, v=vh.T.copy())


def reconstruct(f: SvdFactors) -> np.ndarray:
    """Multiply the factors back together: ``U diag(sigma) V^T``."""
    return (f.u * f.sigma) @ f.v.T
