"""Sparsity-inducing penalties and their scalar threshold (proximal) operators.

Four families are supported, identified by ``PenaltySpec.family``:

``firm``
    Partly quadratic penalty ``phi(x; a) = |x| - (a/2) x^2`` for
    ``|x| <= 1/a`` and the constant ``1/(2a)`` beyond. Its proximal
    operator is the firm threshold: zero below ``lam``, identity above
    ``1/a``, linear in between. The non-convexity weight ``a`` must satisfy
    ``0 <= a < 1/lam``; the constructor rejects anything else, because that
    strict bound is exactly what keeps ``x -> (y-x)^2/2 + lam*phi(x)``
    strictly convex.

``soft``
    Plain l1 penalty ``|x|`` with the soft threshold as proximal operator.
    Behaviorally identical to ``firm`` with ``a = 0``.

``pshrink``
    p-shrinkage baseline: ``theta(y) = sign(y) * max(|y| -
    lam**(2-p) * |y|**(p-1), 0)`` with ``theta(0) = 0``. No closed-form
    penalty expression is exposed for it.

``wsoft``
    Weighted soft threshold baseline with weights inversely proportional to
    the values being thresholded: given a vector ``s`` of singular values,
    ``w_i = lam * (min(s) + eps) / (s_i + eps)``, so the largest weight
    equals ``lam``. Applied to a scalar it degenerates to the plain soft
    threshold at ``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import atomic_write_bytes

__all__ = [
    "PenaltySpec",
    "UnsupportedFamilyError",
    "penalty_eval",
    "s_eval",
    "threshold",
    "apply_to_sigma",
    "convexity_max_a",
    "emit_curves",
    "write_curves_csv",
]

FAMILIES = ("firm", "soft", "pshrink", "wsoft")


class UnsupportedFamilyError(ValueError):
    """An operation was requested for a family that does not define it."""


def convexity_max_a(lam: float) -> float:
    """Exclusive upper bound on the non-convexity weight: ``1 / lam``.

    Any ``a`` strictly below this keeps the scalar objective
    ``x -> x^2/2 + lam*phi(x; a)`` (and hence the matrix objective built
    from it) strictly convex.
    """
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    return 1.0 / lam


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family plus parameters, validated at construction.

    Use the classmethod constructors; they enforce ``lam > 0`` and, for the
    firm family, the strict convexity gate ``0 <= a < 1/lam``.
    """

    family: str
    lam: float
    a: float = 0.0
    p: float = -2.0
    weight_eps: float = 1e-6

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown penalty family {self.family!r}")
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.family == "firm":
            if not np.isfinite(self.a) or self.a < 0:
                raise ValueError(f"a must be nonnegative, got {self.a}")
            if self.a >= convexity_max_a(self.lam):
                raise ValueError(
                    f"a = {self.a} breaks the strict-convexity condition "
                    f"a < 1/lam = {1.0 / self.lam}"
                )
        elif self.a != 0.0:
            raise ValueError("a is only meaningful for the firm family")
        if self.family == "pshrink" and not np.isfinite(self.p):
            raise ValueError(f"p must be finite, got {self.p}")
        if self.family == "wsoft" and not self.weight_eps > 0:
            raise ValueError(f"weight_eps must be positive, got {self.weight_eps}")

    @classmethod
    def firm(cls, lam: float, a: float) -> "PenaltySpec":
        return cls(family="firm", lam=float(lam), a=float(a))

    @classmethod
    def firm_fraction(cls, lam: float, fraction: float) -> "PenaltySpec":
        """Firm spec with ``a`` given as a fraction of the bound ``1/lam``.

        ``fraction = 0.6`` means ``a = 0.6/lam``, which satisfies the gate
        for every positive ``lam``.
        """
        if not 0.0 <= fraction < 1.0:
            raise ValueError(f"fraction must lie in [0, 1), got {fraction}")
        return cls(family="firm", lam=float(lam), a=fraction / float(lam))

    @classmethod
    def soft(cls, lam: float) -> "PenaltySpec":
        return cls(family="soft", lam=float(lam))

    @classmethod
    def pshrink(cls, lam: float, p: float = -2.0) -> "PenaltySpec":
        return cls(family="pshrink", lam=float(lam), p=float(p))

    @classmethod
    def wsoft(cls, lam: float, weight_eps: float = 1e-6) -> "PenaltySpec":
        return cls(family="wsoft", lam=float(lam), weight_eps=float(weight_eps))


def penalty_eval(spec: PenaltySpec, x):
    """Evaluate the penalty ``phi(x; a)`` elementwise.

    Defined for the firm and soft families only; pshrink and wsoft are
    threshold-only baselines here.
    """
    if spec.family not in ("firm", "soft"):
        raise UnsupportedFamilyError(
            f"family {spec.family!r} has no closed penalty expression"
        )
    ax = np.abs(np.asarray(x, dtype=np.float64))
    a = spec.a
    if a == 0.0:
        out = ax
    else:
        out = np.where(ax <= 1.0 / a, ax - 0.5 * a * ax * ax, 0.5 / a)
    return out if out.ndim else float(out)


def s_eval(spec: PenaltySpec, x):
    """Concave remainder ``s(x; a) = phi(x; a) - |x|`` (firm family only).

    Always nonpositive, with curvature bounded below by ``-a``; it carries
    all the non-convexity of the penalty.
    """
    if spec.family != "firm":
        raise UnsupportedFamilyError(f"s is defined for the firm family, not {spec.family!r}")
    x = np.asarray(x, dtype=np.float64)
    out = penalty_eval(spec, x) - np.abs(x)
    return out if np.ndim(out) else float(out)


def _firm_threshold(y, lam: float, a: float):
    ay = np.abs(y)
    shrunk = np.maximum((ay - lam) / (1.0 - a * lam), 0.0)
    return np.sign(y) * np.minimum(ay, shrunk)


def _pshrink_threshold(y, lam: float, p: float):
    ay = np.abs(y)
    out = np.zeros_like(ay)
    nz = ay > 0
    with np.errstate(divide="ignore", over="ignore"):
        shrink = ay[nz] - lam ** (2.0 - p) * ay[nz] ** (p - 1.0)
    out[nz] = np.maximum(shrink, 0.0)
    return np.sign(y) * out


def _wsoft_weights(sigma: np.ndarray, lam: float, eps: float) -> np.ndarray:
    # Weights inversely proportional to the values, scaled so the largest
    # weight (at the smallest value) equals lam.
    ay = np.abs(sigma)
    return lam * (ay.min() + eps) / (ay + eps)


def _wsoft_threshold(y, lam: float, eps: float):
    w = _wsoft_weights(y, lam, eps)
    return np.sign(y) * np.maximum(np.abs(y) - w, 0.0)


def threshold(spec: PenaltySpec, y):
    """Apply the family's threshold operator elementwise.

    For ``wsoft`` the input array is interpreted as the vector being
    jointly thresholded (the weights depend on all of its entries); a
    scalar is the one-element case and reduces to soft thresholding at
    ``lam``.
    """
    arr = np.asarray(y, dtype=np.float64)
    flat = np.atleast_1d(arr)
    if spec.family == "firm":
        out = _firm_threshold(flat, spec.lam, spec.a)
    elif spec.family == "soft":
        out = np.sign(flat) * np.maximum(np.abs(flat) - spec.lam, 0.0)
    elif spec.family == "pshrink":
        out = _pshrink_threshold(flat, spec.lam, spec.p)
    else:
        out = _wsoft_threshold(flat, spec.lam, spec.weight_eps)
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def apply_to_sigma(spec: PenaltySpec, sigma: np.ndarray) -> np.ndarray:
    """Threshold a nonnegative singular-value vector.

    This is the path the matrix solver takes; it is the same elementwise
    operator as :func:`threshold`, with wsoft's data-dependent weights
    computed from this vector.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    return np.asarray(threshold(spec, sigma), dtype=np.float64)


def emit_curves(spec: PenaltySpec, lo: float, hi: float, step: float):
    """Sample ``(x, phi(x), s(x), theta(x))`` on a uniform grid.

    Returns a list of ``(x, phi, s, theta)`` tuples; entries a family does
    not define are ``None``. The grid runs from *lo* upward in *step*
    increments, including *hi* when it lands on the grid.
    """
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    xs = lo + step * np.arange(n)
    if spec.family == "wsoft":
        # Pointwise semantics: each grid value is its own one-element case.
        theta = np.array([threshold(spec, float(x)) for x in xs])
    else:
        theta = np.asarray(threshold(spec, xs))
    phi = s = None
    if spec.family in ("firm", "soft"):
        phi = penalty_eval(spec, xs)
    if spec.family == "firm":
        s = s_eval(spec, xs)
    rows = []
    for i in range(n):
        rows.append(
            (
                float(xs[i]),
                None if phi is None else float(phi[i]),
                None if s is None else float(s[i]),
                float(theta[i]),
            )
        )
    return rows


def write_curves_csv(rows, path) -> None:
    """Write sampled curves as CSV with header ``x,phi,s,theta``.

    Undefined columns are emitted as empty fields.
    """

    def cell(v):
        return "" if v is None else format(v, ".12g")

    lines = ["x,phi,s,theta"]
    for x, phi, s, theta in rows:
        lines.append(",".join((format(x, ".12g"), cell(phi), cell(s), cell(theta))))
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))
