"""Mapping from experiment method names to penalty specs.

The benchmark, the image pipeline, and the CLI all speak in terms of four
method names:

    elma   firm (partly quadratic) thresholding, a given as a fraction of 1/lam
    nnm    nuclear-norm minimization, i.e. soft singular-value thresholding
    ps     p-shrinkage baseline
    wnnm   one-shot weighted soft-thresholding baseline

``svt`` is accepted as an alias for ``nnm`` and ``firm`` for ``elma``.
"""

from __future__ import annotations

from .penalty import PenaltySpec

__all__ = ["METHODS", "canonical_method", "spec_for_method"]

METHODS = ("elma", "nnm", "ps", "wnnm")

_ALIASES = {"svt": "nnm", "firm": "elma", "soft": "nnm", "pshrink": "ps", "wsoft": "wnnm"}


def canonical_method(name: str) -> str:
    name = name.strip().lower()
    name = _ALIASES.get(name, name)
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return name


def spec_for_method(
    method: str, lam: float, a_fraction: float = 0.6, p: float = -2.0
) -> PenaltySpec:
    """Build the penalty spec a named method uses at regularization *lam*."""
    method = canonical_method(method)
    if method == "elma":
        return PenaltySpec.firm_fraction(lam, a_fraction)
    if method == "nnm":
        return PenaltySpec.soft(lam)
    if method == "ps":
        return PenaltySpec.pshrink(lam, p)
    return PenaltySpec.wsoft(lam)
