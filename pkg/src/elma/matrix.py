"""Dense matrix carrier, norms, seeded Gaussian sampling, CSV round-trip.

Matrices are plain 2-D float64 numpy arrays throughout the package; the
helpers here validate them (finite entries only) and provide the few
primitives everything else is built on. Randomness always flows through a
`numpy.random.Generator` created by :func:`make_rng`, which pins the bit
generator to PCG64 so a seed reproduces the same stream in every run of a
given release.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

__all__ = [
    "as_matrix",
    "frobenius_norm_sq",
    "make_rng",
    "add_awgn",
    "random_gaussian",
    "read_matrix_csv",
    "write_matrix_csv",
]

_SEED_MASK = (1 << 64) - 1


def as_matrix(data) -> np.ndarray:
    """Coerce *data* to a validated 2-D float64 array.

    Rejects anything that is not two-dimensional with at least one row and
    column, and anything containing NaN or infinities.
    """
    m = np.asarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


def frobenius_norm_sq(m) -> float:
    """Sum of squared entries, i.e. the squared Frobenius norm."""
    m = np.asarray(m, dtype=np.float64)
    return float(np.sum(m * m))


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; the single entry point for randomness.

    Seeds are taken modulo 2**64 so negative CLI seeds are accepted.
    """
    return np.random.Generator(np.random.PCG64(int(seed) & _SEED_MASK))


def rng_from_key(seed: int, *key: int) -> np.random.Generator:
    """Generator derived from a base seed and an integer key tuple.

    Used by the parallel harnesses: each work cell gets an independent
    stream identified by its key, so results never depend on scheduling
    order or worker count.
    """
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(ss))


def add_awgn(m, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Return ``m`` plus i.i.d. zero-mean Gaussian noise of std *sigma*."""
    m = as_matrix(m)
    if not np.isfinite(sigma) or sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return m.copy()
    return m + rng.normal(0.0, sigma, size=m.shape)


def random_gaussian(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Matrix with i.i.d. standard-normal entries."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be >= 1, got ({rows}, {cols})")
    return rng.standard_normal((rows, cols))


def atomic_write_bytes(path, payload: bytes) -> None:
    """Write *payload* to *path* via a temp file + rename.

    Guarantees no partial file is left behind if the write fails.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_matrix_csv(m, path) -> None:
    """Write a matrix as plain CSV: one row per line, no header.

    Entries are rendered with ``repr`` so the decimal text round-trips to
    the identical float64 values.
    """
    m = as_matrix(m)
    lines = [",".join(repr(v) for v in row) for row in m.tolist()]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_matrix_csv(path) -> np.ndarray:
    """Parse a headerless CSV matrix; accepts scientific notation."""
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}: bad number on line {ln}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows (expected width {width})")
    return as_matrix(rows)
