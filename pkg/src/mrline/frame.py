"""Undecimated Haar tight frame and the soft-threshold prox.

The analysis operator is an a-trous cascade of the circular filter pair
h0 = [1, 1]/2, h1 = [1, -1]/2 dilated by 2^(level-1). The pair satisfies
|H0(w)|^2 + |H1(w)|^2 = 1 at every frequency, so the adjoint composed with
the analysis is exactly the identity (a tight frame), which is what lets the
prox step synthesize without inversion.

Coefficients are stored as a single (levels + 1, N, J) complex array: bands
[0 .. levels-1] are the high-pass outputs from finest to coarsest and band
[levels] is the final low-pass.
"""

from __future__ import annotations

import numpy as np

from .fourier import validate_row


def _split(low: np.ndarray, dilation: int) -> tuple[np.ndarray, np.ndarray]:
    shifted = np.roll(low, -dilation, axis=0)
    return 0.5 * (low + shifted), 0.5 * (low - shifted)


def _merge(low: np.ndarray, high: np.ndarray, dilation: int) -> np.ndarray:
    # Adjoint of _split: shift the other way before combining.
    return 0.5 * (low + np.roll(low, dilation, axis=0) + high - np.roll(high, dilation, axis=0))


def _check_levels(n: int, levels: int) -> None:
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if n < 2**levels:
        raise ValueError(f"levels={levels} too large for N={n} (need N >= 2^levels)")


def frame_forward(x: np.ndarray, levels: int) -> np.ndarray:
    """Analyze a spatial (N, J) row into (levels + 1, N, J) frame coefficients."""
    x = validate_row(x)
    _check_levels(x.shape[0], levels)
    coeffs = np.empty((levels + 1,) + x.shape, dtype=np.complex128)
    low = x
    for lev in range(levels):
        low, coeffs[lev] = _split(low, 2**lev)
    coeffs[levels] = low
    return coeffs


def frame_adjoint(c: np.ndarray) -> np.ndarray:
    """Exact adjoint of :func:`frame_forward`; synthesizes coefficients back to a row.

    Because the frame is tight, ``frame_adjoint(frame_forward(x)) == x``.
    """
    c = np.asarray(c, dtype=np.complex128)
    if c.ndim != 3 or c.shape[0] < 2:
        raise ValueError(f"expected (levels + 1, N, J) coefficients, got {c.shape}")
    levels = c.shape[0] - 1
    _check_levels(c.shape[1], levels)
    acc = c[levels]
    for lev in reversed(range(levels)):
        acc = _merge(acc, c[lev], 2**lev)
    return acc


def soft_threshold(x: np.ndarray, rho: float) -> np.ndarray:
    """Complex magnitude shrinkage: ``max(|x| - rho, 0) * x / |x|`` (0 at x = 0)."""
    if rho < 0:
        raise ValueError(f"threshold must be >= 0, got {rho}")
    x = np.asarray(x, dtype=np.complex128)
    mag = np.abs(x)
    shrunk = np.maximum(mag - rho, 0.0)
    return x * (shrunk / np.where(mag > 0, mag, 1.0))
