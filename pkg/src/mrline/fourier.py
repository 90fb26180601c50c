"""Centered unitary 1D Fourier transforms and coil combination.

Conventions used throughout the package:

- Complex tensors are numpy arrays of shape ``(M, N, J)`` holding k-space or
  hybrid/spatial data: ``M`` frequency-encoding (FE) rows, ``N``
  phase-encoding (PE) columns, ``J`` coils. Rows are the unit of
  reconstruction, stored row-major so ``t[m]`` is a contiguous ``(N, J)``
  slice.
- A hybrid row is a ``(N, J)`` complex array.
- All transforms are unitary ("ortho" normalization) and store the DC bin at
  the center index ``size // 2``; the shift is applied around the transform so
  stored k-space is always center-DC.
"""

from __future__ import annotations

import numpy as np


def validate_tensor3(t: np.ndarray) -> np.ndarray:
    """Check that ``t`` is a complex (M, N, J) tensor and return it as complex128."""
    t = np.asarray(t)
    if t.ndim != 3:
        raise ValueError(f"expected a 3-d (M, N, J) tensor, got ndim={t.ndim}")
    if min(t.shape) < 1:
        raise ValueError(f"tensor dims must all be >= 1, got {t.shape}")
    return np.ascontiguousarray(t, dtype=np.complex128)


def validate_row(row: np.ndarray) -> np.ndarray:
    """Check that ``row`` is a complex (N, J) hybrid row and return it as complex128."""
    row = np.asarray(row)
    if row.ndim != 2:
        raise ValueError(f"expected a 2-d (N, J) row, got ndim={row.ndim}")
    return np.ascontiguousarray(row, dtype=np.complex128)


def _centered_fft(x: np.ndarray, axis: int) -> np.ndarray:
    shifted = np.fft.ifftshift(x, axes=axis)
    out = np.fft.fft(shifted, axis=axis, norm="ortho")
    return np.fft.fftshift(out, axes=axis)


def _centered_ifft(x: np.ndarray, axis: int) -> np.ndarray:
    shifted = np.fft.ifftshift(x, axes=axis)
    out = np.fft.ifft(shifted, axis=axis, norm="ortho")
    return np.fft.fftshift(out, axes=axis)


def fft_fe(t: np.ndarray) -> np.ndarray:
    """Unitary centered DFT along the FE axis (axis 0) of an (M, N, J) tensor."""
    return _centered_fft(validate_tensor3(t), axis=0)


def ifft_fe(t: np.ndarray) -> np.ndarray:
    """Unitary centered inverse DFT along the FE axis of an (M, N, J) tensor.

    Applied to center-DC k-space this yields the hybrid tensor: spatial along
    FE, still spectral along PE, with rows decoupled.
    """
    return _centered_ifft(validate_tensor3(t), axis=0)


def fft_pe(row: np.ndarray) -> np.ndarray:
    """Unitary centered DFT along PE of an (N, J) row (spatial -> hybrid)."""
    return _centered_fft(validate_row(row), axis=0)


def ifft_pe(row: np.ndarray) -> np.ndarray:
    """Unitary centered inverse DFT along PE of an (N, J) row (hybrid -> spatial)."""
    return _centered_ifft(validate_row(row), axis=0)


def fft_pe_tensor(t: np.ndarray) -> np.ndarray:
    """``fft_pe`` applied to every FE row of an (M, N, J) tensor."""
    return _centered_fft(validate_tensor3(t), axis=1)


def ifft_pe_tensor(t: np.ndarray) -> np.ndarray:
    """``ifft_pe`` applied to every FE row of an (M, N, J) tensor."""
    return _centered_ifft(validate_tensor3(t), axis=1)


def sos_combine(img: np.ndarray) -> np.ndarray:
    """Square-root-of-sum-of-squares coil combination.

    Collapses the coil axis of an (M, N, J) tensor to a real nonnegative
    (M, N) magnitude image: ``out[m, n] = sqrt(sum_j |img[m, n, j]|^2)``.
    """
    img = validate_tensor3(img)
    return np.sqrt(np.sum(np.abs(img) ** 2, axis=2))
