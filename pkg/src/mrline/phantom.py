"""Synthetic multi-coil test data with exactly compact-support sensitivities.

The coil sensitivities are drawn directly in k-space on a centered s x s
block, so the lifted Hankel rank deficiency the solver relies on holds by
construction, not approximately. The pointwise SOS normalization folds into
the underlying image (coil image = (image / rho) * raw_sensitivity), which
leaves the compact support of the per-coil modulation untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import fft_fe, fft_pe_tensor, validate_tensor3


@dataclass(frozen=True)
class PhantomSpec:
    m: int = 64
    n: int = 64
    j: int = 4
    sens_support: int = 5
    n_shapes: int = 6
    seed: int = 0

    def __post_init__(self):
        s = self.sens_support
        if not 1 <= s <= min(self.m, self.n):
            raise ValueError(f"sens_support must be in [1, min(m, n)], got {s}")
        if s % 2 == 0:
            raise ValueError(f"sens_support must be odd, got {s}")
        if min(self.m, self.n, self.j) < 1 or self.n_shapes < 1:
            raise ValueError("m, n, j, n_shapes must all be >= 1")


def _piecewise_image(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    """Additive superposition of random axis-aligned ellipses and rectangles.

    Half-axes are kept small relative to the image so the phantom carries
    fine structure across the PE axis; coarse blobs make undersampling
    artifacts too mild to discriminate reconstruction quality.
    """
    m, n = spec.m, spec.n
    yy, xx = np.meshgrid(np.arange(n), np.arange(m))
    img = np.zeros((m, n))
    for _ in range(spec.n_shapes):
        cx = rng.uniform(0.2, 0.8) * m
        cy = rng.uniform(0.2, 0.8) * n
        rx = max(rng.uniform(0.04, 0.15) * m, 1.0)
        ry = max(rng.uniform(0.04, 0.15) * n, 1.0)
        value = rng.uniform(0.2, 1.0)
        if rng.random() < 0.5:
            inside = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
        else:
            inside = (np.abs(xx - cx) <= rx) & (np.abs(yy - cy) <= ry)
        img[inside] += value
    return img


def _smooth_phase(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    """Low-order random Fourier phase surface, bounded by ~pi."""
    m, n = spec.m, spec.n
    yy, xx = np.meshgrid(np.arange(n) / n, np.arange(m) / m)
    phase = np.zeros((m, n))
    for p in range(-2, 3):
        for q in range(-2, 3):
            amp = rng.normal() / (1.0 + abs(p) + abs(q))
            shift = rng.uniform(0, 2 * np.pi)
            phase += amp * np.cos(2 * np.pi * (p * xx + q * yy) + shift)
    peak = np.max(np.abs(phase))
    if peak > 0:
        phase *= np.pi / (2 * peak)
    return phase


def _sensitivities(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    """Raw (un-normalized) sensitivities with centered s x s k-space support."""
    m, n, j, s = spec.m, spec.n, spec.j, spec.sens_support
    kspace = np.zeros((m, n, j), dtype=np.complex128)
    block = rng.normal(size=(s, s, j)) + 1j * rng.normal(size=(s, s, j))
    r0 = m // 2 - s // 2
    c0 = n // 2 - s // 2
    kspace[r0 : r0 + s, c0 : c0 + s, :] = block
    # Centered unitary inverse DFT along both axes.
    shifted = np.fft.ifftshift(kspace, axes=(0, 1))
    img = np.fft.ifft2(shifted, axes=(0, 1), norm="ortho")
    return np.fft.fftshift(img, axes=(0, 1))


def gen_phantom(spec: PhantomSpec) -> tuple[np.ndarray, np.ndarray]:
    """Generate (coil images, fully sampled k-space), both (M, N, J) complex.

    The SOS of the normalized sensitivities is 1 at every pixel, so the SOS
    of the returned coil images equals the piecewise-constant magnitude
    image. Deterministic in ``spec.seed``.
    """
    rng = np.random.default_rng(spec.seed)
    image = _piecewise_image(spec, rng) * np.exp(1j * _smooth_phase(spec, rng))
    raw = _sensitivities(spec, rng)
    rho = np.sqrt(np.sum(np.abs(raw) ** 2, axis=2))
    if np.min(rho) <= 0:
        raise RuntimeError("degenerate sensitivity draw (zero SOS); change the seed")
    sens = raw / rho[:, :, None]
    truth = image[:, :, None] * sens
    kspace = fft_fe(fft_pe_tensor(truth))
    return validate_tensor3(truth), kspace
