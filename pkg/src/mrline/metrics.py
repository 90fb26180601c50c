"""Image-quality metrics on real magnitude images.

All three metrics operate on SOS-combined magnitude images of matching shape.
SSIM is the global-statistics form (whole-image means/variances, no sliding
window) with the conventional 0.01/0.03 stabilizers scaled by the reference
maximum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsReport:
    rlne: float
    psnr_db: float
    ssim: float

    def to_json(self) -> str:
        # >= 15 significant digits; +inf serializes as the literal Infinity.
        def fmt(x: float) -> str:
            if not math.isfinite(x):
                return json.dumps(x)
            s = f"{x:.17g}"
            return s if any(ch in s for ch in ".eE") else s + ".0"

        parts = (
            f'"rlne": {fmt(self.rlne)}',
            f'"psnr_db": {fmt(self.psnr_db)}',
            f'"ssim": {fmt(self.ssim)}',
        )
        return "{" + ", ".join(parts) + "}"


def _check_pair(x: np.ndarray, xhat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {xhat.shape}")
    return x, xhat


def rlne(x: np.ndarray, xhat: np.ndarray) -> float:
    """Relative l2 norm error ``||x - xhat|| / ||x||``."""
    x, xhat = _check_pair(x, xhat)
    ref = np.linalg.norm(x)
    if ref == 0:
        raise ValueError("reference image has zero norm")
    return float(np.linalg.norm(x - xhat) / ref)


def psnr(x: np.ndarray, xhat: np.ndarray, squared: bool = True) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the images are identical.

    The standard form is ``10 log10(M*N*max(|x|)^2 / ||x - xhat||^2)``.
    ``squared=False`` computes the unsquared ratio
    ``10 log10(M*N*max(|x|) / ||x - xhat||)`` for audit against sources that
    print it that way.
    """
    x, xhat = _check_pair(x, xhat)
    err = float(np.linalg.norm(x - xhat))
    if err == 0:
        return math.inf
    peak = float(np.max(np.abs(x)))
    count = x.size
    if squared:
        return 10.0 * math.log10(count * peak**2 / err**2)
    return 10.0 * math.log10(count * peak / err)


def ssim(x: np.ndarray, xhat: np.ndarray) -> float:
    """Global structural similarity with population statistics.

    Stabilizers are ``C1 = (0.01 L)^2``, ``C2 = (0.03 L)^2`` with
    ``L = max(x)``. Degenerate case (both constants zero and both images
    constant) returns 1.0 when the images are identical.
    """
    x, xhat = _check_pair(x, xhat)
    mu_x = float(x.mean())
    mu_y = float(xhat.mean())
    var_x = float(((x - mu_x) ** 2).mean())
    var_y = float(((xhat - mu_y) ** 2).mean())
    cov = float(((x - mu_x) * (xhat - mu_y)).mean())
    peak = float(np.max(x))
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    if den == 0:
        return 1.0 if np.array_equal(x, xhat) else 0.0
    return float(num / den)


def evaluate(x: np.ndarray, xhat: np.ndarray) -> MetricsReport:
    """All three metrics of a reconstructed magnitude image against a reference."""
    return MetricsReport(rlne=rlne(x, xhat), psnr_db=psnr(x, xhat), ssim=ssim(x, xhat))
