"""1D phase-encoding undersampling masks.

A mask selects whole PE lines. Applying it zeroes the dropped lines, which
makes it a self-adjoint orthogonal projection: adjoint == forward and
applying twice equals applying once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fourier import validate_row


@dataclass(frozen=True)
class SamplingMask:
    """Boolean PE-line selector.

    ``sampled[i]`` is True when line ``i`` was acquired. ``seed`` records the
    generator seed for provenance (0 for deterministic patterns).
    """

    n: int
    sampled: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        sampled = np.asarray(self.sampled, dtype=bool)
        if sampled.shape != (self.n,):
            raise ValueError(f"sampled must have shape ({self.n},), got {sampled.shape}")
        if not sampled.any():
            raise ValueError("mask must sample at least one line")
        sampled.setflags(write=False)
        object.__setattr__(self, "sampled", sampled)

    @property
    def n_sampled(self) -> int:
        return int(self.sampled.sum())

    def af(self) -> float:
        return self.n / self.n_sampled

    def indices(self) -> np.ndarray:
        """Sampled line indices, ascending."""
        return np.flatnonzero(self.sampled)

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "sampled": [int(i) for i in self.indices()], "seed": self.seed}
        )

    @classmethod
    def from_json(cls, text: str) -> "SamplingMask":
        obj = json.loads(text)
        n = int(obj["n"])
        sampled = np.zeros(n, dtype=bool)
        idx = np.asarray(obj["sampled"], dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("sampled indices out of range")
        sampled[idx] = True
        return cls(n=n, sampled=sampled, seed=int(obj.get("seed", 0)))


def _center_block(n: int, count: int) -> np.ndarray:
    """Indices of ``count`` contiguous lines around the DC line ``n // 2``."""
    start = n // 2 - count // 2
    return np.arange(start, start + count)


def gen_cartesian(n: int, af: float, center_fraction: float = 0.08, seed: int = 0) -> SamplingMask:
    """Random Cartesian mask: fully sampled center block, uniform-random rest.

    Exactly ``round(n / af)`` lines are sampled: ``ceil(center_fraction * n)``
    contiguous center lines always, the rest drawn without replacement from
    the remaining lines, deterministically from ``seed``.
    """
    return _random_pe_mask(n, af, center_fraction, seed, fraction=1.0)


def gen_partial_fourier(
    n: int, fraction: float, af: float, center_fraction: float = 0.08, seed: int = 0
) -> SamplingMask:
    """Partial-Fourier mask: candidate lines restricted to ``[0, ceil(fraction*n))``.

    Within the candidate region the center-plus-random policy of
    :func:`gen_cartesian` applies, so the total stays ``round(n / af)``;
    lines at or beyond the cutoff are never sampled. ``fraction=1`` reduces
    to ``gen_cartesian`` with the same arguments, bit for bit.
    """
    if not 0.5 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0.5, 1], got {fraction}")
    return _random_pe_mask(n, af, center_fraction, seed, fraction=fraction)


def _random_pe_mask(n: int, af: float, center_fraction: float, seed: int, fraction: float) -> SamplingMask:
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    if not 1.0 <= af <= n:
        raise ValueError(f"af must be in [1, n], got {af}")
    if not 0.0 <= center_fraction < 1.0:
        raise ValueError(f"center_fraction must be in [0, 1), got {center_fraction}")

    cutoff = int(np.ceil(fraction * n))
    budget = int(round(n / af))
    if budget > cutoff:
        raise ValueError(f"af infeasible for fraction: {budget} lines needed, {cutoff} candidates")

    n_center = int(np.ceil(center_fraction * n))
    center = _center_block(n, n_center)
    center = center[center < cutoff]
    if center.size > budget:
        raise ValueError(f"center exceeds budget: {center.size} center lines, budget {budget}")

    sampled = np.zeros(n, dtype=bool)
    sampled[center] = True
    rest = np.flatnonzero(~sampled[:cutoff])
    rng = np.random.default_rng(seed)
    extra = rng.choice(rest, size=budget - center.size, replace=False)
    sampled[extra] = True
    return SamplingMask(n=n, sampled=sampled, seed=seed)


def gen_uniform(n: int, af: int, acs: int = 0) -> SamplingMask:
    """Uniform mask: every ``af``-th line from 0, plus ``acs`` contiguous center lines."""
    if af < 1 or af > n:
        raise ValueError(f"af must be in [1, n], got {af}")
    if acs < 0:
        raise ValueError(f"acs must be >= 0, got {acs}")
    sampled = np.zeros(n, dtype=bool)
    sampled[::af] = True
    sampled[_center_block(n, min(acs, n))] = True
    return SamplingMask(n=n, sampled=sampled, seed=0)


def apply_mask(row: np.ndarray, mask: SamplingMask) -> np.ndarray:
    """Zero the coil values of every unsampled PE line of an (N, J) row."""
    row = validate_row(row)
    if row.shape[0] != mask.n:
        raise ValueError(f"row has {row.shape[0]} PE lines, mask expects {mask.n}")
    return row * mask.sampled[:, None]


# The mask is a diagonal 0/1 projection, so it is its own adjoint.
adjoint_mask = apply_mask


def apply_mask_tensor(t: np.ndarray, mask: SamplingMask) -> np.ndarray:
    """Zero unsampled PE lines of an (M, N, J) tensor (all FE rows, all coils)."""
    t = np.asarray(t)
    if t.ndim != 3 or t.shape[1] != mask.n:
        raise ValueError(f"tensor PE size {t.shape} does not match mask n={mask.n}")
    return t * mask.sampled[None, :, None]


def af_of(mask: SamplingMask) -> float:
    """Acceleration factor: total lines over acquired lines."""
    return mask.af()
