"""Cascaded Hankel lifting and the reweighted low-rank machinery.

A length-``n`` coil signal lifts to a ``g x b`` Hankel block (``g = n - b + 1``
pencil rows, ``b`` filter-length columns); the per-coil blocks cascade
horizontally into a ``g x b*j`` matrix whose low rank encodes the compact
k-space support of the coil sensitivities. The weighted Frobenius surrogate
of the nuclear norm needs the Gram matrix of the lift and an inverse-square-
root weight, both provided here, together with the exact adjoint of the lift
and the convolution (Toeplitz) form of its action on a filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import validate_row


@dataclass(frozen=True)
class HankelConfig:
    """Shape and reweighting parameters for the lifted low-rank term.

    ``b`` is the filter length (columns per coil block); the pencil row count
    ``g = n - b + 1`` is derived. The epsilon schedule is relative: at
    iteration k the weight uses ``eps = max(eps0 * decay^k, eps_min) * lam_ref``
    where ``lam_ref`` is the largest Gram eigenvalue of the initial iterate.
    """

    n: int
    j: int
    b: int = 16
    eps0: float = 1e-2
    eps_decay: float = 0.9
    eps_min: float = 1e-9

    def __post_init__(self):
        if not 1 <= self.b < self.n:
            raise ValueError(f"need 1 <= b < n, got b={self.b}, n={self.n}")
        if self.b > (self.n + 1) / 2:
            raise ValueError(f"need b <= (n+1)/2 so g >= b, got b={self.b}, n={self.n}")
        if self.j < 1:
            raise ValueError(f"need at least one coil, got j={self.j}")
        if self.eps0 <= 0 or not 0 < self.eps_decay <= 1 or not 0 < self.eps_min <= self.eps0:
            raise ValueError("need eps0 > 0, 0 < eps_decay <= 1, 0 < eps_min <= eps0")

    @property
    def g(self) -> int:
        return self.n - self.b + 1

    @property
    def bj(self) -> int:
        return self.b * self.j

    def eps_at(self, k: int, lam_ref: float) -> float:
        """Scheduled epsilon for (1-based) iteration ``k``."""
        return max(self.eps0 * self.eps_decay**k, self.eps_min) * lam_ref


def _check_row(e: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    e = validate_row(e)
    if e.shape != (cfg.n, cfg.j):
        raise ValueError(f"row shape {e.shape} does not match config ({cfg.n}, {cfg.j})")
    return e


def _lift(e: np.ndarray, b: int) -> np.ndarray:
    """Hot-path lift of a C-contiguous complex128 (n, j) row; no validation."""
    n, j = e.shape
    g = n - b + 1
    s0, s1 = e.strides
    # windows[p, jj, q] = e[p + q, jj]; the C reshape of (jj, q) yields the
    # [block 1 | ... | block J] column order.
    windows = np.lib.stride_tricks.as_strided(e, shape=(g, j, b), strides=(s0, s1, s0))
    return windows.reshape(g, j * b)


def _adjoint(h: np.ndarray, n: int, b: int, j: int) -> np.ndarray:
    """Hot-path antidiagonal-sum adjoint of ``_lift``; no validation."""
    g = n - b + 1
    h3 = h.reshape(g, j, b)
    out = np.zeros((n, j), dtype=np.complex128)
    for q in range(b):
        out[q : q + g] += h3[:, :, q]
    return out


def hankel_lift(e: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Lift an (n, j) row to the g x b*j cascaded Hankel matrix.

    Within coil block j, entry (p, q) is ``e[p + q, j]``.
    """
    return _lift(_check_row(e, cfg), cfg.b)


def hankel_adjoint(h: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Exact adjoint of :func:`hankel_lift`.

    Sums each coil block over its antidiagonals (no averaging):
    ``out[k, j] = sum_{p+q=k} h[p, q_j]``.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (cfg.g, cfg.bj):
        raise ValueError(f"matrix shape {h.shape} does not match config ({cfg.g}, {cfg.bj})")
    return _adjoint(np.ascontiguousarray(h), cfg.n, cfg.b, cfg.j)


def toeplitz_apply(q: np.ndarray, e: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Apply the cascaded-Toeplitz form of a length-``b*j`` filter to a row.

    Computes ``out[p] = sum_j sum_{t<b} e[p+t, j] * q[j*b + t]`` by valid-mode
    convolution per coil; by commutativity of convolution this equals
    ``hankel_lift(e) @ q``.
    """
    q = np.asarray(q, dtype=np.complex128)
    if q.shape != (cfg.bj,):
        raise ValueError(f"filter length {q.shape} does not match b*j = {cfg.bj}")
    e = _check_row(e, cfg)
    out = np.zeros(cfg.g, dtype=np.complex128)
    for j in range(cfg.j):
        qj = q[j * cfg.b : (j + 1) * cfg.b]
        out += np.convolve(e[:, j], qj[::-1], mode="valid")
    return out


def gram(e: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Gram matrix of the lift: ``hankel_lift(e)^H @ hankel_lift(e)`` (Hermitian PSD)."""
    h = hankel_lift(e, cfg)
    return h.conj().T @ h


def _weight(a: np.ndarray, eps: float) -> np.ndarray:
    """Hot-path inverse square root of an internally built Gram; no checks."""
    lam, v = np.linalg.eigh(a)
    np.maximum(lam, 0.0, out=lam)
    w = (v * (lam + eps) ** -0.5) @ v.conj().T
    return 0.5 * (w + w.conj().T)


def weight_update(a: np.ndarray, eps: float) -> np.ndarray:
    """Inverse-square-root reweighting: ``W = (A + eps*I)^(-1/2)``.

    ``A`` must be Hermitian PSD. Computed by Hermitian eigendecomposition with
    the eigenvalue map ``lam -> (lam + eps)^(-1/2)``, negative numerical
    eigenvalues clamped to 0 first. The result is Hermitian positive definite
    and satisfies ``W (A + eps I) W = I`` to about 1e-8 relative for
    reasonably conditioned inputs.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    scale = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > 1e-8 * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return _weight(a, eps)


def weight_sqrt(w: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD weight (recovers Q from W = Q Q^H)."""
    lam, v = np.linalg.eigh(np.asarray(w, dtype=np.complex128))
    lam = np.maximum(lam, 0.0)
    q = (v * np.sqrt(lam)) @ v.conj().T
    return 0.5 * (q + q.conj().T)


def lowrank_grad(e: np.ndarray, w: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Gradient of ``0.5 * || hankel_lift(e) Q ||_F^2`` with ``W = Q Q^H``.

    Evaluates ``hankel_adjoint(hankel_lift(e) @ W)``; as an operator on rows
    this is linear, self-adjoint and PSD.
    """
    w = np.asarray(w, dtype=np.complex128)
    if w.shape != (cfg.bj, cfg.bj):
        raise ValueError(f"weight shape {w.shape} does not match ({cfg.bj}, {cfg.bj})")
    h = _lift(_check_row(e, cfg), cfg.b)
    return _adjoint(h @ w, cfg.n, cfg.b, cfg.j)
