"""Dense matrix substrate for the spectral optimizers.

Everything here is a pure function of its inputs: matrices are float64
numpy arrays, never mutated in place, so values are safe to share across
threads. The module provides the Frobenius inner product, a deterministic
thin/truncated SVD (exact LAPACK below a size threshold, randomized
range finder above it), and the cubic Newton-Schulz polar iteration used
for orthogonalized updates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidArgumentError,
    NonFiniteDataError,
    ShapeMismatchError,
    SpectralStabilityError,
)

# Orthonormality tolerance for singular factors.
ORTHO_TOL = 1e-10
# Relative gap below which two singular values count as tied.
DEGENERACY_RTOL = 1e-12
# Largest min-dimension handled by the exact LAPACK path.
DENSE_SVD_MAX_DIM = 32
# Randomized range finder parameters.
RANGE_OVERSAMPLE = 8
RANGE_POWER_ITERS = 2
# Fixed sketch seed so truncated factorizations are reproducible.
_SKETCH_SEED = 0x5EEDED

_SQRT3 = float(np.sqrt(3.0))


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array, raising on bad input."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ShapeMismatchError(f"{name} must be 2-D, got ndim={out.ndim}")
    if not np.all(np.isfinite(out)):
        raise NonFiniteDataError(f"{name} contains NaN or Inf entries")
    return out


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius inner product sum_pq a_pq * b_pq."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def frobenius_norm(a: np.ndarray) -> float:
    """Frobenius norm, sqrt of the self inner product."""
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


@dataclass(frozen=True)
class SvdFactors:
    """Retained singular triplets of a matrix.

    ``u`` is m-by-r with orthonormal columns, ``sigma`` holds the r
    singular values sorted descending, ``v`` is n-by-r with orthonormal
    columns, so the matrix is approximated by u @ diag(sigma) @ v.T.
    Orthonormality and ordering are checked on construction.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=np.float64))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=np.float64))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=np.float64))
        r = self.sigma.shape[0]
        if self.rank < 0:
            object.__setattr__(self, "rank", r)
        if self.u.ndim != 2 or self.v.ndim != 2:
            raise ShapeMismatchError("singular factors must be 2-D")
        if self.u.shape[1] != r or self.v.shape[1] != r or self.rank != r:
            raise ShapeMismatchError("inconsistent triplet count in SvdFactors")
        if r == 0:
            return
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.sigma)) and np.all(np.isfinite(self.v))):
            raise NonFiniteDataError("SvdFactors contains non-finite entries")
        # Ties may be reordered lexicographically, so allow ascent within
        # the degeneracy tolerance.
        tie_tol = DEGENERACY_RTOL * float(self.sigma.max())
        if np.any(self.sigma < 0.0) or np.any(np.diff(self.sigma) > tie_tol):
            raise InvalidArgumentError("singular values must be non-negative and descending")
        gram_u = self.u.T @ self.u
        gram_v = self.v.T @ self.v
        eye = np.eye(r)
        if np.max(np.abs(gram_u - eye)) > ORTHO_TOL or np.max(np.abs(gram_v - eye)) > ORTHO_TOL:
            raise InvalidArgumentError("singular vectors are not orthonormal within 1e-10")

    def reconstruct(self) -> np.ndarray:
        """Dense matrix u @ diag(sigma) @ v.T."""
        return (self.u * self.sigma) @ self.v.T

    def mode(self, i: int) -> np.ndarray:
        """Rank-one direction Q_i = u_i v_i^T (unit Frobenius norm)."""
        return np.outer(self.u[:, i], self.v[:, i])


def _fix_signs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Deterministic convention: largest-magnitude entry of each left
    # vector is positive; the right vector flips with it.
    u = u.copy()
    v = v.copy()
    for i in range(u.shape[1]):
        j = int(np.argmax(np.abs(u[:, i])))
        if u[j, i] < 0.0:
            u[:, i] = -u[:, i]
            v[:, i] = -v[:, i]
    return u, v


def _order_degenerate(u: np.ndarray, s: np.ndarray, v: np.ndarray):
    # Ties (relative gap <= 1e-12) get a lexicographic order on the left
    # vectors; any basis of the tied subspace is valid, this pins one.
    if s.shape[0] < 2:
        return u, s, v
    tol = DEGENERACY_RTOL * s[0]
    order = list(range(s.shape[0]))
    start = 0
    while start < len(order):
        stop = start
        while stop + 1 < len(order) and s[stop] - s[stop + 1] <= tol:
            stop += 1
        if stop > start:
            block = sorted(order[start : stop + 1], key=lambda i: tuple(u[:, i]))
            order[start : stop + 1] = block
        start = stop + 1
    idx = np.array(order)
    return u[:, idx], s[idx], v[:, idx]


def _dense_svd(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u, s, vt = np.linalg.svd(g, full_matrices=False)
    return u, s, vt.T


def _randomized_svd(g: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Range finder with fixed oversampling and power iterations, then a
    # small dense SVD on the projected block.
    m, n = g.shape
    sketch = k + RANGE_OVERSAMPLE
    rng = np.random.default_rng(_SKETCH_SEED)
    omega = rng.standard_normal((n, sketch))
    q, _ = np.linalg.qr(g @ omega)
    for _ in range(RANGE_POWER_ITERS):
        z, _ = np.linalg.qr(g.T @ q)
        q, _ = np.linalg.qr(g @ z)
    b = q.T @ g
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    return q @ ub, s, vt.T


def thin_svd(g: np.ndarray, k: int) -> SvdFactors:
    """Top-k singular triplets of ``g`` with deterministic factors.

    Exact LAPACK SVD when min(rows, cols) <= 32, otherwise a randomized
    range finder (oversampling 8, two power iterations) followed by a
    small dense SVD. Triplets with exactly zero singular value are
    dropped, so the returned rank can be below ``k``.
    """
    g = as_matrix(g, "svd input")
    min_dim = min(g.shape)
    if k < 0 or k > min_dim:
        raise InvalidArgumentError(f"rank budget k={k} outside [0, {min_dim}]")
    if k == 0:
        return SvdFactors(np.zeros((g.shape[0], 0)), np.zeros(0), np.zeros((g.shape[1], 0)))
    if min_dim <= DENSE_SVD_MAX_DIM or k + RANGE_OVERSAMPLE >= min_dim:
        u, s, v = _dense_svd(g)
    else:
        u, s, v = _randomized_svd(g, k)
    u, s, v = u[:, :k], s[:k], v[:, :k]
    keep = s > 0.0
    u, s, v = u[:, keep], s[keep], v[:, keep]
    u, v = _fix_signs(u, v)
    u, s, v = _order_degenerate(u, s, v)
    return SvdFactors(u, s, v)


def newton_schulz_orthogonalize(x: np.ndarray, iters: int = 5) -> np.ndarray:
    """Drive the singular values of ``x`` toward 1, keeping its singular vectors.

    Applies the cubic fixed-point map X <- 1.5 X - 0.5 X X^T X, which acts
    on each singular value as s <- 1.5 s - 0.5 s^3. Convergence needs the
    spectral norm below sqrt(3); callers normalize by the Frobenius norm
    first, and the (conservative) Frobenius bound is enforced here.
    """
    x = as_matrix(x, "newton-schulz input")
    if frobenius_norm(x) >= _SQRT3:
        raise SpectralStabilityError(
            "Frobenius norm >= sqrt(3); normalize the input before orthogonalizing"
        )
    tall = x.shape[0] >= x.shape[1]
    for _ in range(iters):
        if tall:
            x = 1.5 * x - 0.5 * (x @ (x.T @ x))
        else:
            x = 1.5 * x - 0.5 * ((x @ x.T) @ x)
    return x


def rank_one_accumulate(acc: np.ndarray, coeff: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Return acc + coeff * u v^T without mutating ``acc``."""
    acc = as_matrix(acc, "accumulator")
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if u.shape[0] != acc.shape[0] or v.shape[0] != acc.shape[1]:
        raise ShapeMismatchError(
            f"outer product {u.shape[0]}x{v.shape[0]} does not match accumulator {acc.shape}"
        )
    return acc + coeff * np.outer(u, v)
