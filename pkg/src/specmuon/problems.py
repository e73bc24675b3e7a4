"""Benchmark objectives over matrix-shaped parameters.

Every problem exposes the same interface: ``init(rng)`` draws a list of
float64 parameter blocks, ``loss(params)`` returns a scalar, and
``grad(params)`` returns one gradient matrix per block. Single-matrix
problems use a one-element list so optimizers can treat all problems
uniformly. Instance data (design matrix, targets) is drawn from a
generator seeded in the constructor, so two instances built with the
same arguments are bitwise identical.
"""
from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np

from .errors import ConfigError, InvalidArgumentError, ShapeMismatchError


@runtime_checkable
class MatrixProblem(Protocol):
    """Minimal contract shared by all benchmark objectives."""

    name: str
    fstar: float | None
    param_shapes: list[tuple[int, int]]

    def init(self, rng: np.random.Generator) -> list[np.ndarray]: ...

    def loss(self, params: list[np.ndarray]) -> float: ...

    def grad(self, params: list[np.ndarray]) -> list[np.ndarray]: ...

    def config(self) -> dict: ...


def _check_blocks(params, shapes):
    if len(params) != len(shapes):
        raise ShapeMismatchError(f"expected {len(shapes)} parameter blocks, got {len(params)}")
    out = []
    for p, s in zip(params, shapes):
        p = np.asarray(p, dtype=np.float64)
        if p.shape != s:
            raise ShapeMismatchError(f"block shape {p.shape} does not match {s}")
        out.append(p)
    return out


class LeastSquaresInstance:
    """Matrix regression f(W) = 0.5 * ||W X - Y||_F^2.

    The design matrix X is n-by-N with singular values log-spaced so
    that cond(X X^T) equals ``cond`` exactly. Targets are W_true X plus
    Gaussian noise of scale ``noise``. The optimal value ``fstar`` is
    computed once from the normal equations.
    """

    name = "least-squares"

    def __init__(self, seed: int = 0, m: int = 8, n: int = 12, n_samples: int = 64,
                 cond: float = 100.0, noise: float = 0.01):
        if n_samples < n:
            raise InvalidArgumentError("need at least n samples for a full-rank design")
        if cond < 1.0:
            raise InvalidArgumentError("condition number must be >= 1")
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((n, n_samples))
        u, _, vt = np.linalg.svd(raw, full_matrices=False)
        # Replace the spectrum: cond(X X^T) = (s_max / s_min)^2.
        s = np.sqrt(cond) ** np.linspace(1.0, 0.0, n)
        self.x = (u * s) @ vt
        self.w_true = rng.standard_normal((m, n))
        self.y = self.w_true @ self.x + noise * rng.standard_normal((m, n_samples))
        self.m, self.n, self.n_samples = m, n, n_samples
        # Curvature of the quadratic: hessian eigenvalues are those of X X^T.
        self.lipschitz = float(s[0] ** 2)
        self.pl_mu = float(s[-1] ** 2)
        wt_opt, *_ = np.linalg.lstsq(self.x.T, self.y.T, rcond=None)
        self.w_opt = wt_opt.T
        self.fstar = 0.5 * float(np.linalg.norm(self.w_opt @ self.x - self.y) ** 2)
        self.param_shapes = [(m, n)]
        self._cfg = {"name": self.name, "seed": seed, "m": m, "n": n,
                     "n_samples": n_samples, "cond": cond, "noise": noise}

    def config(self) -> dict:
        return dict(self._cfg)

    def init(self, rng: np.random.Generator) -> list[np.ndarray]:
        return [rng.standard_normal((self.m, self.n))]

    def loss(self, params) -> float:
        (w,) = _check_blocks(params, self.param_shapes)
        return 0.5 * float(np.linalg.norm(w @ self.x - self.y) ** 2)

    def grad(self, params) -> list[np.ndarray]:
        (w,) = _check_blocks(params, self.param_shapes)
        return [(w @ self.x - self.y) @ self.x.T]


class SpectrumQuadratic:
    """Diagonal quadratic f(w) = 0.5 * sum_i lam_i * w_i^2 on a d-by-1 block.

    The minimum is zero at the origin, so the gradient-dominance
    constants are exact: L = max(lam), mu = min(lam).
    """

    name = "spectrum-quadratic"
    fstar = 0.0

    def __init__(self, lambdas):
        lam = np.asarray(lambdas, dtype=np.float64).reshape(-1)
        if lam.size == 0 or np.any(lam <= 0.0):
            raise InvalidArgumentError("spectrum must be non-empty and positive")
        self.lam = lam
        self.d = lam.size
        self.lipschitz = float(lam.max())
        self.pl_mu = float(lam.min())
        self.param_shapes = [(self.d, 1)]

    def config(self) -> dict:
        return {"name": self.name, "lambdas": [float(x) for x in self.lam]}

    @classmethod
    def log_spaced(cls, d: int = 50, lam_min: float = 1e-2, lam_max: float = 1.0):
        return cls(np.logspace(np.log10(lam_min), np.log10(lam_max), d))

    def init(self, rng: np.random.Generator) -> list[np.ndarray]:
        return [rng.standard_normal((self.d, 1))]

    def loss(self, params) -> float:
        (w,) = _check_blocks(params, self.param_shapes)
        return 0.5 * float(np.sum(self.lam[:, None] * w * w))

    def grad(self, params) -> list[np.ndarray]:
        (w,) = _check_blocks(params, self.param_shapes)
        return [self.lam[:, None] * w]


class SmallMlpRegression:
    """Two-block tanh network fit to y = -sin(pi x) on equispaced points.

    The net is x -> W2 tanh(W1 x) with hidden width ``hidden``; no
    biases, which loses nothing here because the target is odd and the
    bias-free net is odd too. Loss is the mean squared error over the
    collocation points. Gradients are hand-derived backprop.
    """

    name = "small-mlp"
    fstar = None

    def __init__(self, hidden: int = 16, n_samples: int = 128):
        if hidden < 1 or n_samples < 2:
            raise InvalidArgumentError("need hidden >= 1 and n_samples >= 2")
        self.hidden = hidden
        self.n_samples = n_samples
        self.x = np.linspace(-1.0, 1.0, n_samples)[None, :]
        self.y = -np.sin(np.pi * self.x)
        self.param_shapes = [(hidden, 1), (1, hidden)]

    def config(self) -> dict:
        return {"name": self.name, "hidden": self.hidden, "n_samples": self.n_samples}

    def init(self, rng: np.random.Generator) -> list[np.ndarray]:
        w1 = rng.standard_normal((self.hidden, 1))
        w2 = rng.standard_normal((1, self.hidden)) / np.sqrt(self.hidden)
        return [w1, w2]

    def _forward(self, w1, w2):
        h = np.tanh(w1 @ self.x)
        return h, w2 @ h

    def loss(self, params) -> float:
        w1, w2 = _check_blocks(params, self.param_shapes)
        _, z = self._forward(w1, w2)
        return float(np.mean((z - self.y) ** 2))

    def grad(self, params) -> list[np.ndarray]:
        w1, w2 = _check_blocks(params, self.param_shapes)
        h, z = self._forward(w1, w2)
        dz = 2.0 * (z - self.y) / self.n_samples
        g2 = dz @ h.T
        dpre = (w2.T @ dz) * (1.0 - h * h)
        g1 = dpre @ self.x.T
        return [g1, g2]


def finite_diff_grad(problem, params: list[np.ndarray], h: float = 1e-6) -> list[np.ndarray]:
    """Central-difference gradient, one objective pair per entry.

    Slow by construction; this is the oracle the analytic gradients are
    gated against in tests, not a runtime tool.
    """
    out = []
    work = [np.array(p, dtype=np.float64) for p in params]
    for b, block in enumerate(work):
        g = np.zeros_like(block)
        it = np.nditer(block, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = block[idx]
            block[idx] = orig + h
            fp = problem.loss(work)
            block[idx] = orig - h
            fm = problem.loss(work)
            block[idx] = orig
            g[idx] = (fp - fm) / (2.0 * h)
        out.append(g)
    return out


PROBLEM_NAMES = ("least-squares", "spectrum-quadratic", "small-mlp")


def make_problem(name: str, seed: int = 0, **kwargs) -> MatrixProblem:
    """Factory keyed by problem name, used by the benchmark harness."""
    if name == "least-squares":
        return LeastSquaresInstance(seed=seed, **kwargs)
    if name == "spectrum-quadratic":
        if "lambdas" in kwargs:
            return SpectrumQuadratic(kwargs["lambdas"])
        return SpectrumQuadratic.log_spaced(**kwargs)
    if name == "small-mlp":
        return SmallMlpRegression(**kwargs)
    raise ConfigError(f"unknown problem {name!r}")
