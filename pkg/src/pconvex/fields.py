"""Smooth scalar fields R^n -> R with gradient and Hessian access."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, EvaluationError

FD_REL_STEP = 1e-4


def default_step(x) -> float:
    return FD_REL_STEP * (1.0 + float(np.linalg.norm(x)))


def _checked(f, x):
    v = float(f(x))
    if not np.isfinite(v):
        raise EvaluationError(f"non-finite value at {np.asarray(x).tolist()}")
    return v


def fd_gradient(f, x, h_fd: Optional[float] = None) -> np.ndarray:
    """Central-difference gradient of ``f`` (a ScalarField or plain callable) at ``x``."""
    value = f.value if isinstance(f, ScalarField) else f
    x = np.asarray(x, dtype=float)
    h = default_step(x) if h_fd is None else h_fd
    g = np.empty(len(x))
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        g[i] = (_checked(value, x + e) - _checked(value, x - e)) / (2.0 * h)
    return g


def fd_hessian(f, x, h_fd: Optional[float] = None) -> np.ndarray:
    """Central second differences of ``f`` at ``x``, symmetrized.

    Diagonal entries use the three-point stencil, off-diagonal entries the
    four-corner stencil at offsets (+-h, +-h).
    """
    value = f.value if isinstance(f, ScalarField) else f
    x = np.asarray(x, dtype=float)
    n = len(x)
    h = default_step(x) if h_fd is None else h_fd
    f0 = _checked(value, x)
    E = np.eye(n) * h
    H = np.empty((n, n))
    for i in range(n):
        H[i, i] = (_checked(value, x + E[i]) - 2.0 * f0 + _checked(value, x - E[i])) / (h * h)
        for j in range(i + 1, n):
            H[i, j] = (
                _checked(value, x + E[i] + E[j])
                - _checked(value, x + E[i] - E[j])
                - _checked(value, x - E[i] + E[j])
                + _checked(value, x - E[i] - E[j])
            ) / (4.0 * h * h)
            H[j, i] = H[i, j]
    return 0.5 * (H + H.T)


class ScalarField:
    """A function R^n -> R exposing ``value``, ``gradient`` and ``hessian``.

    Missing derivative callables are filled in by central finite differences
    with step ``h_fd`` (``None`` means the default ``1e-4 * (1 + |x|)``);
    ``derivative_mode`` records which case applies. Hessians are always
    returned symmetrized.
    """

    def __init__(
        self,
        n: int,
        value: Callable,
        gradient: Optional[Callable] = None,
        hessian: Optional[Callable] = None,
        h_fd: Optional[float] = None,
        name: str = "",
    ):
        if n < 1:
            raise DimensionError(f"dimension must be positive, got {n}")
        self.n = n
        self.name = name
        self.h_fd = h_fd
        self._value = value
        self._gradient = gradient
        self._hessian = hessian

    @property
    def derivative_mode(self) -> str:
        if self._gradient is not None and self._hessian is not None:
            return "analytic"
        return "finite-difference"

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"expected a point in R^{self.n}, got shape {x.shape}")
        return x

    def value(self, x) -> float:
        return _checked(self._value, self._point(x))

    def __call__(self, x) -> float:
        return self.value(x)

    def gradient(self, x) -> np.ndarray:
        x = self._point(x)
        if self._gradient is None:
            return fd_gradient(self._value, x, self.h_fd)
        g = np.asarray(self._gradient(x), dtype=float)
        if not np.all(np.isfinite(g)):
            raise EvaluationError(f"non-finite gradient at {x.tolist()}")
        return g

    def hessian(self, x) -> np.ndarray:
        x = self._point(x)
        if self._hessian is None:
            return fd_hessian(self._value, x, self.h_fd)
        H = np.asarray(self._hessian(x), dtype=float)
        if not np.all(np.isfinite(H)):
            raise EvaluationError(f"non-finite Hessian at {x.tolist()}")
        return 0.5 * (H + H.T)

    def __repr__(self):
        return f"ScalarField(n={self.n}, name={self.name!r}, mode={self.derivative_mode})"


def quadratic_field(n: int, A=None, b=None, c: float = 0.0, name: str = "") -> ScalarField:
    """The field x -> x^T A x + b.x + c with exact derivatives (A symmetric, default identity)."""
    A = np.eye(n) if A is None else 0.5 * (np.asarray(A, float) + np.asarray(A, float).T)
    b = np.zeros(n) if b is None else np.asarray(b, float)
    return ScalarField(
        n,
        lambda x: x @ A @ x + b @ x + c,
        lambda x: 2.0 * A @ x + b,
        lambda x: 2.0 * A,
        name=name or "quadratic",
    )
