"""Numerical integration on truncated vertical lines, Gauss rules, complex determinants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import lu_factor


class QuadratureError(RuntimeError):
    """Non-finite integrand value or failed accuracy check."""


@dataclass(frozen=True)
class LineContour:
    """A truncated integration line z = anchor + i*y (vertical) or z = anchor + y (real axis)."""

    anchor: float = 0.0
    halfwidth: float = 8.0
    node_count: int = 400
    vertical: bool = True

    def __post_init__(self):
        if self.halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        if self.node_count < 8 or self.node_count % 2:
            raise ValueError("node_count must be even and >= 8")

    def nodes(self) -> tuple[np.ndarray, float]:
        """Uniform nodes (complex) and spacing; symmetric about y = 0."""
        y = np.linspace(-self.halfwidth, self.halfwidth, self.node_count + 1)
        z = self.anchor + 1j * y if self.vertical else self.anchor + y
        return z, y[1] - y[0]

    @property
    def direction(self) -> complex:
        return 1j if self.vertical else 1.0


def default_halfwidth(decay_rate: float, tol: float = 1e-12) -> float:
    """Truncation halfwidth for integrands with envelope exp(-decay_rate * y^2 / 2)."""
    if decay_rate <= 0:
        raise ValueError("decay_rate must be positive")
    return math.sqrt(2.0 * math.log(1.0 / tol) / decay_rate) + 3.0


@dataclass(frozen=True)
class TensorGrid:
    """Tensor product of line contours, dimension <= 4 in full tensor mode."""

    axes: tuple[LineContour, ...]

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 4:
            raise ValueError("tensor grids support dimension 1..4")

    @property
    def total_nodes(self) -> int:
        n = 1
        for ax in self.axes:
            n *= ax.node_count + 1
        return n


def trapezoid_line(f: Callable[[np.ndarray], np.ndarray], c: LineContour) -> tuple[complex, float]:
    """Trapezoid value of int f(z) dz along the contour, plus a Richardson-style error estimate.

    The error estimate is |value(n) - value(n/2)|; truncation of the tails is
    the caller's responsibility via the halfwidth.
    """
    z, h = c.nodes()
    fz = np.asarray(f(z), dtype=complex)
    if not np.all(np.isfinite(fz)):
        bad = z[~np.isfinite(fz)][0]
        raise QuadratureError(f"non-finite integrand value at z = {bad}")
    w = np.full(z.shape, h)
    w[0] = w[-1] = h / 2
    value = c.direction * np.sum(w * fz)
    coarse = c.direction * (2 * h) * (np.sum(fz[0::2]) - 0.5 * (fz[0] + fz[-1]))
    return complex(value), float(abs(value - coarse))


@dataclass(frozen=True)
class GaussHermiteRule:
    """Nodes and weights for int f(x) exp(-x^2) dx."""

    order: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


def gauss_hermite(n: int) -> GaussHermiteRule:
    if not 1 <= n <= 200:
        raise ValueError("Gauss-Hermite order must be in [1, 200]")
    nodes, weights = np.polynomial.hermite.hermgauss(n)
    if not np.all(weights > 0):
        raise QuadratureError("Gauss-Hermite weight computation failed")
    return GaussHermiteRule(n, nodes, weights)


def gauss_legendre_panels(a: float, b: float, panel_width: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [a, b] with panels of roughly panel_width."""
    if b <= a:
        raise ValueError("need b > a")
    npanels = max(1, int(math.ceil((b - a) / panel_width)))
    x0, w0 = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, npanels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def complex_det(A: np.ndarray) -> complex:
    """Determinant of a square complex matrix via LU with partial pivoting."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("complex_det expects a square matrix")
    n = A.shape[0]
    if n > 40:
        raise ValueError("complex_det limited to dimension <= 40")
    if n == 1:
        return complex(A[0, 0])
    lu, piv = lu_factor(A, check_finite=True)
    det = complex(np.prod(np.diag(lu)))
    sign = 1 - 2 * (np.sum(piv != np.arange(n)) % 2)
    return sign * det
