"""Weighted space L^2(K), K(y) = exp(y^2/4), and the eigenbasis of
L v = -v'' - y v'/2 (one space dimension).

The eigenfunctions are the Gaussian derivatives D^{l-1} exp(-y^2/4),
eigenvalue l/2, which are Hermite functions in the variable y/sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Field, Frame, Grid1D, _trapz, write_columns
from .errors import DomainTooSmall, ShapeMismatch

Y_CAP = 15.0
DEFAULT_ORDER = 16


def _k_integrand(f: np.ndarray, g: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``f g K`` evaluated as ``sign * exp(log|f| + log|g| + y^2/4)``."""
    prod = f * g
    out = np.zeros_like(prod)
    nz = prod != 0
    out[nz] = np.sign(prod[nz]) * np.exp(
        np.log(np.abs(f[nz])) + np.log(np.abs(g[nz])) + 0.25 * y[nz] ** 2
    )
    return out


def _check_decay(integrand: np.ndarray) -> None:
    if max(abs(integrand[0]), abs(integrand[-1])) >= 1e-12:
        raise DomainTooSmall("K-weighted integrand has not decayed at the grid boundary")


def k_inner(f: Field, g: Field) -> float:
    if f.grid != g.grid:
        raise ShapeMismatch("fields live on different grids")
    integrand = _k_integrand(f.values, g.values, f.grid.x)
    _check_decay(integrand)
    return _trapz(integrand, f.grid.dx)


def k_norm(f: Field) -> float:
    """``sqrt(int f^2 K dy)`` by trapezoid."""
    return math.sqrt(max(k_inner(f, f), 0.0))


def eigenvalue(l: int, N: int = 1) -> float:
    """``mu_l = (N + l - 1) / 2``."""
    return 0.5 * (N + l - 1)


def _hermite_functions(y: np.ndarray, order: int) -> np.ndarray:
    """Rows ``(-1)^k He_k(y/sqrt2) exp(-y^2/4) / sqrt(k!)``, k < order.

    These are D^k exp(-y^2/4) up to the positive factor 2^{k/2}/sqrt(k!);
    the three-term recurrence is run on the already normalized functions to
    avoid factorial growth.
    """
    z = y / math.sqrt(2.0)
    out = np.empty((order, y.size))
    out[0] = np.exp(-0.25 * y * y)
    if order > 1:
        out[1] = -z * out[0]
    for k in range(1, order - 1):
        out[k + 1] = -(z * out[k] + math.sqrt(k) * out[k - 1]) / math.sqrt(k + 1)
    return out


@dataclass(frozen=True)
class WeightedBasis:
    """K-orthonormal eigenfunctions ``phi_1..phi_m`` of L sampled on ``grid``."""

    grid: Grid1D
    order: int = DEFAULT_ORDER
    N: int = 1
    phi: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.N != 1:
            raise NotImplementedError("only N = 1 is computed numerically")
        if max(abs(self.grid.x_min), abs(self.grid.x_max)) > Y_CAP + 1e-12:
            raise DomainTooSmall(f"similarity grid must satisfy |y| <= {Y_CAP}")
        y = self.grid.x
        raw = _hermite_functions(y, self.order) * (4.0 * math.pi) ** -0.25
        # analytic normalization is exact; renormalize by quadrature so the
        # discrete K-norms are 1 on this grid
        for k in range(self.order):
            raw[k] /= math.sqrt(_trapz(_k_integrand(raw[k], raw[k], y), self.grid.dx))
        object.__setattr__(self, "phi", raw)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([eigenvalue(l, self.N) for l in range(1, self.order + 1)])

    def eigenfunction(self, l: int) -> Field:
        """``phi_l`` (1-based) as a similarity-frame field."""
        return Field(self.grid, self.phi[l - 1].copy(), 0.0, Frame.SIMILARITY)

    def gram(self) -> np.ndarray:
        y, dx = self.grid.x, self.grid.dx
        m = self.order
        G = np.empty((m, m))
        for i in range(m):
            for j in range(i, m):
                G[i, j] = G[j, i] = _trapz(_k_integrand(self.phi[i], self.phi[j], y), dx)
        return G

    def to_csv(self, path) -> None:
        cols = {"y": self.grid.x}
        for l in range(1, self.order + 1):
            cols[f"phi_{l}"] = self.phi[l - 1]
        write_columns(path, cols)


def project(f: Field, basis: WeightedBasis, l: int | None = None):
    """Fourier coefficient ``alpha_l = int f phi_l K`` (all of them if ``l`` is None)."""
    if f.grid != basis.grid:
        raise ShapeMismatch("field and basis live on different grids")
    y, dx = f.grid.x, f.grid.dx
    _check_decay(_k_integrand(f.values, f.values, y))
    if l is not None:
        return _trapz(_k_integrand(f.values, basis.phi[l - 1], y), dx)
    return np.array([_trapz(_k_integrand(f.values, p, y), dx) for p in basis.phi])


def evolve_spectral(coeffs, s: float, N: int = 1) -> np.ndarray:
    """Exact similarity-frame heat flow: ``alpha_l -> exp(-(mu_l - N/2) s) alpha_l``."""
    a = np.asarray(coeffs, dtype=float)
    l = np.arange(1, a.size + 1)
    rates = 0.5 * (N + l - 1) - 0.5 * N
    return np.exp(-rates * s) * a


def reconstruct(coeffs, basis: WeightedBasis, time: float = 0.0) -> Field:
    a = np.asarray(coeffs, dtype=float)
    if a.size != basis.order:
        raise ShapeMismatch(f"{a.size} coefficients for a basis of order {basis.order}")
    return Field(basis.grid, a @ basis.phi, time, Frame.SIMILARITY)


def apply_L(f: Field) -> np.ndarray:
    """Finite-difference ``-v'' - y v'/2`` on interior nodes (second order, centered)."""
    v, h, y = f.values, f.grid.dx, f.grid.x
    d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    d1 = (v[2:] - v[:-2]) / (2.0 * h)
    return -d2 - 0.5 * y[1:-1] * d1


def eigen_residual(basis: WeightedBasis, l: int) -> float:
    """``||L_h phi_l - mu_l phi_l||_K / ||phi_l||_K`` over interior nodes."""
    phi = basis.phi[l - 1]
    y = basis.grid.x
    r = np.zeros_like(phi)
    r[1:-1] = apply_L(basis.eigenfunction(l)) - eigenvalue(l, basis.N) * phi[1:-1]
    num = _trapz(_k_integrand(r, r, y), basis.grid.dx)
    den = _trapz(_k_integrand(phi, phi, y), basis.grid.dx)
    return math.sqrt(num / den)


def poincare_sides(f: Field) -> tuple[float, float]:
    """``(int v^2 y^2 K, 16 int v'^2 K)``; the first never exceeds the second."""
    y, h = f.grid.x, f.grid.dx
    v = f.values
    dv = np.gradient(v, h)
    lhs = _trapz(_k_integrand(v * y, v * y, y), h)
    rhs = 16.0 * _trapz(_k_integrand(dv, dv, y), h)
    return lhs, rhs
