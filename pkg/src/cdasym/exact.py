"""Closed-form solutions: heat kernel, linear convection, Hopf-Cole Burgers
solutions and their self-similar profiles, and the hyperbolic N-wave."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import erfc

from .core import Field, Grid1D, write_columns
from .errors import DomainTooSmall, InternalError, InvalidExponent, NonPositiveTime

#: kernel is below 1e-31 beyond this many sqrt(t)
CUTOFF = 12.0


@dataclass(frozen=True)
class HeatKernelParams:
    t: float
    N: int = 1

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise NonPositiveTime(f"heat kernel needs t > 0, got {self.t}")
        if self.N < 1:
            raise ValueError("dimension must be >= 1")


def heat_kernel(x, params: HeatKernelParams | float):
    """``(4 pi t)^(-N/2) exp(-|x|^2 / 4t)``; ``x`` is the radial distance when N > 1."""
    if not isinstance(params, HeatKernelParams):
        params = HeatKernelParams(float(params))
    t, N = params.t, params.N
    x = np.asarray(x, dtype=float)
    out = (4.0 * math.pi * t) ** (-N / 2.0) * np.exp(-(x * x) / (4.0 * t))
    return float(out) if out.ndim == 0 else out


def heat_kernel_field(grid: Grid1D, t: float, mass: float = 1.0, shift: float = 0.0) -> Field:
    """``mass * G(x + shift, t)`` sampled on ``grid``."""
    return Field(grid, mass * heat_kernel(grid.x + shift, t), t)


def _convolve_heat(values: np.ndarray, dx: float, t: float, shift: float = 0.0) -> np.ndarray:
    """``sum_j G(x_i + shift - x_j, t) u_j w_j`` with trapezoid weights ``w_j``.

    The grid is uniform, so the quadrature is a discrete convolution with the
    kernel sampled at ``k*dx + shift``; offsets beyond CUTOFF*sqrt(t) are dropped.
    """
    n = values.size
    uw = values.copy()
    uw[0] *= 0.5
    uw[-1] *= 0.5
    half = int(math.ceil((CUTOFF * math.sqrt(t) + abs(shift)) / dx))
    half = min(half, n - 1 + int(math.ceil(abs(shift) / dx)))
    k = np.arange(-half, half + 1)
    ker = heat_kernel(k * dx + shift, t) * dx
    full = np.convolve(uw, ker, mode="full")
    return full[half:half + n]


def heat_solution(u0: Field, t: float) -> Field:
    """Solution of the heat equation at time ``t`` from data ``u0``: ``G(t) * u0``."""
    if not t > 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    out = _convolve_heat(u0.values, u0.grid.dx, t)
    return Field(u0.grid, out, u0.time + t, u0.frame)


def linear_convection_solution(u0: Field, a: float, t: float) -> Field:
    """Solution of ``u_t - u_xx = a u_x``: ``[G(t) * u0](x + a t)``.

    The shift is applied inside the quadrature (kernel sampled at ``x_i + a t - x_j``),
    so off-node shifts need no interpolation.
    """
    if not t > 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    if a == 0:
        return heat_solution(u0, t)
    out = _convolve_heat(u0.values, u0.grid.dx, t, shift=a * t)
    peak = np.max(np.abs(out))
    if peak > 0 and max(abs(out[0]), abs(out[-1])) > 1e-10 * peak:
        raise DomainTooSmall(f"shift a*t = {a * t:g} pushes the solution off the grid")
    return Field(u0.grid, out, u0.time + t, u0.frame)


# --------------------------------------------------------------------------
# Hopf-Cole


def hopf_cole_forward(u0: Field) -> Field:
    """``w0(x) = exp(int_{-inf}^x u0)`` by cumulative trapezoid."""
    cum = cumulative_trapezoid(u0.values, dx=u0.grid.dx, initial=0.0)
    return Field(u0.grid, np.exp(cum), u0.time, u0.frame)


def _d1_fourth_order(w: np.ndarray, dx: float) -> np.ndarray:
    d = np.empty_like(w)
    d[2:-2] = (-w[4:] + 8.0 * w[3:-1] - 8.0 * w[1:-3] + w[:-4]) / (12.0 * dx)
    d[1] = (w[2] - w[0]) / (2 * dx)
    d[-2] = (w[-1] - w[-3]) / (2 * dx)
    d[0] = (w[1] - w[0]) / dx
    d[-1] = (w[-1] - w[-2]) / dx
    return d


def burgers_exact(u0: Field, t: float, a: float = 1.0) -> Field:
    """Exact solution of ``u_t - u_xx = a (u^2)_x`` at time ``t`` via Hopf-Cole.

    ``v = a u`` solves the ``a = 1`` equation; ``w = exp(int v)`` solves the
    heat equation and ``v = w_x / w``.  ``w0`` tends to the constants 1 and
    ``e^(aM)`` outside the grid, so it is padded with those values before the
    convolution.
    """
    if not t > 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    if a == 0:
        return heat_solution(u0, t)
    dx = u0.grid.dx
    w0 = hopf_cole_forward(u0.with_values(a * u0.values)).values
    pad = int(math.ceil(CUTOFF * math.sqrt(t) / dx)) + 2
    ext = np.concatenate([np.full(pad, w0[0]), w0, np.full(pad, w0[-1])])
    k = np.arange(-pad + 2, pad - 1)
    ker = heat_kernel(k * dx, t) * dx
    w = np.convolve(ext, ker, mode="same")
    if np.any(w[pad - 2:pad + u0.grid.n + 2] <= 0):
        raise InternalError("Hopf-Cole potential w lost positivity")
    wx = _d1_fourth_order(w, dx)
    sl = slice(pad, pad + u0.grid.n)
    v = wx[sl] / w[sl]
    return Field(u0.grid, v / a, u0.time + t, u0.frame)


# --------------------------------------------------------------------------
# self-similar Burgers profiles


def gaussian_profile(x):
    """``h(x) = (4 pi)^(-1/2) exp(-x^2/4)``."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.25 * x * x) / math.sqrt(4.0 * math.pi)


def gaussian_cdf(x):
    """``H(x) = int_{-inf}^x h = erfc(-x/2) / 2``."""
    return 0.5 * erfc(-np.asarray(x, dtype=float) / 2.0)


def burgers_profile(M: float, x, a: float = 1.0):
    """Self-similar profile ``f_M`` of ``u_t - u_xx = a (u^2)_x``.

    For ``a = 1``: ``f_M = (e^M - 1) h / ((e^M - 1) H + 1)``.  A general
    ``a != 0`` uses ``f_{M,a} = f_{aM} / a``.
    """
    if a == 0:
        out = M * gaussian_profile(x)
    elif a != 1:
        out = burgers_profile(a * M, x) / a
    else:
        em1 = math.expm1(M)
        out = em1 * gaussian_profile(x) / (em1 * gaussian_cdf(x) + 1.0)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def burgers_self_similar(M: float, x, t: float, a: float = 1.0):
    """``u_M(x, t) = t^(-1/2) f_M(x / sqrt(t))``."""
    if not t > 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    st = math.sqrt(t)
    return burgers_profile(M, np.asarray(x, dtype=float) / st, a) / st


@dataclass(frozen=True)
class BurgersProfile:
    M: float
    a: float = 1.0

    def __call__(self, x):
        return burgers_profile(self.M, x, self.a)

    def at(self, x, t: float):
        return burgers_self_similar(self.M, x, t, self.a)

    def sample(self, grid: Grid1D) -> Field:
        return Field(grid, self(grid.x))

    def to_csv(self, grid: Grid1D, path) -> None:
        write_columns(path, {"x": grid.x, "f": self(grid.x)})


# --------------------------------------------------------------------------
# N-waves


def _check_q(q: float) -> None:
    if not 1 < q < 2:
        raise InvalidExponent(f"N-wave needs 1 < q < 2, got {q}")


@dataclass(frozen=True)
class NWave:
    """Entropy solution of ``u_t = a (|u|^{q-1} u)_x`` with data ``M delta``.

    With ``a = -1/q`` it is ``(x/t)^{1/(q-1)}`` on ``(0, r(t))``.  Any other
    ``a < 0`` reduces to that case through ``u = lam * v`` with
    ``lam = (1 / (q |a|))^{1/(q-1)}``, and ``a > 0`` mirrors ``x -> -x``.
    """

    q: float
    M: float
    a: float | None = None

    def __post_init__(self) -> None:
        _check_q(self.q)
        if not self.M > 0:
            raise ValueError("N-wave mass must be positive")
        if self.a is not None and self.a == 0:
            raise ValueError("N-wave needs a nonzero convection coefficient")

    @property
    def c(self) -> float:
        q = self.q
        return (q / (q - 1.0)) ** ((q - 1.0) / q)

    @property
    def _lam(self) -> float:
        if self.a is None:
            return 1.0
        return (1.0 / (self.q * abs(self.a))) ** (1.0 / (self.q - 1.0))

    @property
    def _mirror(self) -> bool:
        return self.a is not None and self.a > 0

    def _base_mass(self) -> float:
        return self.M / self._lam

    def r(self, t: float) -> float:
        """Support endpoint (for the mirrored case the support is ``(-r, 0)``)."""
        if not t > 0:
            raise NonPositiveTime(f"t must be positive, got {t}")
        q = self.q
        return self.c * self._base_mass() ** ((q - 1.0) / q) * t ** (1.0 / q)

    def sup(self, t: float) -> float:
        q = self.q
        return self._lam * (q * self._base_mass() / ((q - 1.0) * t)) ** (1.0 / q)

    def __call__(self, x, t: float):
        if not t > 0:
            raise NonPositiveTime(f"t must be positive, got {t}")
        x = np.asarray(x, dtype=float)
        if self._mirror:
            x = -x
        r = self.r(t)
        inside = (x > 0) & (x < r)
        xi = np.where(inside, x, 0.0)
        out = np.where(inside, self._lam * (xi / t) ** (1.0 / (self.q - 1.0)), 0.0)
        return float(out) if out.ndim == 0 else out

    def to_csv(self, grid: Grid1D, t: float, path) -> None:
        write_columns(path, {"x": grid.x, "u": self(grid.x, t), "t": np.full(grid.n, t)})


def nwave(q: float, M: float, x, t: float, a: float | None = None):
    """N-wave of mass ``M`` at time ``t``; ``a`` defaults to ``-1/q``."""
    return NWave(q, M, a)(x, t)

