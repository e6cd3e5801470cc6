"""Finite-difference time integration in physical and similarity variables.

Physical frame:   u_t = u_xx + a F(u)_x
Similarity frame: v_s = v_yy + (y v)_y / 2 + a F(v)_y

Diffusion (plus the similarity drift) is treated by Crank-Nicolson with
homogeneous Dirichlet data at both ends; the convective flux is explicit.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import lapack

from .core import (
    INF,
    Field,
    FluxKind,
    Frame,
    Grid1D,
    Nonlinearity,
    RunConfig,
    Scheme,
    _lp,
    _trapz,
    make_initial,
    write_columns,
)
from .errors import DomainTooSmall, InternalError, InvalidConfig, StepRejected

DIFFUSION_CFL = 0.4 * 0.5  # dt <= 0.4 * dx^2 / 2
CONVECTION_CFL = 0.8  # dt <= 0.8 * dx / max|a F'(u)|
BOUNDARY_TOL = 1e-10
MASS_TOL = 1e-8


class Tridiagonal:
    """LU-factored tridiagonal matrix (LAPACK gttrf/gttrs)."""

    def __init__(self, lower: np.ndarray, diag: np.ndarray, upper: np.ndarray):
        dl, d, du, du2, ipiv, info = lapack.dgttrf(lower, diag, upper)
        if info != 0:
            raise InternalError(f"tridiagonal factorization failed (info={info})")
        self._lu = (dl, d, du, du2, ipiv)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dgttrs(*self._lu, rhs)
        if info != 0:
            raise InternalError(f"tridiagonal solve failed (info={info})")
        return x


def _implicit_operator(grid: Grid1D, frame: Frame):
    """Sub/main/super diagonals of the linear operator on interior nodes."""
    m = grid.n - 2
    h = grid.dx
    lower = np.full(m - 1, 1.0 / h**2)
    diag = np.full(m, -2.0 / h**2)
    upper = np.full(m - 1, 1.0 / h**2)
    if frame is Frame.SIMILARITY:
        y = grid.x
        # (y v)_y / 2 in conservative centered form
        lower -= y[1:m] / (4.0 * h)
        upper += y[2:m + 1] / (4.0 * h)
    return lower, diag, upper


@dataclass
class _Operators:
    grid: Grid1D
    dt: float
    frame: Frame
    lower: np.ndarray = field(init=False)
    diag: np.ndarray = field(init=False)
    upper: np.ndarray = field(init=False)
    lhs: Tridiagonal = field(init=False)

    def __post_init__(self) -> None:
        self.lower, self.diag, self.upper = _implicit_operator(self.grid, self.frame)
        c = 0.5 * self.dt
        self.lhs = Tridiagonal(-c * self.lower, 1.0 - c * self.diag, -c * self.upper)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Operator applied to the interior of ``u`` (boundary values are zero)."""
        ui = u[1:-1]
        out = self.diag * ui
        out[1:] += self.lower * ui[:-1]
        out[:-1] += self.upper * ui[1:]
        return out


@dataclass
class SolverState:
    """Mutable integrator state.  ``field.values`` is updated in place by the
    owning loop; everything else describing the run is fixed."""

    field: Field
    dt: float
    nonlinearity: Nonlinearity
    scheme: Scheme = Scheme.IMEX_CN
    frame: Frame = Frame.PHYSICAL
    step: int = 0
    mass0: float = field(init=False)
    prev_explicit: np.ndarray | None = field(default=None, repr=False)
    _ops: _Operators | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.field.frame is not self.frame:
            self.field = Field(self.field.grid, self.field.values, self.field.time, self.frame)
        v = self.field.values
        v[0] = v[-1] = 0.0
        self.mass0 = _trapz(v, self.field.grid.dx)

    @property
    def grid(self) -> Grid1D:
        return self.field.grid

    @property
    def time(self) -> float:
        return self.field.time

    @property
    def mass(self) -> float:
        return _trapz(self.field.values, self.grid.dx)

    def ops(self) -> _Operators:
        if self._ops is None or self._ops.grid != self.grid or self._ops.dt != self.dt:
            self._ops = _Operators(self.grid, self.dt, self.frame)
        return self._ops

    def regrid(self, factor: int = 2) -> None:
        """Re-embed the solution by linear interpolation into a grid ``factor``
        times wider with the same node count, so ``dx`` grows by ``factor``.

        The time step grows by ``factor**2`` (diffusive scaling) unless a
        convective limit caps it; the multistep history is dropped.
        """
        old = self.grid
        new = old.coarsened(factor)
        vals = np.interp(new.x, old.x, self.field.values, left=0.0, right=0.0)
        vals[0] = vals[-1] = 0.0
        self.field = Field(new, vals, self.field.time, self.frame)
        dt = self.dt * factor * factor
        smax = 0.0 if self.nonlinearity.is_trivial else float(
            np.max(np.abs(self.nonlinearity.speed(vals))))
        if smax > 0:
            dt = min(dt, 0.5 * CONVECTION_CFL * new.dx / smax)
        if self.scheme is Scheme.UPWIND_EXPLICIT:
            dt = min(dt, DIFFUSION_CFL * new.dx**2, 0.9 / (2.0 / new.dx**2 + smax / new.dx))
        self.dt = dt
        self.prev_explicit = None
        self._ops = None


def _centered_flux_divergence(u: np.ndarray, nl: Nonlinearity, dx: float) -> np.ndarray:
    """``a (F(u_{i+1}) - F(u_{i-1})) / (2 dx)`` on interior nodes."""
    f = nl.flux(u)
    return (f[2:] - f[:-2]) / (2.0 * dx)


def _monotone_flux(u: np.ndarray, nl: Nonlinearity) -> np.ndarray:
    """Numerical flux at the n-1 cell faces for ``u_t + g(u)_x = 0``, ``g = -a F``.

    Engquist-Osher.  For power-law and linear F, ``g'`` has a fixed sign, so the
    Engquist-Osher flux is the upwind value; a custom F falls back to the local
    Lax-Friedrichs flux, which is also monotone.
    """
    ul, ur = u[:-1], u[1:]
    if nl.kind is FluxKind.CUSTOM:
        gl, gr = -nl.flux(ul), -nl.flux(ur)
        alpha = np.maximum(np.abs(nl.speed(ul)), np.abs(nl.speed(ur)))
        return 0.5 * (gl + gr) - 0.5 * alpha * (ur - ul)
    if -nl.a >= 0:
        return -nl.flux(ul)
    return -nl.flux(ur)


def _check_convective_cfl(u: np.ndarray, state: SolverState) -> float:
    smax = float(np.max(np.abs(state.nonlinearity.speed(u)))) if not state.nonlinearity.is_trivial else 0.0
    dx = state.grid.dx
    if smax > 0 and state.dt > CONVECTION_CFL * dx / smax:
        raise StepRejected(
            f"convective CFL violated: dt={state.dt:g}, max|aF'|={smax:g}, dx={dx:g}",
            CONVECTION_CFL * dx / smax,
        )
    return smax


def _check_mass(state: SolverState) -> None:
    drift = abs(state.mass - state.mass0)
    if drift > MASS_TOL * (1.0 + abs(state.mass0)):
        raise DomainTooSmall(
            f"mass drift {drift:.3e} at t={state.time:g}: solution has reached the boundary"
        )


def step_physical(state: SolverState) -> SolverState:
    """Advance ``u_t = u_xx + a F(u)_x`` by one step of ``state.dt``."""
    if state.frame is not Frame.PHYSICAL:
        raise InvalidConfig("step_physical needs a physical-frame state")
    u = state.field.values
    dx, dt = state.grid.dx, state.dt
    smax = _check_convective_cfl(u, state)

    if state.scheme is Scheme.UPWIND_EXPLICIT:
        if dt > DIFFUSION_CFL * dx * dx:
            raise StepRejected(
                f"explicit diffusion CFL violated: dt={dt:g}, dx={dx:g}", DIFFUSION_CFL * dx * dx
            )
        if dt * (2.0 / dx**2 + smax / dx) > 1.0:
            raise StepRejected(
                "upwind scheme would lose monotonicity", 1.0 / (2.0 / dx**2 + smax / dx)
            )
        g = _monotone_flux(u, state.nonlinearity)
        new = u.copy()
        new[1:-1] += dt * (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2 - dt * (g[1:] - g[:-1]) / dx
    else:
        ops = state.ops()
        if state.nonlinearity.is_trivial:
            explicit = None
            rhs = u[1:-1] + 0.5 * dt * ops.apply(u)
        else:
            explicit = _centered_flux_divergence(u, state.nonlinearity, dx)
            if state.prev_explicit is None:
                ex = explicit
            else:
                ex = 1.5 * explicit - 0.5 * state.prev_explicit
            rhs = u[1:-1] + 0.5 * dt * ops.apply(u) + dt * ex
        new = np.zeros_like(u)
        new[1:-1] = ops.lhs.solve(rhs)
        state.prev_explicit = explicit

    _commit(state, new)
    return state


def step_similarity(state: SolverState) -> SolverState:
    """Advance ``v_s = v_yy + (y v)_y / 2 + a F(v)_y`` by one step of ``state.dt``.

    The drift and the ``v/2`` reaction are combined into the conservative
    term ``(y v)_y / 2`` and treated implicitly with the diffusion, so the
    discrete mass telescopes exactly.
    """
    if state.frame is not Frame.SIMILARITY:
        raise InvalidConfig("step_similarity needs a similarity-frame state")
    if state.scheme is not Scheme.IMEX_CN:
        raise InvalidConfig("similarity frame supports the IMEX_CN scheme only")
    nl = state.nonlinearity
    if not nl.is_trivial and not (nl.kind is FluxKind.POWER_LAW and nl.q == 2.0):
        raise InvalidConfig("similarity frame needs the critical flux |v|v (N = 1) or a = 0")
    u = state.field.values
    dt = state.dt
    _check_convective_cfl(u, state)
    ops = state.ops()
    rhs = u[1:-1] + 0.5 * dt * ops.apply(u)
    explicit = None
    if not nl.is_trivial:
        explicit = _centered_flux_divergence(u, nl, state.grid.dx)
        ex = explicit if state.prev_explicit is None else 1.5 * explicit - 0.5 * state.prev_explicit
        rhs = rhs + dt * ex
    new = np.zeros_like(u)
    new[1:-1] = ops.lhs.solve(rhs)
    state.prev_explicit = explicit
    _commit(state, new)
    return state


def _commit(state: SolverState, new: np.ndarray) -> None:
    if not np.all(np.isfinite(new)):
        raise InternalError(f"non-finite values at step {state.step + 1}")
    state.field.values[:] = new
    state.step += 1
    state.field.time = state.field.time + state.dt
    _check_mass(state)


def step(state: SolverState) -> SolverState:
    if state.frame is Frame.SIMILARITY:
        return step_similarity(state)
    return step_physical(state)


def new_state(u0: Field, dt: float, nonlinearity: Nonlinearity,
              scheme: Scheme = Scheme.IMEX_CN, frame: Frame | None = None) -> SolverState:
    frame = u0.frame if frame is None else frame
    return SolverState(u0.copy(), dt, nonlinearity, scheme, frame)


# --------------------------------------------------------------------------
# trajectories


def gradient(values: np.ndarray, dx: float) -> np.ndarray:
    return np.gradient(values, dx)


@dataclass
class Snapshot:
    field: Field
    mass: float
    l1: float
    l2: float
    linf: float
    grad_l2: float
    grad_linf: float

    @property
    def time(self) -> float:
        return self.field.time

    @classmethod
    def of(cls, f: Field) -> "Snapshot":
        dx = f.grid.dx
        v = f.values
        g = gradient(v, dx)
        return cls(
            f.copy(),
            _trapz(v, dx),
            _lp(v, dx, 1),
            _lp(v, dx, 2),
            _lp(v, dx, INF),
            _lp(g, dx, 2),
            float(np.max(np.abs(g))),
        )


@dataclass
class Trajectory:
    snapshots: list[Snapshot]
    config: RunConfig | None = None
    mass0: float = 0.0
    restarts: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.snapshots])

    @property
    def fields(self) -> list[Field]:
        return [s.field for s in self.snapshots]

    def max_mass_drift(self) -> float:
        return float(np.max(np.abs(self.series("mass") - self.mass0)))

    def write(self, out_dir: str | Path) -> Path:
        """Snapshot CSVs, ``series.csv`` and ``manifest.json`` under ``out_dir``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, s in enumerate(self.snapshots):
            s.field.to_csv(out / f"snapshot_{k:04d}.csv")
        write_columns(
            out / "series.csv",
            {
                "t": self.times,
                "mass": self.series("mass"),
                "l1": self.series("l1"),
                "l2": self.series("l2"),
                "linf": self.series("linf"),
                "grad_l2": self.series("grad_l2"),
            },
        )
        manifest = {"n_snapshots": len(self.snapshots), "restarts": self.restarts}
        if self.config is not None:
            cfg = self.config.describe()
            manifest["config"] = cfg
            manifest["scheme"] = self.config.scheme.value
            manifest["input_hash"] = content_hash(cfg)
        (out / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2, ensure_ascii=False), encoding="utf-8"
        )
        return out


def content_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(blob).hexdigest()


def _snapshot_times(config: RunConfig) -> list[float]:
    if config.snapshot_times:
        return sorted({float(t) for t in config.snapshot_times if 0 < t <= config.t_end * (1 + 1e-12)})
    n, c = config.n_steps, config.cadence
    return [k * config.dt for k in range(c, n + 1, c)]


def _boundary_tripped(values: np.ndarray) -> bool:
    peak = np.max(np.abs(values))
    if peak == 0:
        return False
    return max(abs(values[1]), abs(values[-2])) > BOUNDARY_TOL * peak


def run(config: RunConfig, u0: Field | None = None) -> Trajectory:
    """Integrate ``config`` to ``t_end`` and collect snapshots (t = 0 included).

    With ``grow_domain`` the grid doubles whenever the solution reaches the
    boundary guard; otherwise that raises :class:`DomainTooSmall`.
    """
    if u0 is None:
        u0 = make_initial(config.initial, config.grid, 0.0, config.frame)
    state = new_state(u0, config.dt, config.nonlinearity, config.scheme, config.frame)
    traj = Trajectory([Snapshot.of(state.field)], config, state.mass0)
    check_every = 20
    for target in _snapshot_times(config):
        _advance_to(state, target, config, traj, check_every)
        if _boundary_tripped(state.field.values):
            _grow_or_fail(state, config, traj)
        traj.snapshots.append(Snapshot.of(state.field))
    return traj


def _advance_to(state: SolverState, target: float, config: RunConfig, traj: Trajectory,
                check_every: int) -> None:
    """Step until ``state.time == target``; a final short step lands on it exactly."""
    eps = 1e-9 * max(1.0, abs(target))
    while target - state.time > eps:
        remaining = target - state.time
        if remaining < state.dt * (1.0 - 1e-9):
            full = state.dt
            state.dt = remaining
            state.prev_explicit = None
            step(state)
            state.dt = full
            state.prev_explicit = None
        else:
            step(state)
        if state.step % check_every == 0 and _boundary_tripped(state.field.values):
            _grow_or_fail(state, config, traj)
    state.field.time = target


def _grow_or_fail(state: SolverState, config: RunConfig, traj: Trajectory) -> None:
    if not config.grow_domain:
        raise DomainTooSmall(
            f"solution reached the boundary at t={state.time:g}; widen the grid"
        )
    state.regrid(2)
    traj.restarts += 1


def contraction_pair(config: RunConfig, u0: Field, v0: Field) -> list[tuple[float, float]]:
    """Co-evolve two solutions and return ``(t, ||u(t) - v(t)||_1)`` after every step."""
    if u0.grid != v0.grid:
        raise InvalidConfig("contraction pair needs both data on the same grid")
    su = new_state(u0, config.dt, config.nonlinearity, config.scheme, config.frame)
    sv = new_state(v0, config.dt, config.nonlinearity, config.scheme, config.frame)
    dx = u0.grid.dx
    out = [(su.time, _lp(su.field.values - sv.field.values, dx, 1))]
    for _ in range(config.n_steps):
        step(su)
        step(sv)
        out.append((su.time, _lp(su.field.values - sv.field.values, dx, 1)))
    return out


def is_non_increasing(values, slack: float = 1e-8) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) <= slack))


def is_strictly_decreasing_windows(values, window: int = 10) -> bool:
    """Every value is strictly below the one ``window`` steps earlier.

    Comparing across windows rides over single-step rounding plateaus."""
    v = np.asarray(values, dtype=float)
    if v.size <= window:
        return False
    return bool(np.all(v[window:] < v[:-window]))
