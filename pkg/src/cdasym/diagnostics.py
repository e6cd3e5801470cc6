"""Asymptotic-law checks on trajectories: frame changes, scalings, decay-rate
regression, attractor distances and the regime taxonomy."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .core import INF, Field, FluxKind, Frame, Grid1D, Nonlinearity, _lp, _trapz, write_columns
from .errors import DomainTooSmall, InvalidRegime, InvalidSamples
from .exact import NWave, burgers_profile, heat_kernel
from .solver import Snapshot, Trajectory

# --------------------------------------------------------------------------
# frame changes and scalings


def _interp(field: Field, x: np.ndarray) -> np.ndarray:
    return np.interp(x, field.grid.x, field.values, left=0.0, right=0.0)


def to_similarity(u: Field, y_grid: Grid1D | None = None) -> Field:
    """``v(y) = (t+1)^{1/2} u((t+1)^{1/2} y)`` at ``s = log(t+1)``.

    Without ``y_grid`` the physical nodes are mapped onto a scaled grid, so
    no interpolation is needed.
    """
    if u.frame is not Frame.PHYSICAL:
        raise ValueError("to_similarity needs a physical-frame field")
    scale = math.sqrt(u.time + 1.0)
    s = math.log1p(u.time)
    if y_grid is None:
        g = Grid1D(u.grid.x_min / scale, u.grid.x_max / scale, u.grid.n)
        return Field(g, scale * u.values, s, Frame.SIMILARITY)
    if y_grid.x_min * scale < u.grid.x_min - 1e-12 or y_grid.x_max * scale > u.grid.x_max + 1e-12:
        raise DomainTooSmall("similarity grid needs x values beyond the physical grid")
    return Field(y_grid, scale * _interp(u, scale * y_grid.x), s, Frame.SIMILARITY)


def from_similarity(v: Field, x_grid: Grid1D | None = None) -> Field:
    if v.frame is not Frame.SIMILARITY:
        raise ValueError("from_similarity needs a similarity-frame field")
    t = math.expm1(v.time)
    scale = math.sqrt(t + 1.0)
    if x_grid is None:
        g = Grid1D(v.grid.x_min * scale, v.grid.x_max * scale, v.grid.n)
        return Field(g, v.values / scale, t, Frame.PHYSICAL)
    return Field(x_grid, _interp(v, x_grid.x / scale) / scale, t, Frame.PHYSICAL)


def rescale(u: Field, lam: float, alpha: float, beta: float = 1.0,
            time: float | None = None) -> Field:
    """``u_lam(x) = lam^alpha u(lam^beta x)`` on the same grid (linear interpolation).

    ``(alpha, beta) = (N, 1)`` preserves mass; ``(1/(q-1), 1)`` applied to the
    field at time ``lam^2 t`` gives the invariance scaling at time ``t``.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    vals = lam**alpha * _interp(u, lam**beta * u.grid.x)
    return Field(u.grid, vals, u.time if time is None else time, u.frame)


def shift(u: Field, dx_shift: float) -> Field:
    """``x -> u(x - dx_shift)`` by linear interpolation."""
    return u.with_values(_interp(u, u.grid.x - dx_shift))


# --------------------------------------------------------------------------
# decay regression


@dataclass
class DecayReport:
    quantity: str
    p: float | None
    fitted_slope: float
    target_slope: float
    relative_error: float
    window: tuple[float, float]
    verdict: bool
    samples: list[tuple[float, float]] = field(repr=False)
    tolerance: float = 0.1
    notes: str = ""

    def to_dict(self) -> dict:
        p = self.p
        return {
            "quantity": self.quantity,
            "p": "inf" if p == INF else p,
            "fitted_slope": self.fitted_slope,
            "target_slope": self.target_slope,
            "rel_error": self.relative_error,
            "window": list(self.window),
            "verdict": "pass" if self.verdict else "fail",
            "n_samples": len(self.samples),
            "tolerance": self.tolerance,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def _window_samples(samples, window, log_time: bool):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidSamples("samples must be (t, value) pairs")
    t, v = arr[:, 0], arr[:, 1]
    if window is None:
        t_end = t.max()
        window = (t_end / 10.0, t_end) if log_time else (t_end - math.log(10.0), t_end)
    lo, hi = window
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    t, v = t[sel], v[sel]
    if t.size < 5:
        raise InvalidSamples(f"only {t.size} samples inside window {window}; need 5")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise InvalidSamples("decay fit needs positive finite values")
    span_ok = (t.max() / t.min() >= 10.0 * (1 - 1e-9)) if log_time else (
        t.max() - t.min() >= math.log(10.0) * (1 - 1e-9))
    if not span_ok:
        raise InvalidSamples("fit window must span at least one decade of t")
    return t, v, (float(lo), float(hi))


def _report(name, p, slope, target, tol, window, t, v, notes=""):
    rel = abs(slope - target) / abs(target) if target != 0 else abs(slope)
    return DecayReport(name, p, float(slope), float(target), float(rel), window,
                       bool(rel <= tol), list(zip(t.tolist(), v.tolist())), tol, notes)


def fit_decay(samples, window=None, target: float = -0.5, tolerance: float = 0.1,
              quantity: str = "", p: float | None = None, notes: str = "") -> DecayReport:
    """Least-squares slope of ``log(value)`` against ``log(t)`` inside ``window``
    (default ``[t_end/10, t_end]``); passes iff the relative error is within ``tolerance``."""
    t, v, window = _window_samples(samples, window, log_time=True)
    slope = np.polyfit(np.log(t), np.log(v), 1)[0]
    return _report(quantity, p, slope, target, tolerance, window, t, v, notes)


def fit_exponential_rate(samples, window=None, target: float = 0.5, tolerance: float = 0.1,
                         quantity: str = "", p: float | None = None) -> DecayReport:
    """Decay rate ``r`` of ``value ~ exp(-r s)``; the reported slope is ``r``."""
    t, v, window = _window_samples(samples, window, log_time=False)
    rate = -np.polyfit(t, np.log(v), 1)[0]
    return _report(quantity, p, rate, target, tolerance, window, t, v)


# --------------------------------------------------------------------------
# regimes and attractors


class Regime(enum.Enum):
    LINEAR = "linear"
    STRONGLY_NONLINEAR = "strongly_nonlinear"
    SELF_SIMILAR = "self_similar"
    WEAKLY_NONLINEAR = "weakly_nonlinear"


def classify(q: float, N: int = 1) -> Regime:
    crit = 1.0 + 1.0 / N
    if q == 1:
        return Regime.LINEAR
    if q < 1:
        raise InvalidRegime(f"exponent q={q} below 1 is outside the taxonomy")
    if q < crit:
        return Regime.STRONGLY_NONLINEAR
    if q == crit:
        return Regime.SELF_SIMILAR
    return Regime.WEAKLY_NONLINEAR


@dataclass(frozen=True)
class RegimeSpec:
    """Regime of ``u_t - u_xx = a F(u)_x`` together with its attractor.

    ``velocity`` is the transport speed ``a F'(0)``; attractors are evaluated
    in the frame moving with it.  ``estimated`` marks a custom flux whose
    exponent was measured numerically rather than given.
    """

    q: float
    N: int = 1
    a: float = 1.0
    velocity: float = 0.0
    estimated: bool = False

    @property
    def regime(self) -> Regime:
        return classify(self.q, self.N)

    @classmethod
    def from_nonlinearity(cls, nl: Nonlinearity, N: int = 1) -> "RegimeSpec":
        v = nl.a * nl.drift_b
        if nl.kind is FluxKind.POWER_LAW:
            return cls(nl.q, N, nl.a, v)
        if nl.kind is FluxKind.LINEAR or nl.a == 0:
            return cls(1.0, N, nl.a, v)
        q = nl.small_s_exponent()
        if math.isinf(q):
            return cls(1.0, N, nl.a, v, estimated=True)
        # snap to the critical exponent when the estimate is that close
        crit = 1.0 + 1.0 / N
        if abs(q - crit) < 1e-3:
            q = crit
        return cls(q, N, nl.a, v, estimated=True)

    def gamma(self, p: float) -> float:
        inv = 0.0 if p == INF else 1.0 / p
        if self.regime is Regime.STRONGLY_NONLINEAR:
            return (1.0 - inv) / self.q
        return 0.5 * self.N * (1.0 - inv)

    def attractor(self, x: np.ndarray, t: float, M: float) -> np.ndarray:
        xs = x + self.velocity * t
        reg = self.regime
        if reg in (Regime.LINEAR, Regime.WEAKLY_NONLINEAR) or self.a == 0:
            return M * heat_kernel(xs, t)
        if reg is Regime.SELF_SIMILAR:
            st = math.sqrt(t)
            return burgers_profile(M, xs / st, self.a) / st
        if M <= 0:
            raise InvalidRegime("the N-wave attractor needs positive mass")
        return NWave(self.q, M, self.a)(xs, t)

    def describe(self) -> dict:
        return {"q": self.q, "N": self.N, "a": self.a, "velocity": self.velocity,
                "regime": self.regime.value, "estimated_exponent": self.estimated}


@dataclass
class AttractorCurve:
    t: np.ndarray
    distance: np.ndarray
    scaled: np.ndarray
    t0: float
    p: float

    def final_decade(self) -> np.ndarray:
        return self.scaled[self.t >= self.t.max() / 10.0 * (1 - 1e-12)]

    def decreasing_over_final_decade(self, slack: float = 0.02) -> bool:
        d = self.final_decade()
        return bool(np.all(d[1:] <= d[:-1] * (1.0 + slack)))

    def to_csv(self, path) -> None:
        write_columns(path, {"t": self.t, "distance": self.distance, "scaled_distance": self.scaled})


def _fit_origin(field: Field, spec: RegimeSpec, M: float) -> float:
    t1 = field.time
    x = field.grid.x

    def cost(t0):
        return _lp(field.values - spec.attractor(x, t1 + t0, M), field.grid.dx, 2)

    res = minimize_scalar(cost, bounds=(-0.999 * t1, 10.0 * (t1 + 1.0)), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def _check_consistent(traj: Trajectory, spec: RegimeSpec) -> float:
    M = traj.mass0
    masses = traj.series("mass")
    if np.any(np.abs(masses - M) > 1e-6 * (1.0 + abs(M))):
        raise InvalidRegime("trajectory mass is not constant")
    cfg = traj.config
    if cfg is not None:
        nl = cfg.nonlinearity
        if nl.kind is FluxKind.POWER_LAW and (nl.q != spec.q or nl.a != spec.a):
            raise InvalidRegime(f"trajectory has q={nl.q}, a={nl.a}; regime has q={spec.q}, a={spec.a}")
        if cfg.frame is not Frame.PHYSICAL:
            raise InvalidRegime("attractor distances are measured in the physical frame")
    return M


def attractor_distance(traj: Trajectory, spec: RegimeSpec, p: float,
                       t0: float | None = None, t_min: float = 0.0) -> AttractorCurve:
    """``t^gamma(p) ||u(t) - attractor(t + t0)||_p`` for every snapshot with ``t > t_min``.

    Without ``t0`` the origin shift is chosen by least squares on the first
    compared snapshot and then held fixed.
    """
    M = _check_consistent(traj, spec)
    snaps = [s for s in traj.snapshots if s.time > max(t_min, 0.0)]
    if not snaps:
        raise InvalidRegime("no snapshots after t_min")
    if t0 is None:
        t0 = _fit_origin(snaps[0].field, spec, M)
    g = spec.gamma(p)
    ts, ds = [], []
    for s in snaps:
        f = s.field
        diff = f.values - spec.attractor(f.grid.x, s.time + t0, M)
        ts.append(s.time)
        ds.append(_lp(diff, f.grid.dx, p))
    t = np.array(ts)
    d = np.array(ds)
    return AttractorCurve(t, d, t**g * d, t0, p)


def weak_rate_target(q: float, N: int = 1) -> tuple[float, float, str]:
    """Target slope, tolerance and note for the weakly nonlinear correction rate."""
    if not q > 1.0 + 1.0 / N:
        raise InvalidRegime(f"q={q} is not weakly nonlinear for N={N}")
    upper = 1.0 + 2.0 / N
    if q > upper:
        return -0.5, 0.15, ""
    if q == upper:
        return -0.5, 0.20, "log-corrected case: values divided by log(t+2) before the fit"
    return -(N * (q - 1.0) - 1.0) / 2.0, 0.15, ""


def weak_rate_check(traj: Trajectory, q: float, p: float, N: int = 1,
                    window=None) -> DecayReport:
    """Decay of ``t^{(N/2)(1-1/p)} ||u(t) - M G(t)||_p`` against the three-case rate."""
    target, tol, note = weak_rate_target(q, N)
    cfg = traj.config
    if cfg is not None and cfg.nonlinearity.kind is FluxKind.POWER_LAW and cfg.nonlinearity.q != q:
        raise InvalidRegime("trajectory was computed with a different exponent")
    M = traj.mass0
    gamma = 0.5 * N * (1.0 - (0.0 if p == INF else 1.0 / p))
    log_case = q == 1.0 + 2.0 / N
    samples = []
    for s in traj.snapshots:
        if s.time <= 0:
            continue
        f = s.field
        d = _lp(f.values - M * heat_kernel(f.grid.x, s.time), f.grid.dx, p)
        if log_case:
            d /= math.log(s.time + 2.0)
        samples.append((s.time, s.time**gamma * d))
    return fit_decay(samples, window, target, tol, f"weak_rate_q{q:g}", p, note)


def drift_extract_and_shift(traj: Trajectory, nl: Nonlinearity) -> tuple[Trajectory, Nonlinearity]:
    """Resample every snapshot in the frame moving with ``a F'(0)``.

    Returns the shifted trajectory and the reduced nonlinearity
    ``H(s) = F(s) - F'(0) s`` that governs it.
    """
    b = nl.drift_b
    v = nl.a * b
    if nl.kind is FluxKind.LINEAR:
        reduced = Nonlinearity.none()
    elif b == 0:
        reduced = nl
    else:
        reduced = Nonlinearity.custom(lambda s: nl.F(s) - b * s,
                                      lambda s: nl.dF(s) - b, a=nl.a)
    if v == 0:
        return traj, reduced
    snaps = []
    for s in traj.snapshots:
        f = s.field
        moved = f.with_values(_interp(f, f.grid.x - v * s.time))
        lost = abs(_trapz(moved.values, f.grid.dx) - s.mass)
        if lost > 1e-6 * (1.0 + abs(s.mass)):
            raise DomainTooSmall(f"shift {v * s.time:g} at t={s.time:g} leaves the grid")
        snaps.append(Snapshot.of(moved))
    cfg = replace(traj.config, nonlinearity=reduced) if traj.config is not None else None
    return Trajectory(snaps, cfg, traj.mass0, traj.restarts), reduced


# --------------------------------------------------------------------------
# strong-regime monitors


def entropy_excess(f: Field, q: float) -> float:
    """``max_i d/dx(u^{q-1}) - 1/t`` with one-sided cell differences (0 if satisfied)."""
    z = np.clip(f.values, 0.0, None) ** (q - 1.0)
    slope = np.diff(z) / f.grid.dx
    return max(0.0, float(slope.max()) - 1.0 / f.time)


def max_entropy_slope(f: Field, q: float) -> float:
    z = np.clip(f.values, 0.0, None) ** (q - 1.0)
    return float((np.diff(z) / f.grid.dx).max())


def sup_bound_ratio(f: Field, q: float, M: float, a: float | None = None) -> float:
    """``||u(t)||_inf`` over the bound ``(q M / ((q-1) t))^{1/q}`` (N-wave peak)."""
    return float(np.max(np.abs(f.values))) / NWave(q, M, a).sup(f.time)
