"""Named experiment presets.

Each preset builds its runs from a handful of overridable parameters, runs
the solver and the matching diagnostics, and returns a :class:`ScenarioResult`
with pass/fail checks, decay reports and two-column plot data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .core import (
    INF,
    Field,
    Frame,
    Grid1D,
    InitialData,
    Nonlinearity,
    RunConfig,
    Scheme,
    _lp,
    log_times,
    make_initial,
)
from .diagnostics import (
    DecayReport,
    Regime,
    RegimeSpec,
    attractor_distance,
    classify,
    drift_extract_and_shift,
    entropy_excess,
    fit_decay,
    fit_exponential_rate,
    max_entropy_slope,
    sup_bound_ratio,
    weak_rate_check,
)
from .errors import InvalidConfig
from .exact import NWave, burgers_exact, burgers_profile, heat_kernel, linear_convection_solution
from .solver import (
    CONVECTION_CFL,
    DIFFUSION_CFL,
    Trajectory,
    contraction_pair,
    is_non_increasing,
    is_strictly_decreasing_windows,
    run,
)
from .spectral import (
    WeightedBasis,
    eigen_residual,
    evolve_spectral,
    k_norm,
    project,
    reconstruct,
)

P_VALUES = (1.0, 2.0, INF)


def p_label(p: float) -> str:
    return "inf" if p == INF else f"{p:g}"


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Check:
    """One scalar verdict: ``value`` compared against ``limit``."""

    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _json_float(self.value), "limit": _json_float(self.limit),
                "verdict": "pass" if self.passed else "fail", "detail": self.detail}


def _json_float(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def below(name, value, limit, detail="") -> Check:
    return Check(name, float(value), float(limit), bool(value < limit), detail)


def at_most(name, value, limit, detail="") -> Check:
    return Check(name, float(value), float(limit), bool(value <= limit), detail)


def holds(name, ok: bool, detail="") -> Check:
    return Check(name, 1.0 if ok else 0.0, 1.0, bool(ok), detail)


@dataclass
class ScenarioResult:
    name: str
    anchor: dict
    params: dict
    checks: list[Check] = field(default_factory=list)
    reports: list[DecayReport] = field(default_factory=list)
    plots: dict[str, tuple[np.ndarray, np.ndarray, str, str]] = field(default_factory=dict)
    configs: dict[str, dict] = field(default_factory=dict)
    trajectory: Trajectory | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(r.verdict for r in self.reports)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def report(self, quantity: str, p: float | None = None) -> DecayReport:
        for r in self.reports:
            if r.quantity == quantity and (p is None or r.p == p):
                return r
        raise KeyError((quantity, p))

    def to_dict(self) -> dict:
        return {
            "scenario": self.name,
            "anchor": self.anchor,
            "config": {"parameters": self.params, "runs": self.configs},
            "checks": [c.to_dict() for c in self.checks],
            "decay_reports": [r.to_dict() for r in self.reports],
            "verdict": "pass" if self.passed else "fail",
        }

    def write_plots(self, out_dir: Path) -> None:
        plots = Path(out_dir) / "plots"
        plots.mkdir(parents=True, exist_ok=True)
        for name, (x, y, xl, yl) in sorted(self.plots.items()):
            data = np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
            np.savetxt(plots / f"{name}.dat", data, fmt="%.17g", header=f"{xl} {yl}")


# --------------------------------------------------------------------------
# presets


@dataclass(frozen=True)
class Preset:
    label: str
    statement: str
    defaults: dict
    runner: Callable[[dict], ScenarioResult]


@dataclass(frozen=True)
class Scenario:
    """A preset name plus partial overrides of its parameters."""

    name: str
    overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in PRESETS:
            raise InvalidConfig(f"unknown scenario {self.name!r}; choose from {', '.join(PRESETS)}")
        preset = PRESETS[self.name]
        unknown = set(self.overrides) - set(preset.defaults)
        if unknown:
            raise InvalidConfig(f"scenario {self.name} has no parameter(s) {sorted(unknown)}")

    def resolve(self) -> dict:
        params = dict(PRESETS[self.name].defaults)
        params.update({k: v for k, v in self.overrides.items() if v is not None})
        for k in ("dt", "t_end"):
            if k in params and params[k] is not None and not params[k] > 0:
                raise InvalidConfig(f"{k} must be positive")
        if "n" in params and params["n"] is not None and int(params["n"]) < 8:
            raise InvalidConfig("n must be at least 8")
        return params

    def execute(self) -> ScenarioResult:
        preset = PRESETS[self.name]
        params = self.resolve()
        res = preset.runner(params)
        res.name = self.name
        res.anchor = {"label": preset.label, "statement": preset.statement}
        res.params = params
        return res


def _result(params) -> ScenarioResult:
    return ScenarioResult("", {}, dict(params))


def _times_with(lo, hi, count, *extra) -> tuple[float, ...]:
    return tuple(sorted(set(log_times(lo, hi, count)) | {float(e) for e in extra}))


def _scaled_heat_distance(traj: Trajectory, p: float, M: float):
    g = 0.5 * (1.0 - (0.0 if p == INF else 1.0 / p))
    out = []
    for s in traj.snapshots:
        if s.time <= 0:
            continue
        f = s.field
        out.append((s.time, s.time**g * _lp(f.values - M * heat_kernel(f.grid.x, s.time), f.grid.dx, p)))
    return np.array(out)


def _stable_dt(dx: float, smax: float, cap: float) -> float:
    """Half the convective limit, capped."""
    return cap if smax == 0 else min(cap, 0.5 * CONVECTION_CFL * dx / smax)


# ---- heat ------------------------------------------------------------------


def heat_oracle(n: int, dt: float, t: float = 1.0, half_width: float = 20.0) -> float:
    """Sup error of the linear solver against ``G(x, t + 1/2)`` from unit Gaussian data."""
    g = Grid1D(-half_width, half_width, n)
    cfg = RunConfig(g, Nonlinearity.none(), InitialData.gaussian(1.0, 1.0), t_end=t, dt=dt,
                    snapshot_times=(t,))
    tr = run(cfg)
    f = tr.snapshots[-1].field
    return float(np.max(np.abs(f.values - heat_kernel(g.x, t + 0.5))))


def _heat_asymptotics(p: dict) -> ScenarioResult:
    res = _result(p)
    n, dt = int(p["n"]), float(p["dt"])
    e1 = heat_oracle(n, dt)
    e2 = heat_oracle(2 * n - 1, dt / 2)
    order = math.log2(e1 / e2)
    res.checks.append(below("oracle_sup_error", e1, 1e-5, f"n={n}, dt={dt:g}, t=1"))
    res.checks.append(Check("oracle_order", order, 2.0, 1.8 <= order <= 2.2, "accepted range [1.8, 2.2]"))

    times = (1.0, 4.0, 16.0, float(p["t_end"]))
    g = Grid1D(-40.0, 40.0, n + 1 if n % 2 == 0 else n)
    cfg = RunConfig(g, Nonlinearity.none(), InitialData.well(p["mass"], 2.0, 0.5), t_end=times[-1],
                    dt=dt, snapshot_times=times, grow_domain=True)
    tr = run(cfg)
    res.trajectory = tr
    res.configs["asymptotics"] = cfg.describe()
    for q in P_VALUES:
        d = _scaled_heat_distance(tr, q, tr.mass0)
        lab = p_label(q)
        res.plots[f"scaled_distance_p{lab}"] = (d[:, 0], d[:, 1], "t", "scaled_distance")
        strictly = bool(np.all(np.diff(d[:, 1]) < 0))
        res.checks.append(holds(f"strictly_decreasing_p{lab}", strictly))
        res.checks.append(below(f"final_over_initial_p{lab}", d[-1, 1] / d[0, 1], 0.15))
    res.checks.append(_mass_check(tr))
    return res


def _mass_check(tr: Trajectory) -> Check:
    return at_most("mass_drift", tr.max_mass_drift(), 1e-8 * (1.0 + abs(tr.mass0)))


# ---- linear convection ------------------------------------------------------


def _linear_convection(p: dict) -> ScenarioResult:
    res = _result(p)
    a = 1.0
    nl = Nonlinearity.linear(a)
    T = float(p["t_end"])
    half = 12.0 * math.sqrt(T + 1.0) + a * T + 10.0
    g = Grid1D(-half, half, int(p["n"]))
    times = _times_with(1.0, T, 11, T / 10.0)
    cfg = RunConfig(g, nl, InitialData.gaussian(p["mass"], 1.0), t_end=T, dt=float(p["dt"]),
                    snapshot_times=times)
    tr = run(cfg)
    res.trajectory = tr
    res.configs["main"] = cfg.describe()
    u0 = make_initial(cfg.initial, g)
    errs = []
    for s in tr.snapshots[1:]:
        ex = linear_convection_solution(u0, a, s.time)
        errs.append((s.time, _lp(s.field.values - ex.values, g.dx, 1)))
    errs = np.array(errs)
    res.plots["l1_error_vs_exact"] = (errs[:, 0], errs[:, 1], "t", "l1_error")
    res.checks.append(below("l1_error_vs_exact", errs[:, 1].max(), 1e-4))

    moved, reduced = drift_extract_and_shift(tr, nl)
    spec = RegimeSpec.from_nonlinearity(reduced)
    curve = attractor_distance(moved, spec, 1.0, t0=0.0, t_min=0.5)
    res.plots["moving_frame_distance_p1"] = (curve.t, curve.scaled, "t", "scaled_distance")
    res.checks.append(holds("moving_frame_distance_decreasing", curve.decreasing_over_final_decade()))
    res.checks.append(_mass_check(tr))
    return res


# ---- Burgers / Hopf-Cole ------------------------------------------------------


def burgers_error(n: int, dt: float, T: float, mass: float = 1.0) -> tuple[float, Trajectory]:
    """L1 distance between the IMEX solver and the Hopf-Cole solution at ``T``."""
    half = max(20.0, 8.0 + 12.0 * math.sqrt(T))
    g = Grid1D(-half, half, n)
    nl = Nonlinearity.power_law(2.0, 1.0)
    cfg = RunConfig(g, nl, InitialData.gaussian(mass, 1.0), t_end=T, dt=dt, snapshot_times=(T,))
    tr = run(cfg)
    exact = burgers_exact(make_initial(cfg.initial, g), T)
    return _lp(tr.snapshots[-1].field.values - exact.values, g.dx, 1), tr


def _burgers_hopfcole(p: dict) -> ScenarioResult:
    res = _result(p)
    T = float(p["t_end"])
    err, tr = burgers_error(int(p["n"]), float(p["dt"]), T, float(p["mass"]))
    res.trajectory = tr
    res.configs["main"] = tr.config.describe()
    limit = 1e-4 if T <= 1.0 else 1e-3
    res.checks.append(below("l1_error_vs_hopf_cole", err, limit, f"t={T:g}"))
    f = tr.snapshots[-1].field
    exact = burgers_exact(make_initial(tr.config.initial, f.grid), T)
    res.plots["solution_vs_exact"] = (f.grid.x, f.values, "x", "u")
    res.plots["hopf_cole_exact"] = (f.grid.x, exact.values, "x", "u_exact")
    res.checks.append(_mass_check(tr))
    return res


# ---- similarity frame and spectral basis ------------------------------------


def similarity_run(v0: Field, nl: Nonlinearity, dt: float, s_end: float,
                   times=None) -> Trajectory:
    cfg = RunConfig(v0.grid, nl, InitialData.gaussian(), t_end=s_end, dt=dt, frame=Frame.SIMILARITY,
                    snapshot_times=tuple(times) if times is not None else (s_end,))
    return run(cfg, v0)


def _similarity_spectral(p: dict) -> ScenarioResult:
    res = _result(p)
    fine = WeightedBasis(Grid1D(-15.0, 15.0, 6001), 16)
    for l in range(1, 7):
        res.checks.append(below(f"eigen_residual_l{l}", eigen_residual(fine, l), 1e-4))

    s_end = float(p["t_end"])
    g = Grid1D(-15.0, 15.0, int(p["n"]))
    basis = WeightedBasis(g, 16)
    v0 = make_initial(InitialData.gaussian(p["mass"], 1.0, 0.5), g, 0.0, Frame.SIMILARITY)
    tr = similarity_run(v0, Nonlinearity.none(), float(p["dt"]), s_end)
    res.trajectory = tr
    res.configs["timestepper"] = tr.config.describe()
    spec = reconstruct(evolve_spectral(project(v0, basis), s_end), basis, s_end)
    gap = _lp(tr.snapshots[-1].field.values - spec.values, g.dx, 1)
    res.checks.append(below("spectral_vs_timestepper_l1", gap, 1e-5, f"s={s_end:g}"))
    res.plots["spectral_profile"] = (g.x, spec.values, "y", "v")

    # zero-mass data: the first mode vanishes and the K-norm decays like exp(-s/2)
    d0 = make_initial(InitialData.dipole(1.0, 1.0), g, 0.0, Frame.SIMILARITY)
    times = np.linspace(0.5, 0.5 + 2 * math.log(10.0), 13)
    trd = similarity_run(d0, Nonlinearity.none(), float(p["dt"]), float(times[-1]), times)
    samples = [(s.time, k_norm(s.field)) for s in trd.snapshots[1:]]
    rep = fit_exponential_rate(samples, None, 0.5, 0.1, "zero_mass_k_norm_rate")
    res.reports.append(rep)
    arr = np.array(samples)
    res.plots["zero_mass_k_norm"] = (arr[:, 0], arr[:, 1], "s", "k_norm")
    return res


# ---- decay laws -------------------------------------------------------------


def _decay_suite(p: dict) -> ScenarioResult:
    res = _result(p)
    T = float(p["t_end"])
    n, dt = int(p["n"]), float(p["dt"])
    times = _times_with(1.0, T, 21, T / 10.0)

    dip = RunConfig(Grid1D(-20.0, 20.0, n), Nonlinearity.none(), InitialData.dipole(), t_end=T, dt=dt,
                    snapshot_times=times, grow_domain=True)
    trd = run(dip)
    res.configs["dipole"] = dip.describe()
    samples = [(s.time, s.linf) for s in trd.snapshots[1:]]
    res.reports.append(fit_decay(samples, None, -1.0, 0.1, "zero_mass_sup_norm", INF))
    arr = np.array(samples)
    res.plots["zero_mass_sup_norm"] = (arr[:, 0], arr[:, 1], "t", "sup_norm")

    qs = (2.0, 3.0) if p["q"] is None else (float(p["q"]),)
    for q in qs:
        nl = Nonlinearity.power_law(q, 1.0)
        cfg = RunConfig(Grid1D(-10.0, 10.0, n), nl, InitialData.gaussian(p["mass"], 1.0), t_end=T,
                        dt=dt, snapshot_times=times, grow_domain=True)
        tr = run(cfg)
        res.trajectory = tr
        res.configs[f"q{q:g}"] = cfg.describe()
        ts = tr.times[1:]
        sup = tr.series("linf")[1:]
        res.reports.append(fit_decay(list(zip(ts, sup)), None, -0.5, 0.1, f"sup_norm_q{q:g}", INF))
        res.plots[f"sup_norm_q{q:g}"] = (ts, sup, "t", "sup_norm")
        if q == 2.0:
            gsup = tr.series("grad_linf")[1:]
            res.reports.append(fit_decay(list(zip(ts, gsup)), None, -1.0, 0.15, "gradient_sup_norm_q2", INF))
            res.plots["gradient_sup_norm_q2"] = (ts, gsup, "t", "gradient_sup_norm")
        res.checks.append(holds(f"l1_non_increasing_q{q:g}", is_non_increasing(tr.series("l1"), 1e-8)))
        res.checks.append(_mass_check(tr))
    return res


# ---- weakly nonlinear -------------------------------------------------------


def weak_trajectory(q: float, T: float = 1000.0, mass: float = 1.0, width: float = 0.2,
                    n: int = 4001, dt: float | None = None, generator: str = "gaussian") -> Trajectory:
    """Run from narrow centered data with a growing (coarsening) domain."""
    nl = Nonlinearity.power_law(q, 1.0)
    g = Grid1D(-8.0, 8.0, n)
    init = _generator(generator, mass, width)
    u0 = make_initial(init, g)
    if dt is None:
        dt = _stable_dt(g.dx, float(np.max(np.abs(nl.speed(u0.values)))), 2e-3)
    times = _times_with(1.0, T, 21, T / 10.0, T / 100.0)
    cfg = RunConfig(g, nl, init, t_end=T, dt=dt, snapshot_times=times, grow_domain=True)
    return run(cfg, u0)


def _generator(name: str, mass: float, width: float) -> InitialData:
    if name == "gaussian":
        return InitialData.gaussian(mass, width)
    if name == "box":
        return InitialData.box(mass, 2.0 * width)
    raise InvalidConfig(f"unknown generator {name!r}; use gaussian or box")


def _weak_nonlinear(p: dict) -> ScenarioResult:
    res = _result(p)
    q = float(p["q"])
    if classify(q) is not Regime.WEAKLY_NONLINEAR:
        raise InvalidConfig(f"q={q:g} is not in the weakly nonlinear range q > 2")
    tr = weak_trajectory(q, float(p["t_end"]), float(p["mass"]), n=int(p["n"]), dt=p["dt"])
    res.trajectory = tr
    res.configs["main"] = tr.config.describe()
    for pp in P_VALUES:
        rep = weak_rate_check(tr, q, pp)
        res.reports.append(rep)
        arr = np.array(rep.samples)
        res.plots[f"weak_rate_p{p_label(pp)}"] = (arr[:, 0], arr[:, 1], "t", "scaled_distance")
    res.checks.append(_mass_check(tr))
    return res


# ---- critical (Burgers) regime ---------------------------------------------


def burgers_attractor_trajectory(mass: float = 1.0, width: float = 0.5, T: float = 100.0,
                                 n: int = 2049, dt: float = 2e-3) -> Trajectory:
    cfg = RunConfig(Grid1D(-8.0, 8.0, n), Nonlinearity.power_law(2.0, 1.0),
                    InitialData.gaussian(mass, width), t_end=T, dt=dt,
                    snapshot_times=_times_with(1.0, T, 21), grow_domain=True)
    return run(cfg)


def similarity_profile(M: float, n: int = 1501, dt: float = 0.01, s_end: float = 25.0) -> Field:
    """Long-time state of the similarity-frame Burgers equation from Gaussian data of mass ``M``."""
    g = Grid1D(-15.0, 15.0, n)
    v0 = make_initial(InitialData.gaussian(M, 1.0), g, 0.0, Frame.SIMILARITY)
    return similarity_run(v0, Nonlinearity.power_law(2.0, 1.0), dt, s_end).snapshots[-1].field


def _self_similar_critical(p: dict) -> ScenarioResult:
    res = _result(p)
    M = float(p["mass"])
    tr = burgers_attractor_trajectory(M, 0.5, float(p["t_end"]), int(p["n"]), float(p["dt"]))
    res.trajectory = tr
    res.configs["physical"] = tr.config.describe()
    spec = RegimeSpec.from_nonlinearity(tr.config.nonlinearity)
    for pp in (1.0, INF):
        c = attractor_distance(tr, spec, pp, t_min=0.5)
        lab = p_label(pp)
        res.plots[f"attractor_distance_p{lab}"] = (c.t, c.scaled, "t", "scaled_distance")
        res.checks.append(holds(f"attractor_distance_decreasing_p{lab}", is_non_increasing(c.scaled, 0.0),
                                f"origin shift t0={c.t0:.6g}"))
        if pp == 1.0:
            res.checks.append(below("attractor_distance_final_p1", c.scaled[-1], 1e-2))
    res.checks.append(_mass_check(tr))

    profiles = {}
    for m in sorted({0.5, 1.0, 2.0, M}):
        v = similarity_profile(m)
        profiles[m] = v
        exact = burgers_profile(m, v.grid.x)
        res.checks.append(below(f"steady_state_l1_M{m:g}", _lp(v.values - exact, v.grid.dx, 1), 1e-4, "s=25"))
    y = profiles[M].grid.x
    res.plots["steady_profile"] = (y, profiles[M].values, "y", "f")
    res.plots["closed_form_profile"] = (y, burgers_profile(M, y), "y", "f")
    pos = all(np.all(profiles[m].values[1:-1] > 0) for m in (0.5, 1.0, 2.0))
    mono = bool(np.all(profiles[0.5].values <= profiles[1.0].values)
                and np.all(profiles[1.0].values <= profiles[2.0].values))
    res.checks.append(holds("profiles_positive", pos))
    res.checks.append(holds("profiles_monotone_in_mass", mono))
    return res


# ---- strongly nonlinear -----------------------------------------------------


def strong_trajectory(q: float = 1.5, M: float = 1000.0, T: float = 200.0, dx: float = 0.1,
                      width: float = 1.0, count: int = 21) -> Trajectory:
    """Upwind run of ``u_t - u_xx = -(1/q) (u^q)_x`` on a grid wide enough for the
    N-wave support and the diffusive tails up to ``T``."""
    a = -1.0 / q
    nl = Nonlinearity.power_law(q, a)
    r = NWave(q, M, a).r(T)
    spread = 12.0 * math.sqrt(T)
    lo, hi = -(10.0 * width + spread), r + 20.0 + spread
    n = int(math.ceil((hi - lo) / dx)) + 1
    g = Grid1D.with_spacing(lo, dx, n)
    init = InitialData.gaussian(M, width)
    u0 = make_initial(init, g)
    smax = float(np.max(np.abs(nl.speed(u0.values))))
    dt = min(DIFFUSION_CFL * dx * dx, 0.9 / (2.0 / dx**2 + smax / dx))
    times = _times_with(1.0, T, count, T / 10.0)
    cfg = RunConfig(g, nl, init, t_end=T, dt=dt, scheme=Scheme.UPWIND_EXPLICIT, snapshot_times=times)
    return run(cfg, u0)


def entropy_excess_max(tr: Trajectory, q: float, t_min: float = 1.0) -> float:
    return max(entropy_excess(s.field, q) for s in tr.snapshots if s.time >= t_min)


def _nwave_strong(p: dict) -> ScenarioResult:
    res = _result(p)
    q = float(p["q"])
    if classify(q) is not Regime.STRONGLY_NONLINEAR:
        raise InvalidConfig(f"q={q:g} is not in the strongly nonlinear range 1 < q < 2")
    M, T, dx = float(p["mass"]), float(p["t_end"]), float(p["dx"])
    tr = strong_trajectory(q, M, T, dx)
    res.trajectory = tr
    res.configs["main"] = tr.config.describe()
    nl = tr.config.nonlinearity
    Mb = tr.mass0
    ts = tr.times[1:]
    sup = tr.series("linf")[1:]
    res.reports.append(fit_decay(list(zip(ts, sup)), None, -1.0 / q, 0.1, "sup_norm_strong", INF))
    res.plots["sup_norm"] = (ts, sup, "t", "sup_norm")

    ratios = np.array([sup_bound_ratio(s.field, q, Mb, nl.a) for s in tr.snapshots[1:]])
    res.plots["sup_over_bound"] = (ts, ratios, "t", "ratio")
    res.checks.append(at_most("sup_bound_ratio_max", ratios.max(), 1.02))

    slope_t = np.array([max_entropy_slope(s.field, q) * s.time for s in tr.snapshots[1:]])
    res.plots["entropy_slope_times_t"] = (ts, slope_t, "t", "t_max_slope")
    t_ref = min(T, 10.0)
    coarse = strong_trajectory(q, M, t_ref, dx, count=9)
    fine = strong_trajectory(q, M, t_ref, dx / 2, count=9)
    e_c, e_f = entropy_excess_max(coarse, q), entropy_excess_max(fine, q)
    res.checks.append(at_most("entropy_excess_main", entropy_excess_max(tr, q), e_c + 1e-12,
                              "max over t>=1 of max d/dx(u^(q-1)) - 1/t, bounded by the coarse value"))
    res.checks.append(at_most("entropy_excess_refined", e_f, 0.5 * e_c + 1e-12,
                              f"coarse dx={dx:g}: {e_c:.3g}; fine dx={dx / 2:g}: {e_f:.3g}; "
                              f"max t*slope={slope_t.max():.6g}"))

    spec = RegimeSpec.from_nonlinearity(nl)
    curve = attractor_distance(tr, spec, 1.0, t0=0.0, t_min=0.5)
    res.plots["nwave_distance_p1"] = (curve.t, curve.scaled, "t", "l1_distance")
    res.checks.append(holds("nwave_distance_decreasing", is_non_increasing(curve.scaled, 0.0)))
    res.checks.append(below("nwave_distance_final_over_initial", curve.scaled[-1] / curve.scaled[0], 0.3))
    res.checks.append(_mass_check(tr))
    return res


# ---- contraction ------------------------------------------------------------


CONTRACTION_PAIRS = (
    ("equal_mass_gaussian_vs_box", InitialData.gaussian(1.0, 1.0), InitialData.box(1.0, 2.0)),
    ("ordered_gaussians", InitialData.gaussian(2.0, 1.0), InitialData.gaussian(1.0, 1.0)),
    ("mixed_vs_negative", InitialData.mixed(1.0), InitialData.gaussian(-0.5, 1.5)),
)
STRICT_PAIR = "equal_mass_gaussian_vs_box"


def contraction_config(q: float = 2.0, T: float = 5.0, n: int = 801, dt: float | None = None) -> RunConfig:
    g = Grid1D(-20.0, 20.0, n)
    dt = DIFFUSION_CFL * g.dx**2 if dt is None else dt
    steps = max(1, int(round(T / dt)))
    return RunConfig(g, Nonlinearity.power_law(q, 1.0), InitialData.gaussian(), t_end=steps * dt, dt=dt,
                     scheme=Scheme.UPWIND_EXPLICIT, cadence=1)


def _contraction_suite(p: dict) -> ScenarioResult:
    res = _result(p)
    cfg = contraction_config(float(p["q"]), float(p["t_end"]), int(p["n"]), p["dt"])
    res.configs["pairs"] = cfg.describe()
    g = cfg.grid
    for name, a, b in CONTRACTION_PAIRS:
        out = np.array(contraction_pair(cfg, make_initial(a, g), make_initial(b, g)))
        res.plots[f"l1_gap_{name}"] = (out[:, 0], out[:, 1], "t", "l1_gap")
        res.checks.append(holds(f"non_increasing_{name}", is_non_increasing(out[:, 1], 1e-8)))
        if name == STRICT_PAIR:
            res.checks.append(holds(f"strict_windows_{name}", is_strictly_decreasing_windows(out[:, 1], 10)))
    return res


# --------------------------------------------------------------------------
# registry


PRESETS: dict[str, Preset] = {
    "heat-asymptotics": Preset(
        "linear diffusive asymptotics",
        "t^((1-1/p)/2) ||u(t) - M G(t)||_p -> 0 for integrable data of mass M",
        {"n": 4096, "dt": 0.01, "t_end": 64.0, "mass": 1.0},
        _heat_asymptotics,
    ),
    "linear-convection": Preset(
        "linear transport plus diffusion",
        "u(t) is the heat kernel solution translated with speed a F'(0)",
        {"n": 4097, "dt": 0.01, "t_end": 10.0, "mass": 1.0},
        _linear_convection,
    ),
    "burgers-hopfcole": Preset(
        "viscous Burgers via Hopf-Cole",
        "w = exp(int u) solves the heat equation, u = w_x / w",
        {"n": 2048, "dt": 0.002, "t_end": 1.0, "mass": 1.0},
        _burgers_hopfcole,
    ),
    "similarity-spectral": Preset(
        "similarity variables and weighted spectral basis",
        "L v = -v'' - y v'/2 has eigenvalues l/2 in L^2(exp(y^2/4)); zero-mass data decay like exp(-s/2)",
        {"n": 3001, "dt": 0.01, "t_end": 5.0, "mass": 1.0},
        _similarity_spectral,
    ),
    "decay-suite": Preset(
        "norm decay laws",
        "||u(t)||_inf ~ t^(-1/2), ||u_x(t)||_inf ~ t^(-1) for q >= 2; zero-mass data decay one order faster",
        {"n": 2049, "dt": 0.002, "t_end": 100.0, "mass": 1.0, "q": None},
        _decay_suite,
    ),
    "weak-nonlinear": Preset(
        "weakly nonlinear convection",
        "||u(t) - M G(t)|| decays like t^(-1/2), t^(-1/2) log t or t^(-(q-2)/2) relative to the linear rate",
        {"n": 4001, "dt": None, "t_end": 1000.0, "mass": 1.0, "q": 3.0},
        _weak_nonlinear,
    ),
    "self-similar-critical": Preset(
        "critical exponent q = 1 + 1/N",
        "u(t) approaches the self-similar Burgers solution u_M; its profile f_M is positive and increasing in M",
        {"n": 2049, "dt": 0.002, "t_end": 100.0, "mass": 1.0},
        _self_similar_critical,
    ),
    "nwave-strong": Preset(
        "strongly nonlinear convection",
        "for 1 < q < 2, u(t) approaches the N-wave; ||u(t)||_inf ~ t^(-1/q) and d/dx(u^(q-1)) <= 1/t",
        {"dx": 0.1, "t_end": 200.0, "mass": 1000.0, "q": 1.5},
        _nwave_strong,
    ),
    "contraction-suite": Preset(
        "L1 contraction",
        "||u(t) - v(t)||_1 is non-increasing for any two solutions",
        {"n": 801, "dt": None, "t_end": 5.0, "q": 2.0},
        _contraction_suite,
    ),
}

SCENARIO_NAMES = tuple(PRESETS)


# --------------------------------------------------------------------------
# sweep cells


def regime_reports(q: float, ps=P_VALUES, generator: str = "gaussian") -> list[DecayReport]:
    """Decay reports for one exponent at every ``p`` in ``ps``.

    Weakly nonlinear exponents get the correction-rate check; otherwise the
    norm ``||u(t)||_p`` is fitted against ``-gamma(p)`` of its regime.
    """
    reg = classify(q)
    if reg is Regime.WEAKLY_NONLINEAR:
        tr = weak_trajectory(q, generator=generator)
        return [weak_rate_check(tr, q, p) for p in ps]
    if reg is Regime.STRONGLY_NONLINEAR:
        tr = strong_trajectory(q) if generator == "gaussian" else _strong_box(q)
        spec = RegimeSpec(q, 1, -1.0 / q)
    elif reg is Regime.SELF_SIMILAR:
        tr = burgers_attractor_trajectory(width=1.0) if generator == "gaussian" else _run_box(q)
        spec = RegimeSpec(q, 1, 1.0)
    else:
        raise InvalidConfig("sweep exponents must satisfy q > 1")
    out = []
    for p in ps:
        samples = [(s.time, _lp(s.field.values, s.field.grid.dx, p)) for s in tr.snapshots[1:]]
        out.append(fit_decay(samples, None, -spec.gamma(p), 0.1, f"norm_decay_q{q:g}", p,
                             "target 0 for p=1: tolerance is absolute"))
    return out


def _run_box(q: float) -> Trajectory:
    cfg = RunConfig(Grid1D(-8.0, 8.0, 2049), Nonlinearity.power_law(q, 1.0), InitialData.box(1.0, 2.0),
                    t_end=100.0, dt=2e-3, snapshot_times=_times_with(1.0, 100.0, 21), grow_domain=True)
    return run(cfg)


def _strong_box(q: float) -> Trajectory:
    a = -1.0 / q
    T, dx, M = 200.0, 0.1, 1000.0
    r = NWave(q, M, a).r(T)
    spread = 12.0 * math.sqrt(T)
    g = Grid1D.with_spacing(-(10.0 + spread), dx, int((r + 30.0 + 2 * spread) / dx) + 1)
    nl = Nonlinearity.power_law(q, a)
    init = InitialData.box(M, 2.0)
    u0 = make_initial(init, g)
    smax = float(np.max(np.abs(nl.speed(u0.values))))
    dt = min(DIFFUSION_CFL * dx * dx, 0.9 / (2.0 / dx**2 + smax / dx))
    cfg = RunConfig(g, nl, init, t_end=T, dt=dt, scheme=Scheme.UPWIND_EXPLICIT,
                    snapshot_times=_times_with(1.0, T, 21, T / 10.0))
    return run(cfg, u0)
