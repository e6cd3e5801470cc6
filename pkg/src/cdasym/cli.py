"""Command line entry point.

    cdasym run <scenario> [--n INT] [--dt REAL] [--t-end REAL] [--q REAL] [--mass REAL]
                          [--out DIR] [--config FILE]
    cdasym profile --mass REAL --q REAL [--route closed|dynamical] [--out DIR]
    cdasym sweep --config FILE [--jobs INT] [--out DIR]
    cdasym list

Config files are TOML with optional ``[run]``, ``[profile]`` and ``[sweep]``
tables whose keys mirror the flags (``t_end`` for ``--t-end``).  Flags win
over file values.  Without ``--out`` results go to ``$CDASYM_OUT/<name>``
(default root ``cdasym-out``).

Exit codes: 0 every verdict passed, 1 a verdict failed or the solver gave
up, 2 bad usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import tomli

from .core import INF, Grid1D, InitialData, Frame, Nonlinearity, _lp, _trapz, make_initial, write_columns
from .errors import CdasymError, InvalidConfig
from .exact import burgers_profile
from .scenarios import PRESETS, SCENARIO_NAMES, Scenario, p_label, regime_reports, similarity_run

log = logging.getLogger("cdasym")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cdasym", description="Large-time asymptotics of u_t - u_xx = a F(u)_x")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a named scenario")
    r.add_argument("scenario", nargs="?", help=" | ".join(SCENARIO_NAMES))
    r.add_argument("--n", type=int)
    r.add_argument("--dt", type=float)
    r.add_argument("--t-end", dest="t_end", type=float)
    r.add_argument("--q", type=float)
    r.add_argument("--mass", type=float)
    r.add_argument("--out")
    r.add_argument("--config")

    pr = sub.add_parser("profile", help="self-similar profile f_M")
    pr.add_argument("--mass", type=float)
    pr.add_argument("--q", type=float)
    pr.add_argument("--dim", type=int, default=None, help="space dimension N (only 1)")
    pr.add_argument("--route", choices=("closed", "dynamical"))
    pr.add_argument("--n", type=int)
    pr.add_argument("--out")
    pr.add_argument("--config")

    sw = sub.add_parser("sweep", help="decay-rate table over exponents and norms")
    sw.add_argument("--config")
    sw.add_argument("--jobs", type=int)
    sw.add_argument("--out")

    sub.add_parser("list", help="list scenarios")
    return p


# --------------------------------------------------------------------------
# helpers


def load_config(path: str | None, table: str) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except tomli.TOMLDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    section = data.get(table, {})
    if not isinstance(section, dict):
        raise UsageError(f"{path}: [{table}] must be a table")
    return dict(section)


def merge(file_values: dict, args: argparse.Namespace, keys) -> dict:
    out = dict(file_values)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def output_dir(explicit: str | None, name: str) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get("CDASYM_OUT", "cdasym-out")) / name


def dump_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def _stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# --------------------------------------------------------------------------
# commands


RUN_KEYS = ("n", "dt", "t_end", "q", "mass")


def cmd_run(args) -> int:
    conf = load_config(args.config, "run")
    name = args.scenario or conf.pop("scenario", None)
    conf.pop("scenario", None)
    out_conf = conf.pop("out", None)
    if name is None:
        raise UsageError("run needs a scenario name (argument or [run] scenario = ...)")
    if name not in PRESETS:
        raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}")
    overrides = merge(conf, args, RUN_KEYS)
    try:
        scen = Scenario(name, overrides)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from exc
    out = output_dir(args.out or out_conf, name)
    log.info("running %s -> %s", name, out)
    try:
        res = scen.execute()
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from exc
    except CdasymError as exc:
        report = {"scenario": name, "anchor": _anchor(name), "config": {"parameters": scen.resolve()},
                  "error": f"{type(exc).__name__}: {exc}", "verdict": "fail", "created": _stamp()}
        dump_json(out / "report.json", report)
        print(f"{name}: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if res.trajectory is not None:
        res.trajectory.write(out)
    res.write_plots(out)
    report = res.to_dict()
    report["created"] = _stamp()
    dump_json(out / "report.json", report)
    _print_summary(res)
    return EXIT_OK if res.passed else EXIT_FAIL


def _anchor(name: str) -> dict:
    pre = PRESETS[name]
    return {"label": pre.label, "statement": pre.statement}


def _print_summary(res) -> None:
    for c in res.checks:
        print(f"[{'pass' if c.passed else 'FAIL'}] {res.name}: {c.name} = {c.value:.6g} (limit {c.limit:.6g})")
    for r in res.reports:
        print(f"[{'pass' if r.verdict else 'FAIL'}] {res.name}: {r.quantity} p={p_label(r.p) if r.p else '-'} "
              f"slope {r.fitted_slope:.4f} target {r.target_slope:.4f} (rel err {r.relative_error:.3f})")
    print(f"{res.name}: {'PASS' if res.passed else 'FAIL'}")


def profile_summary(M: float, q: float, route: str = "closed", n: int = 1501) -> tuple[np.ndarray, np.ndarray, dict]:
    """Samples of ``f_M`` on ``[-15, 15]`` and a summary of checks."""
    g = Grid1D(-15.0, 15.0, n)
    y = g.x
    closed = burgers_profile(M, y)
    if route == "closed":
        f = closed
    else:
        v0 = make_initial(InitialData.gaussian(M, 1.0), g, 0.0, Frame.SIMILARITY)
        f = similarity_run(v0, Nonlinearity.power_law(q, 1.0), 0.01, 25.0).snapshots[-1].field.values
    mass = _trapz(f, g.dx)
    mass_ok = abs(mass - M) <= 1e-8 * (1.0 + abs(M))
    if M == 0:
        sign_ok = bool(np.all(f == 0))
    else:
        sign_ok = bool(np.all(np.sign(f[1:-1]) == np.sign(M)))
    # f' + y f / 2 + f^2 = 0 for the closed form
    d1 = np.gradient(f, g.dx)
    resid = float(np.max(np.abs(d1 + 0.5 * y * f + f * f)[2:-2]))
    summary = {
        "mass": M, "q": q, "N": 1, "route": route, "n": n,
        "mass_numeric": mass, "mass_check": "pass" if mass_ok else "fail",
        "positivity_check": "pass" if sign_ok else "fail",
        "ode_residual_sup": resid,
    }
    passed = mass_ok and sign_ok
    if route == "dynamical":
        dist = _lp(f - closed, g.dx, 1)
        summary["l1_distance_to_closed_form"] = dist
        summary["closed_form_check"] = "pass" if dist < 1e-4 else "fail"
        passed = passed and dist < 1e-4
    summary["verdict"] = "pass" if passed else "fail"
    return y, f, summary


def cmd_profile(args) -> int:
    conf = load_config(args.config, "profile")
    vals = merge(conf, args, ("mass", "q", "dim", "route", "n", "out"))
    if vals.get("mass") is None or vals.get("q") is None:
        raise UsageError("profile needs --mass and --q")
    M, q = float(vals["mass"]), float(vals["q"])
    dim = int(vals.get("dim") or 1)
    if not math.isfinite(M):
        raise UsageError("mass must be finite")
    if dim != 1 or q != 1.0 + 1.0 / dim:
        raise UsageError(f"profiles are available for N = 1, q = 2 only (got N={dim}, q={q:g})")
    route = vals.get("route") or "closed"
    if route not in ("closed", "dynamical"):
        raise UsageError("route must be closed or dynamical")
    n = int(vals.get("n") or 1501)
    out = output_dir(vals.get("out"), "profile")
    try:
        y, f, summary = profile_summary(M, q, route, n)
    except CdasymError as exc:
        print(f"profile: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out.mkdir(parents=True, exist_ok=True)
    write_columns(out / "profile.csv", {"y": y, "f": f})
    summary["anchor"] = {"label": "self-similar profile",
                         "statement": "for each M there is a unique profile f_M with f' + y f/2 + f^2 = 0 and mass M"}
    summary["created"] = _stamp()
    dump_json(out / "summary.json", summary)
    print(f"profile M={M:g} q={q:g} ({route}): {summary['verdict']}")
    return EXIT_OK if summary["verdict"] == "pass" else EXIT_FAIL


def _parse_p(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity"):
            return INF
        v = float(v)
    v = float(v)
    if not v >= 1:
        raise UsageError(f"p must be >= 1 or 'inf', got {v}")
    return v


def _sweep_cell(job: tuple[float, str, tuple[float, ...]]) -> tuple[float, str, list[dict] | str]:
    q, gen, ps = job
    try:
        return q, gen, [r.to_dict() for r in regime_reports(q, ps, gen)]
    except CdasymError as exc:
        return q, gen, f"{type(exc).__name__}: {exc}"


def sweep_table(qs, ps, generators, jobs: int = 1) -> tuple[dict, bool]:
    """Run every (q, generator) cell and key the reports by (q, p).

    Cell order and worker count do not affect the result."""
    cells = [(float(q), str(g), tuple(ps)) for q in sorted(set(qs)) for g in sorted(set(generators))]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(c) for c in cells]
    multi = len(set(generators)) > 1
    table, ok = {}, True
    for q, gen, rep in sorted(results, key=lambda r: (r[0], r[1])):
        for i, p in enumerate(ps):
            key = f"q={q:g},p={p_label(p)}" + (f",generator={gen}" if multi else "")
            if isinstance(rep, str):
                table[key] = {"q": q, "p": p_label(p), "generator": gen, "error": rep, "verdict": "error"}
                ok = False
            else:
                entry = dict(rep[i])
                entry.update({"q": q, "generator": gen})
                table[key] = entry
                ok = ok and entry["verdict"] == "pass"
    return table, ok


def cmd_sweep(args) -> int:
    conf = load_config(args.config, "sweep")
    qs = conf.get("q", [1.5, 2.0, 3.0, 4.0])
    ps_raw = conf.get("p", [1, 2, "inf"])
    gens = conf.get("generator", ["gaussian"])
    if isinstance(gens, str):
        gens = [gens]
    if not isinstance(qs, list) or not isinstance(ps_raw, list) or not isinstance(gens, list):
        raise UsageError("[sweep] q, p and generator must be arrays")
    jobs = int(args.jobs if args.jobs is not None else conf.get("jobs", 1))
    if jobs < 1:
        raise UsageError("--jobs must be positive")
    ps = tuple(sorted({_parse_p(v) for v in ps_raw}))
    for q in qs:
        if not float(q) > 1:
            raise UsageError(f"sweep exponents must exceed 1, got {q}")
    for g in gens:
        if g not in ("gaussian", "box"):
            raise UsageError(f"unknown generator {g!r}")
    out = output_dir(args.out or conf.get("out"), "sweep")
    table, ok = sweep_table(qs, ps, gens, jobs)
    report = {
        "sweep": {"q": sorted(float(q) for q in qs), "p": [p_label(p) for p in ps], "generator": sorted(gens)},
        "anchor": {"label": "regime taxonomy",
                   "statement": "decay rates of u and of u - M G depend on q through 1 + 1/N and 1 + 2/N"},
        "table": table,
        "verdict": "pass" if ok else "fail",
        "created": _stamp(),
    }
    dump_json(out / "report.json", report)
    for key, entry in table.items():
        print(f"{key}: {entry['verdict']}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_list(args) -> int:
    for name in SCENARIO_NAMES:
        pre = PRESETS[name]
        print(f"{name:24s} {pre.label}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"cdasym: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    commands = {"run": cmd_run, "profile": cmd_profile, "sweep": cmd_sweep, "list": cmd_list}
    try:
        return commands[args.command](args)
    except UsageError as exc:
        print(f"cdasym: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
