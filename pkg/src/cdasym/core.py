"""Grids, fields, nonlinearities, run configuration and quadrature."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidConfig, InvalidExponent, InvalidField, ShapeMismatch

#: Distinguished exponent for the sup-norm.  Dispatched on before any power
#: is taken, so it never behaves like a large finite p.
INF = math.inf


class Frame(enum.Enum):
    PHYSICAL = "physical"
    SIMILARITY = "similarity"


@dataclass(frozen=True)
class Grid1D:
    """Uniform lattice ``x_i = x_min + i*dx`` with ``n`` nodes including both ends."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidConfig("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise InvalidConfig("x_min must be smaller than x_max")
        if int(self.n) != self.n or self.n < 8:
            raise InvalidConfig("grid needs at least 8 nodes")

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "Grid1D":
        return cls(-half_width, half_width, n)

    @classmethod
    def with_spacing(cls, x_min: float, dx: float, n: int) -> "Grid1D":
        return cls(x_min, x_min + (n - 1) * dx, n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    def coarsened(self, factor: int = 2) -> "Grid1D":
        """Same node count and midpoint, ``factor`` times the length and spacing."""
        mid = 0.5 * (self.x_min + self.x_max)
        half = 0.5 * factor * self.length
        return Grid1D(mid - half, mid + half, self.n)


@dataclass
class Field:
    """Samples of a real function on a :class:`Grid1D` at one instant.

    ``time`` is the physical time ``t`` for ``Frame.PHYSICAL`` fields and the
    similarity time ``s`` for ``Frame.SIMILARITY`` fields.
    """

    grid: Grid1D
    values: np.ndarray
    time: float = 0.0
    frame: Frame = Frame.PHYSICAL

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size != self.grid.n:
            raise ShapeMismatch(
                f"field has {self.values.size} values, grid has {self.grid.n} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidField("field contains non-finite values")
        if self.time < 0 or not math.isfinite(self.time):
            raise InvalidField("field time must be finite and non-negative")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values, time: float | None = None) -> "Field":
        return Field(
            self.grid,
            np.array(values, dtype=float),
            self.time if time is None else time,
            self.frame,
        )

    def copy(self) -> "Field":
        return replace(self, values=self.values.copy())

    def __sub__(self, other: "Field") -> "Field":
        if other.grid != self.grid:
            raise ShapeMismatch("fields live on different grids")
        return self.with_values(self.values - other.values)

    def to_csv(self, path: str | Path) -> None:
        write_columns(path, {"x": self.x, "u": self.values})

    @classmethod
    def from_csv(cls, path: str | Path, time: float = 0.0) -> "Field":
        cols = read_columns(path)
        x, u = cols["x"], cols["u"]
        grid = Grid1D(float(x[0]), float(x[-1]), len(x))
        return cls(grid, u, time)


def write_columns(path: str | Path, columns: dict[str, Sequence[float]]) -> None:
    """Write equal-length columns as CSV with 17 significant digits."""
    names = list(columns)
    data = [np.asarray(columns[k], dtype=float) for k in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*data):
            w.writerow([f"{v:.17g}" for v in row])


def read_columns(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    arr = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: arr[:, j] for j, name in enumerate(header)}


# --------------------------------------------------------------------------
# quadrature


def _trapz(values: np.ndarray, dx: float) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidField("cannot integrate an empty field")
    if values.size == 1:
        return 0.0
    return float(dx * (values.sum() - 0.5 * (values[0] + values[-1])))


def trapezoid_integral(f: Field) -> float:
    """Composite trapezoid rule on the field's grid."""
    if f.values.size == 0:
        raise InvalidField("cannot integrate an empty field")
    if not np.all(np.isfinite(f.values)):
        raise InvalidField("field contains non-finite values")
    return _trapz(f.values, f.grid.dx)


def _lp(values: np.ndarray, dx: float, p: float) -> float:
    if p == INF:
        return float(np.max(np.abs(values)))
    if not p >= 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    a = np.abs(values)
    if p == 1:
        return _trapz(a, dx)
    # scale by the max to keep |u|^p in range
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * _trapz((a / m) ** p, dx) ** (1.0 / p))


def lp_norm(f: Field, p: float) -> float:
    """``(int |u|^p)^(1/p)`` by trapezoid, or ``max |u_i|`` when ``p is INF``."""
    return _lp(f.values, f.grid.dx, p)


# --------------------------------------------------------------------------
# nonlinearities


class FluxKind(enum.Enum):
    POWER_LAW = "power_law"
    LINEAR = "linear"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Nonlinearity:
    """Convective flux ``a * F(u)``.

    For ``POWER_LAW`` the flux function is ``F(u) = |u|**(q-1) * u``; for
    ``LINEAR`` it is ``F(u) = u``.  ``CUSTOM`` takes any callable pair
    ``(F, F')`` with ``F(0) = 0``.
    """

    kind: FluxKind
    a: float = 1.0
    q: float = 1.0
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    deriv: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind is FluxKind.POWER_LAW and not self.q > 1:
            raise InvalidExponent(f"power-law exponent must exceed 1, got {self.q}")
        if self.kind is FluxKind.CUSTOM:
            if self.func is None or self.deriv is None:
                raise InvalidConfig("custom nonlinearity needs F and F'")
            if abs(float(self.func(np.array([0.0]))[0])) > 1e-14:
                raise InvalidConfig("custom flux must satisfy F(0) = 0")
            # F(h) ~ b h, so round-off stays relative; a small h keeps the
            # O(h) error of fluxes like u|u| below the tolerance
            h = 1e-9
            fd = float((self.func(np.array([h])) - self.func(np.array([-h])))[0] / (2 * h))
            if abs(fd - self.drift_b) > 1e-8:
                raise InvalidConfig(
                    f"F'(0)={self.drift_b} disagrees with finite difference {fd}"
                )

    @classmethod
    def power_law(cls, q: float, a: float = 1.0) -> "Nonlinearity":
        if q == 1:
            return cls.linear(a)
        return cls(FluxKind.POWER_LAW, a=a, q=q)

    @classmethod
    def linear(cls, a: float = 1.0) -> "Nonlinearity":
        return cls(FluxKind.LINEAR, a=a, q=1.0)

    @classmethod
    def custom(cls, func, deriv, a: float = 1.0) -> "Nonlinearity":
        return cls(FluxKind.CUSTOM, a=a, q=math.nan, func=func, deriv=deriv)

    @classmethod
    def none(cls) -> "Nonlinearity":
        return cls(FluxKind.LINEAR, a=0.0, q=1.0)

    def F(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is FluxKind.POWER_LAW:
            if self.q == 2:
                return np.abs(u) * u
            return np.abs(u) ** (self.q - 1) * u
        if self.kind is FluxKind.LINEAR:
            return u.copy()
        return np.asarray(self.func(u), dtype=float)

    def dF(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is FluxKind.POWER_LAW:
            return self.q * np.abs(u) ** (self.q - 1)
        if self.kind is FluxKind.LINEAR:
            return np.ones_like(u)
        return np.asarray(self.deriv(u), dtype=float)

    def flux(self, u):
        return self.a * self.F(u)

    def speed(self, u):
        return self.a * self.dF(u)

    @property
    def drift_b(self) -> float:
        """``F'(0)``; the transport velocity of the equation is ``a * drift_b``."""
        if self.kind is FluxKind.POWER_LAW:
            return 0.0
        if self.kind is FluxKind.LINEAR:
            return 1.0
        return float(self.deriv(np.array([0.0]))[0])

    @property
    def is_trivial(self) -> bool:
        return self.a == 0.0

    def small_s_exponent(self, s: float = 1e-3) -> float:
        """Estimated exponent of ``|F(s) - b s|`` near 0 (log-log slope over one decade)."""
        if self.kind is FluxKind.POWER_LAW:
            return self.q
        if self.kind is FluxKind.LINEAR:
            return math.inf
        b = self.drift_b
        pts = np.array([s, s / 10.0])
        h = np.abs(self.F(pts) - b * pts) + np.abs(self.F(-pts) + b * pts)
        if np.any(h == 0):
            return math.inf
        return float(np.log(h[0] / h[1]) / np.log(10.0))

    def describe(self) -> dict:
        d = {"kind": self.kind.value, "a": self.a}
        if self.kind is FluxKind.POWER_LAW:
            d["q"] = self.q
        return d


# --------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class InitialData:
    """Named generator for initial data.

    kinds: ``gaussian(mass, width, center)`` with ``width`` the standard
    deviation, ``box(mass, width, center)``, ``dipole(amplitude, separation)``
    (difference of two unit Gaussians), ``mixed`` (gaussian plus dipole),
    ``well(mass, width, amplitude)`` (a broad Gaussian of mass ``mass + amplitude``
    minus a narrow one of mass ``amplitude``, symmetric and sign-changing) and
    ``file(path)``.
    """

    kind: str
    mass: float = 1.0
    width: float = 1.0
    center: float = 0.0
    amplitude: float = 1.0
    separation: float = 2.0
    path: str | None = None

    @classmethod
    def gaussian(cls, mass=1.0, width=1.0, center=0.0):
        return cls("gaussian", mass=mass, width=width, center=center)

    @classmethod
    def box(cls, mass=1.0, width=1.0, center=0.0):
        return cls("box", mass=mass, width=width, center=center)

    @classmethod
    def dipole(cls, amplitude=1.0, separation=2.0, center=0.0):
        return cls("dipole", mass=0.0, amplitude=amplitude, separation=separation, center=center)

    @classmethod
    def mixed(cls, mass=1.0, width=1.0, center=0.0, amplitude=1.0, separation=2.0):
        return cls("mixed", mass=mass, width=width, center=center,
                   amplitude=amplitude, separation=separation)

    @classmethod
    def well(cls, mass=1.0, width=2.0, amplitude=0.5, center=0.0):
        return cls("well", mass=mass, width=width, center=center, amplitude=amplitude)

    @classmethod
    def file(cls, path):
        return cls("file", path=str(path))

    def describe(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def _gauss(x, width, center):
    return np.exp(-0.5 * ((x - center) / width) ** 2) / (width * math.sqrt(2 * math.pi))


def _renormalize(values: np.ndarray, dx: float, mass: float) -> np.ndarray:
    current = _trapz(values, dx)
    if current == 0:
        raise InvalidConfig("generator produced zero mass; widen the grid")
    return values * (mass / current)


def make_initial(gen: InitialData, grid: Grid1D, time: float = 0.0,
                 frame: Frame = Frame.PHYSICAL) -> Field:
    x = grid.x
    for name in ("mass", "width", "center", "amplitude", "separation"):
        if not math.isfinite(getattr(gen, name)):
            raise InvalidConfig(f"{name} must be finite")
    if gen.kind in ("gaussian", "box", "mixed", "well") and not gen.width > 0:
        raise InvalidConfig("width must be positive")

    if gen.kind == "gaussian":
        u = gen.mass * _gauss(x, gen.width, gen.center)
        if gen.mass != 0:
            u = _renormalize(u, grid.dx, gen.mass)
    elif gen.kind == "box":
        d = np.abs(x - gen.center) - 0.5 * gen.width
        tol = 1e-9 * grid.dx
        ind = np.where(d < -tol, 1.0, np.where(d <= tol, 0.5, 0.0))
        u = gen.mass / gen.width * ind
        if gen.mass != 0:
            u = _renormalize(u, grid.dx, gen.mass)
    elif gen.kind == "dipole":
        u = _dipole(x, gen)
    elif gen.kind == "mixed":
        g = _renormalize(_gauss(x, gen.width, gen.center), grid.dx, 1.0) * gen.mass
        u = g + _dipole(x, gen)
    elif gen.kind == "well":
        broad = _renormalize(_gauss(x, gen.width, gen.center), grid.dx, 1.0)
        narrow = _renormalize(_gauss(x, 0.25 * gen.width, gen.center), grid.dx, 1.0)
        u = (gen.mass + gen.amplitude) * broad - gen.amplitude * narrow
    elif gen.kind == "file":
        src = Field.from_csv(gen.path)
        if src.grid.n != grid.n:
            raise ShapeMismatch(
                f"{gen.path} holds {src.grid.n} samples, grid has {grid.n}"
            )
        u = src.values
    else:
        raise InvalidConfig(f"unknown initial-data kind {gen.kind!r}")
    return Field(grid, u, time, frame)


def _dipole(x, gen: InitialData) -> np.ndarray:
    half = 0.5 * gen.separation
    return gen.amplitude * (_gauss(x, 1.0, gen.center + half) - _gauss(x, 1.0, gen.center - half))


# --------------------------------------------------------------------------
# run configuration


class Scheme(enum.Enum):
    IMEX_CN = "imex_cn"
    UPWIND_EXPLICIT = "upwind_explicit"


@dataclass(frozen=True)
class RunConfig:
    grid: Grid1D
    nonlinearity: Nonlinearity
    initial: InitialData
    t_end: float
    dt: float
    frame: Frame = Frame.PHYSICAL
    cadence: int = 100
    output: str | None = None
    scheme: Scheme = Scheme.IMEX_CN
    snapshot_times: tuple[float, ...] | None = None
    grow_domain: bool = False

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise InvalidConfig("dt must be positive")
        if not self.t_end > 0:
            raise InvalidConfig("t_end must be positive")
        if self.cadence < 1:
            raise InvalidConfig("cadence must be a positive step count")
        if self.snapshot_times is None and self.n_steps % self.cadence != 0:
            raise InvalidConfig(
                f"cadence {self.cadence} does not divide the step count {self.n_steps}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def describe(self) -> dict:
        return {
            "grid": {"x_min": self.grid.x_min, "x_max": self.grid.x_max, "n": self.grid.n},
            "nonlinearity": self.nonlinearity.describe(),
            "initial": self.initial.describe(),
            "t_end": self.t_end,
            "dt": self.dt,
            "frame": self.frame.value,
            "cadence": self.cadence,
            "scheme": self.scheme.value,
            "snapshot_times": list(self.snapshot_times) if self.snapshot_times else None,
            "grow_domain": self.grow_domain,
        }


def log_times(t_lo: float, t_hi: float, count: int) -> tuple[float, ...]:
    """Logarithmically spaced output times, both ends included."""
    return tuple(float(t) for t in np.geomspace(t_lo, t_hi, count))
