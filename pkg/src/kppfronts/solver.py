"""IMEX time integration of u_t = u_xx + mu(x) u (1-u) on a moving window.

Diffusion is advanced implicitly (backward Euler or Crank-Nicolson via a
tridiagonal solve), the logistic reaction explicitly with mu frozen at
cell centers.  Under dt*mu_plus <= 1/2 the composition maps [0,1] into
itself, so values outside [-1e-10, 1+1e-10] are treated as scheme bugs
and raised, never clamped.

The window extends rightward (appending zeros) while the tail stays
representable, and the saturated left region is replaced by a Dirichlet
u=1 boundary.  The extension threshold default (1e-290) deliberately sits
near the float64 floor: the growth mechanism in slowly varying media is
carried by tail amplitudes as small as exp(-0.6 * block length).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from time import perf_counter
from typing import Iterable, Protocol

import numpy as np
from scipy.linalg import solveh_banded
from scipy.linalg import LinAlgError

from .errors import (
    DomainOverrun,
    GridError,
    MaximumPrincipleViolation,
    TridiagonalSingular,
    ValidationError,
)
from .media import MediaProfile

SCHEMES = ("imex-be", "imex-cn")
MAXPRINCIPLE_TOL = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    dx: float = 0.05
    dt: float = 0.02
    scheme: str = "imex-be"
    right_margin: float = 20.0          # trigger distance ahead of the tail
    extension_threshold: float = 1e-290
    extension_chunk: float = 80.0       # appended length per extension
    bound_check_stride: int = 1
    memory_cap_cells: int = 4_000_000
    trim_enabled: bool = True
    trim_threshold: float = 1e-8
    trim_margin: float = 15.0           # saturated length kept ahead of the cut
    trim_stride: int = 250

    def __post_init__(self):
        if self.dx <= 0 or self.dt <= 0:
            raise ValidationError("dx and dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        if self.right_margin <= 0 or self.extension_chunk <= 0:
            raise ValidationError("right_margin and extension_chunk must be positive")
        if not (0 < self.extension_threshold < 1):
            raise ValidationError("extension_threshold must lie in (0,1)")

    def validate_against(self, profile: MediaProfile) -> None:
        if self.dt * profile.mu_plus > 0.5 + 1e-12:
            raise ValidationError(
                f"dt*mu_plus = {self.dt * profile.mu_plus:.4g} violates dt*mu_plus <= 1/2"
            )


@dataclass
class Field:
    """Discrete solution snapshot: values at cell centers x_left + i*dx."""

    t: float
    x_left: float
    dx: float
    values: np.ndarray
    left_value: float = 1.0   # Dirichlet value behind the (possibly trimmed) left edge
    right_value: float = 0.0  # Dirichlet value beyond the right edge

    @property
    def x(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.values.size)

    @property
    def x_right(self) -> float:
        return self.x_left + self.dx * (self.values.size - 1)

    def interp(self, xq):
        return np.interp(xq, self.x, self.values, left=self.left_value, right=self.right_value)

    def copy(self) -> "Field":
        return Field(self.t, self.x_left, self.dx, self.values.copy(), self.left_value, self.right_value)


def init_field(config: SolverConfig, domain: tuple[float, float]) -> Field:
    """Indicator-of-(-inf,0) initial datum realized by cell averages."""
    a, b = domain
    if not a < 0 < b:
        raise ValidationError("domain must satisfy a < 0 < b")
    n = int(round((b - a) / config.dx))
    if n > config.memory_cap_cells:
        raise GridError(f"{n} cells exceed memory cap {config.memory_cap_cells}")
    centers = a + (np.arange(n) + 0.5) * config.dx
    # fraction of the cell [c-dx/2, c+dx/2) lying left of 0
    values = np.clip(0.5 - centers / config.dx, 0.0, 1.0)
    return Field(t=0.0, x_left=float(centers[0]), dx=config.dx, values=values)


def field_from_values(t, x_left, dx, values, left_value=1.0, right_value=0.0) -> Field:
    """Tabulated initial data (also used by the restart loader)."""
    return Field(
        float(t), float(x_left), float(dx), np.asarray(values, dtype=float), left_value, right_value
    )


def field_from_indicator(
    config: SolverConfig, domain: tuple[float, float], lo: float, hi: float, amplitude: float
) -> Field:
    """amplitude * indicator(lo, hi) by cell averages, zero Dirichlet edges."""
    a, b = domain
    n = int(round((b - a) / config.dx))
    if n > config.memory_cap_cells:
        raise GridError(f"{n} cells exceed memory cap {config.memory_cap_cells}")
    centers = a + (np.arange(n) + 0.5) * config.dx
    overlap = np.clip(
        (np.minimum(centers + config.dx / 2, hi) - np.maximum(centers - config.dx / 2, lo))
        / config.dx,
        0.0,
        1.0,
    )
    return Field(0.0, float(centers[0]), config.dx, amplitude * overlap, left_value=0.0)


class _Workspace:
    """Prefactored banded matrix plus reusable buffers for one window size."""

    def __init__(self, n: int, lam: float, scheme: str):
        self.n = n
        self.lam = lam
        self.scheme = scheme
        ab = np.zeros((2, n))
        if scheme == "imex-be":
            ab[1] = 1.0 + 2.0 * lam
            ab[0, 1:] = -lam
        else:  # imex-cn
            ab[1] = 1.0 + lam
            ab[0, 1:] = -lam / 2.0
        self.ab = ab
        self.rhs = np.empty(n)


def _advance(values, mu_cells, ws: _Workspace, dt, left_value, right_value=0.0):
    """One IMEX step on raw arrays; returns the new value array."""
    lam = ws.lam
    rhs = ws.rhs
    # explicit logistic half: u + dt*mu*u*(1-u)
    np.multiply(values, 1.0 - values, out=rhs)
    rhs *= mu_cells
    rhs *= dt
    rhs += values
    if ws.scheme == "imex-cn":
        # (I + lam/2 T) applied to the reacted state, T = tridiag(1,-2,1)
        interior = rhs.copy()
        rhs *= 1.0 - lam
        rhs[1:] += (lam / 2.0) * interior[:-1]
        rhs[:-1] += (lam / 2.0) * interior[1:]
        rhs[0] += lam * left_value  # old+new time ghost, constant boundary
        rhs[-1] += lam * right_value
    else:
        rhs[0] += lam * left_value
        rhs[-1] += lam * right_value
    try:
        out = solveh_banded(ws.ab, rhs, check_finite=False)
    except LinAlgError as exc:  # pragma: no cover - defensive
        raise TridiagonalSingular(str(exc)) from exc
    return out


def step(field: Field, config: SolverConfig, media: MediaProfile) -> Field:
    """Advance one time step; raises instead of clamping out-of-bound values."""
    mu_cells = media.mu(field.x)
    lam = config.dt / config.dx**2
    ws = _Workspace(field.values.size, lam, config.scheme)
    new_values = _advance(field.values, mu_cells, ws, config.dt, field.left_value, field.right_value)
    new = Field(
        field.t + config.dt, field.x_left, field.dx, new_values, field.left_value, field.right_value
    )
    _check_max_principle(new)
    return new


def _check_max_principle(field: Field) -> None:
    vmin = field.values.min() if field.values.size else 0.0
    vmax = field.values.max() if field.values.size else 0.0
    if vmin < -MAXPRINCIPLE_TOL or vmax > 1.0 + MAXPRINCIPLE_TOL:
        if vmin < -MAXPRINCIPLE_TOL:
            i = int(np.argmin(field.values))
        else:
            i = int(np.argmax(field.values))
        raise MaximumPrincipleViolation(field.t, field.x_left + i * field.dx, float(field.values[i]))


class Observer(Protocol):
    def observe(self, t: float, x: np.ndarray, u: np.ndarray) -> None: ...


@dataclass
class RunStats:
    steps: int = 0
    extensions: int = 0
    trims: int = 0
    max_cells: int = 0
    final_cells: int = 0
    observer_calls: int = 0
    wall_seconds: float = 0.0


@dataclass
class RunResult:
    field: Field
    stats: RunStats


def run(
    field: Field,
    config: SolverConfig,
    media: MediaProfile,
    t_end: float,
    observers: Iterable[Observer] = (),
    sample_interval: float = 0.5,
) -> RunResult:
    """Integrate to t_end with window management and strided observers.

    Observers fire at t=0 (relative), every sample_interval, and at the
    final step.  They receive read-only copies of (x, u).
    """
    config.validate_against(media)
    if field.right_value != 0.0:
        raise ValidationError("run() extends with zeros; the field must have right_value 0")
    observers = tuple(observers)
    t0 = field.t
    n_steps = int(round((t_end - t0) / config.dt))
    if n_steps < 0:
        raise ValidationError("t_end must not precede the field time")
    stride = max(1, int(round(sample_interval / config.dt)))
    margin_cells = max(2, int(round(config.right_margin / config.dx)))
    chunk_cells = max(2, int(round(config.extension_chunk / config.dx)))
    trim_keep_cells = max(2, int(round(config.trim_margin / config.dx)))
    min_cut_cells = max(64, trim_keep_cells)

    values = field.values.copy()
    x_left = field.x_left
    dx = field.dx
    left_value = field.left_value
    lam = config.dt / dx**2

    mu_cells = media.mu(x_left + dx * np.arange(values.size))
    ws = _Workspace(values.size, lam, config.scheme)
    stats = RunStats(max_cells=values.size)
    started = perf_counter()

    def notify(k: int):
        t = t0 + k * config.dt
        x = x_left + dx * np.arange(values.size)
        u = values.copy()
        u.flags.writeable = False
        for obs in observers:
            obs.observe(t, x, u)
        stats.observer_calls += 1

    notify(0)
    check_stride = max(1, config.bound_check_stride)
    for k in range(1, n_steps + 1):
        values = _advance(values, mu_cells, ws, config.dt, left_value)

        if k % check_stride == 0 or k == n_steps:
            vmin = values.min()
            vmax = values.max()
            if vmin < -MAXPRINCIPLE_TOL or vmax > 1.0 + MAXPRINCIPLE_TOL:
                i = int(np.argmin(values) if vmin < -MAXPRINCIPLE_TOL else np.argmax(values))
                raise MaximumPrincipleViolation(t0 + k * config.dt, x_left + i * dx, float(values[i]))

        # extend right while the representable tail nears the wall
        if np.any(values[-margin_cells:] > config.extension_threshold):
            if values.size + chunk_cells > config.memory_cap_cells:
                raise DomainOverrun(
                    f"window of {values.size} cells cannot extend past memory cap "
                    f"{config.memory_cap_cells} at t={t0 + k * config.dt:.6g}"
                )
            values = np.concatenate([values, np.zeros(chunk_cells)])
            new_x = x_left + dx * (np.arange(chunk_cells) + (values.size - chunk_cells))
            mu_cells = np.concatenate([mu_cells, media.mu(new_x)])
            ws = _Workspace(values.size, lam, config.scheme)
            stats.extensions += 1

        # trim the saturated left prefix, keeping a margin
        if config.trim_enabled and k % config.trim_stride == 0:
            unsat = int(np.argmax(values < 1.0 - config.trim_threshold))
            cut = unsat - trim_keep_cells
            if values[0] >= 1.0 - config.trim_threshold and cut >= min_cut_cells:
                values = values[cut:]
                mu_cells = mu_cells[cut:]
                x_left += cut * dx
                left_value = 1.0
                ws = _Workspace(values.size, lam, config.scheme)
                stats.trims += 1

        stats.max_cells = max(stats.max_cells, values.size)
        if k % stride == 0 or k == n_steps:
            notify(k)

    stats.steps = n_steps
    stats.final_cells = values.size
    stats.wall_seconds = perf_counter() - started
    out = Field(t0 + n_steps * config.dt, x_left, dx, values, left_value)
    return RunResult(out, stats)


# --- auxiliary schemes and serialization -----------------------------------

def step_periodic_diffusion(values: np.ndarray, config: SolverConfig) -> np.ndarray:
    """Pure-diffusion step on a periodic grid (mass-conservation checks)."""
    from scipy.linalg import solve_circulant

    n = values.size
    lam = config.dt / config.dx**2
    if config.scheme == "imex-cn":
        a = np.zeros(n)
        a[0] = 1.0 + lam
        a[1] = a[-1] = -lam / 2.0
        interior = (1.0 - lam) * values
        interior += (lam / 2.0) * np.roll(values, 1)
        interior += (lam / 2.0) * np.roll(values, -1)
        return solve_circulant(a, interior)
    a = np.zeros(n)
    a[0] = 1.0 + 2.0 * lam
    a[1] = a[-1] = -lam
    return solve_circulant(a, values)


_HEADER = struct.Struct("<dddq")


def save_field(field: Field, path) -> None:
    """Binary restart: little-endian header (t, x_left, dx, count) + float64 payload."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(field.t, field.x_left, field.dx, field.values.size))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def load_field(path) -> Field:
    with open(path, "rb") as fh:
        t, x_left, dx, count = _HEADER.unpack(fh.read(_HEADER.size))
        values = np.frombuffer(fh.read(8 * count), dtype="<f8").astype(float)
    return Field(t, x_left, dx, values)
