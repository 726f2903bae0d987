"""Level-set extrema X+-_gamma, interface width, and crossing times."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyWindow, LevelNotBracketed, NeverCrossed
from .solver import Field


def _positions_from_arrays(x: np.ndarray, u: np.ndarray, gamma: float) -> tuple[float, float]:
    above = u >= gamma
    if not above.any():
        raise LevelNotBracketed(f"u < {gamma} everywhere on the window")
    below = u <= gamma
    if not below.any():
        raise LevelNotBracketed(f"u > {gamma} everywhere on the window")

    j = int(np.nonzero(above)[0][-1])  # rightmost u >= gamma
    if j == u.size - 1:
        raise LevelNotBracketed("level not bracketed on the right edge")
    x_plus = x[j] + (x[j + 1] - x[j]) * (u[j] - gamma) / (u[j] - u[j + 1])

    k = int(np.argmax(below))  # leftmost u <= gamma
    if k == 0:
        raise LevelNotBracketed("level not bracketed on the left edge")
    x_minus = x[k - 1] + (x[k] - x[k - 1]) * (u[k - 1] - gamma) / (u[k - 1] - u[k])
    return float(x_minus), float(x_plus)


def level_positions(field: Field, gamma: float) -> tuple[float, float]:
    """Leftmost crossing of {u <= gamma} and rightmost crossing of {u >= gamma}.

    Both are linear interpolations on the bracketing cell, matching the
    continuum definitions for resolved profiles.
    """
    if not (0.0 < gamma < 1.0):
        raise LevelNotBracketed(f"gamma={gamma} outside (0,1)")
    return _positions_from_arrays(field.x, field.values, gamma)


@dataclass
class LevelTrace:
    """Time series of (t, X-_gamma, X+_gamma, width) for one level."""

    gamma: float
    times: list = field(default_factory=list)
    x_minus: list = field(default_factory=list)
    x_plus: list = field(default_factory=list)
    widths: list = field(default_factory=list)

    def append(self, t: float, xm: float, xp: float) -> None:
        width = xp - xm
        assert width >= -1e-9, "level scan produced x_plus < x_minus"
        self.times.append(float(t))
        self.x_minus.append(float(xm))
        self.x_plus.append(float(xp))
        self.widths.append(max(width, 0.0))

    def __len__(self) -> int:
        return len(self.times)

    def width_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.widths))

    def rows(self):
        for t, xm, xp, w in zip(self.times, self.x_minus, self.x_plus, self.widths):
            yield (self.gamma, t, xm, xp, w)


class LevelSampler:
    """Run observer recording a LevelTrace per requested level."""

    def __init__(self, gammas: Sequence[float]):
        self.traces = {g: LevelTrace(g) for g in gammas}

    def observe(self, t, x, u):
        for g, trace in self.traces.items():
            xm, xp = _positions_from_arrays(x, u, g)
            trace.append(t, xm, xp)


class CrossingProbe:
    """Records u(t, probe_x) each sample for later crossing-time queries."""

    def __init__(self, probe_x: float):
        self.probe_x = probe_x
        self.times: list[float] = []
        self.values: list[float] = []

    def observe(self, t, x, u):
        self.times.append(float(t))
        self.values.append(float(np.interp(self.probe_x, x, u, left=1.0, right=0.0)))

    def crossing(self, gamma: float) -> float:
        return crossing_time(self.times, self.values, gamma)


def crossing_time(times: Sequence[float], values: Sequence[float], gamma: float) -> float:
    """First time the sampled series reaches level gamma, interpolated in t."""
    v = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float)
    if v.size == 0:
        raise NeverCrossed("empty probe series")
    if v[0] >= gamma:
        return float(t[0])
    hits = np.nonzero(v >= gamma)[0]
    if hits.size == 0:
        raise NeverCrossed(f"probe stayed below {gamma} for the whole run")
    i = int(hits[0])
    frac = (gamma - v[i - 1]) / (v[i] - v[i - 1])
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


@dataclass
class RatioExtrema:
    max_ratio: float
    min_ratio: float
    argmax_t: float
    argmin_t: float


def ratio_extrema(trace: LevelTrace, t_min: float) -> RatioExtrema:
    """Extrema of width/t over sampled times t >= t_min (and t > 0)."""
    t = np.asarray(trace.times)
    w = np.asarray(trace.widths)
    mask = (t >= t_min) & (t > 0.0)
    if not mask.any():
        raise EmptyWindow(f"no samples at t >= {t_min}")
    ratios = w[mask] / t[mask]
    ts = t[mask]
    imax = int(np.argmax(ratios))
    imin = int(np.argmin(ratios))
    return RatioExtrema(float(ratios[imax]), float(ratios[imin]), float(ts[imax]), float(ts[imin]))
