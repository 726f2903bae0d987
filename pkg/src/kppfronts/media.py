"""Heterogeneous growth-rate landscape mu(x) and the logistic reaction term.

The landscape alternates between a fast plateau mu_plus on [x_n+1, y_n-1]
and a slow plateau mu_minus on [y_n, x_{n+1}], glued by a configurable
transition ramp on the unit-length gaps.  Everything here is a pure
function of immutable profile data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ConstraintViolation, DomainError, KppViolation, RegimeError, ValidationError

TRANSITIONS = ("smooth-exp", "linear", "none")
REGIMES = ("theorem1", "zlatos", "homogeneous")
GENERATORS = ("factorial", "factorial-offset", "geometric", "explicit")

_S_TOL = 1e-12  # accepted overshoot of s outside [0,1]


@dataclass(frozen=True)
class SequencePair:
    """Increasing positions (x_n), (y_n) delimiting fast and slow blocks.

    Finite truncations of the asymptotic requirements are enforced as
    strict monotonicity: y_n - x_n increasing (gap growth) and
    y_n / x_{n+1} decreasing (relative smallness).
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    generator_tag: str = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in self.ys))
        if len(self.xs) != len(self.ys) or len(self.xs) < 1:
            raise ConstraintViolation(0, "xs and ys must have equal length N >= 1")
        n_pairs = len(self.xs)
        for n in range(n_pairs):
            if not self.xs[n] > 0:
                raise ConstraintViolation(n, f"0 < x[{n}]")
            if not self.xs[n] < self.ys[n] - 2:
                raise ConstraintViolation(n, f"x[{n}] < y[{n}] - 2")
            if n + 1 < n_pairs and not self.ys[n] < self.xs[n + 1]:
                raise ConstraintViolation(n, f"y[{n}] < x[{n+1}]")
        for n in range(n_pairs - 1):
            if not self.ys[n + 1] - self.xs[n + 1] > self.ys[n] - self.xs[n]:
                raise ConstraintViolation(n + 1, f"y[n]-x[n] strictly increasing at n={n+1}")
        for n in range(n_pairs - 2):
            r0 = self.ys[n] / self.xs[n + 1]
            r1 = self.ys[n + 1] / self.xs[n + 2]
            if not r1 < r0:
                raise ConstraintViolation(n + 1, f"y[n]/x[n+1] strictly decreasing at n={n+1}")

    def __len__(self) -> int:
        return len(self.xs)

    def gap(self, n: int) -> float:
        """Slow-block length x_{n+1} - y_n."""
        return self.xs[n + 1] - self.ys[n]


def generate_sequences(kind: str, params: dict, n_max: int) -> SequencePair:
    """Build a validated SequencePair from one of the named generators."""
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if kind == "factorial":
        xs = [float(math.factorial(2 * n + 3)) for n in range(n_max)]
        ys = [float(math.factorial(2 * n + 4)) for n in range(n_max)]
    elif kind == "factorial-offset":
        alpha = float(params["alpha"])
        beta = float(params["beta"])
        n_start = int(params.get("n_start", 3))
        if alpha <= 0 or beta <= 0:
            raise ValidationError("factorial-offset requires alpha > 0 and beta > 0")
        ns = range(n_start, n_start + n_max)
        xs = [float(math.factorial(n)) for n in ns]
        ys = [float(math.factorial(n)) + alpha * n**beta for n in ns]
    elif kind == "geometric":
        base_x = float(params["base_x"])
        base_y = float(params["base_y"])
        ratio = float(params["ratio"])
        xs = [base_x * ratio**n for n in range(n_max)]
        ys = [base_y * ratio**n for n in range(n_max)]
    elif kind == "explicit":
        xs = [float(v) for v in params["xs"]]
        ys = [float(v) for v in params["ys"]]
        if n_max > len(xs):
            raise ValidationError("n_max exceeds the explicit sequence length")
        xs, ys = xs[:n_max], ys[:n_max]
    else:
        raise ValidationError(f"unknown sequence generator {kind!r}")
    return SequencePair(tuple(xs), tuple(ys), generator_tag=kind)


def _ramp(s: np.ndarray, transition: str) -> np.ndarray:
    """Monotone 0->1 ramp on [0,1]; smooth-exp is the C-infinity smoothstep."""
    s = np.clip(s, 0.0, 1.0)
    if transition == "linear":
        return s
    if transition == "none":
        return (s >= 0.5).astype(float)
    # g(t) = exp(-1/t) (0 for t <= 0), psi = g(s) / (g(s) + g(1-s))
    with np.errstate(divide="ignore", over="ignore"):
        ga = np.where(s > 0.0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        gb = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    return ga / (ga + gb)


@dataclass(frozen=True)
class MediaProfile:
    """The growth-rate landscape mu(x), total on the real line.

    Left of x_0 the rate is left_rate (default mu_minus); beyond the last
    constructed y_n it is held at right_rate (default mu_minus, the value
    the final slow block enters with).
    """

    mu_minus: float
    mu_plus: float
    seq: SequencePair | None = None
    transition: str = "smooth-exp"
    regime: str = "theorem1"
    left_rate: float | None = None
    right_rate: float | None = None

    def __post_init__(self):
        if self.transition not in TRANSITIONS:
            raise ValidationError(f"unknown transition {self.transition!r}")
        if self.regime not in REGIMES:
            raise ValidationError(f"unknown regime {self.regime!r}")
        if not self.mu_minus > 0:
            raise RegimeError("mu_minus must be positive")
        if self.regime == "theorem1":
            if not self.mu_plus > 2 * self.mu_minus:
                raise RegimeError("theorem1 regime requires mu_plus > 2*mu_minus")
            if self.seq is None:
                raise ValidationError("theorem1 regime requires a sequence pair")
        elif self.regime == "zlatos":
            if not self.mu_minus < self.mu_plus < 2 * self.mu_minus:
                raise RegimeError("zlatos regime requires mu_minus < mu_plus < 2*mu_minus")
            if self.seq is None:
                raise ValidationError("zlatos regime requires a sequence pair")
        else:  # homogeneous
            if self.mu_plus != self.mu_minus:
                raise RegimeError("homogeneous regime requires mu_plus == mu_minus")
        if self.left_rate is None:
            object.__setattr__(self, "left_rate", self.mu_minus)
        if self.right_rate is None:
            object.__setattr__(self, "right_rate", self.mu_minus)
        for rate in (self.left_rate, self.right_rate):
            if not (self.mu_minus <= rate <= self.mu_plus):
                raise ValidationError("tail rates must lie within [mu_minus, mu_plus]")

    @classmethod
    def homogeneous(cls, mu: float) -> "MediaProfile":
        return cls(mu_minus=mu, mu_plus=mu, seq=None, regime="homogeneous")

    @cached_property
    def _edges(self) -> np.ndarray:
        # per n: x_n | x_n+1 | y_n-1 | y_n  (rise, fast plateau, fall, slow)
        seq = self.seq
        edges = []
        for xn, yn in zip(seq.xs, seq.ys):
            edges.extend((xn, xn + 1.0, yn - 1.0, yn))
        return np.asarray(edges)

    @property
    def construction_end(self) -> float:
        """Start of the held-rate tail (the last constructed y_n)."""
        if self.seq is None:
            return math.inf
        return self.seq.ys[-1]

    def mu(self, x):
        """Evaluate mu at scalar or array positions."""
        scalar = np.isscalar(x)
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if self.seq is None:
            out = np.full_like(xa, self.mu_minus)
            return float(out[0]) if scalar else out

        out = np.empty_like(xa)
        idx = np.searchsorted(self._edges, xa, side="right")
        zone = (idx - 1) % 4  # 0 rise, 1 fast, 2 fall, 3 slow
        seq_idx = np.clip((idx - 1) // 4, 0, len(self.seq) - 1)

        left = idx == 0
        right_tail = idx == 4 * len(self.seq)
        out[left] = self.left_rate
        out[right_tail] = self.right_rate

        mid = ~(left | right_tail)
        if np.any(mid):
            z = zone[mid]
            k = seq_idx[mid]
            xm = xa[mid]
            vals = np.empty_like(xm)
            xs = np.asarray(self.seq.xs)
            ys = np.asarray(self.seq.ys)
            rise = z == 0
            fast = z == 1
            fall = z == 2
            slow = z == 3
            vals[fast] = self.mu_plus
            vals[slow] = self.mu_minus
            if np.any(rise):
                w = _ramp(xm[rise] - xs[k[rise]], self.transition)
                vals[rise] = self.mu_plus * w + self.mu_minus * (1.0 - w)
            if np.any(fall):
                w = _ramp(ys[k[fall]] - xm[fall], self.transition)
                vals[fall] = self.mu_plus * w + self.mu_minus * (1.0 - w)
            out[mid] = vals
        return float(out[0]) if scalar else out


def mu_at(profile: MediaProfile, x):
    """Growth rate at position x (total function on the reals)."""
    return profile.mu(x)


def reaction(profile: MediaProfile, x, s):
    """Logistic reaction mu(x) * s * (1 - s); s must lie in [0, 1]."""
    sa = np.asarray(s, dtype=float)
    if np.any(sa < -_S_TOL) or np.any(sa > 1.0 + _S_TOL):
        raise DomainError(f"density s={s!r} outside [0,1] beyond tolerance {_S_TOL}")
    out = profile.mu(x) * sa * (1.0 - sa)
    return float(out) if np.isscalar(s) and np.isscalar(x) else out


def default_kpp_samples(profile: MediaProfile, per_zone: int = 7) -> np.ndarray:
    """x-samples covering plateaus, transition ramps, and both tails."""
    pts = [-5.0, 0.0]
    if profile.seq is not None:
        for xn, yn in zip(profile.seq.xs, profile.seq.ys):
            pts.extend(np.linspace(xn, xn + 1.0, per_zone))
            pts.extend(np.linspace(xn + 1.0, yn - 1.0, per_zone))
            pts.extend(np.linspace(yn - 1.0, yn, per_zone))
        for n in range(len(profile.seq) - 1):
            pts.extend(np.linspace(profile.seq.ys[n], profile.seq.xs[n + 1], per_zone))
        pts.append(profile.seq.ys[-1] + 10.0)
    else:
        pts.extend(np.linspace(-10.0, 10.0, 5 * per_zone))
    return np.unique(np.asarray(pts))


@dataclass
class KppPairReport:
    s1: float
    s2: float
    inf_value: float
    argmin_x: float
    threshold: float


def verify_kpp(
    profile: MediaProfile,
    s_pairs: Iterable[tuple[float, float]],
    x_samples: Sequence[float] | None = None,
    tol: float = 1e-9,
) -> list[KppPairReport]:
    """Check inf_x (f(x,s1)/s1 - f(x,s2)/s2) >= mu_minus*(s2-s1) by sampling.

    For the logistic form the infimum is mu(x)*(s2-s1), so sampling any
    point of a slow plateau makes the check exact.
    """
    xs = np.asarray(x_samples if x_samples is not None else default_kpp_samples(profile))
    mu = profile.mu(xs)
    reports = []
    for s1, s2 in s_pairs:
        if not (0.0 < s1 < s2 <= 1.0):
            raise DomainError(f"need 0 < s1 < s2 <= 1, got ({s1}, {s2})")
        # f(x,s)/s = mu(x)*(1-s), difference = mu(x)*(s2-s1)
        diffs = mu * (s2 - s1)
        i = int(np.argmin(diffs))
        inf_value = float(diffs[i])
        threshold = profile.mu_minus * (s2 - s1)
        if inf_value < threshold - tol:
            raise KppViolation(float(xs[i]), s1, s2, inf_value)
        reports.append(KppPairReport(s1, s2, inf_value, float(xs[i]), threshold))
    return reports


def sample_profile(profile: MediaProfile, x_lo: float, x_hi: float, spacing: float):
    """(x, mu) arrays sampled at a fixed resolution, for media-preview."""
    if spacing <= 0 or x_hi <= x_lo:
        raise DomainError("need spacing > 0 and x_hi > x_lo")
    n = int(math.floor((x_hi - x_lo) / spacing)) + 1
    x = x_lo + spacing * np.arange(n)
    return x, profile.mu(x)
