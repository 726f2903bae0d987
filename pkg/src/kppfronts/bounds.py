"""Closed-form sub/supersolutions and the constant chain behind them.

Every evaluator here is an exact formula; the checkers compare the
numerical solution against them pointwise inside each bound's stated
validity region.  Amplitudes are tracked in log space where the straight
exponentials would underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.special import erf

from .errors import (
    AlphaTooLarge,
    CalibrationTimeout,
    DomainError,
    GateFailed,
    OutsideValidity,
    RegimeError,
    ValidationError,
)
from .media import MediaProfile, SequencePair
from . import solver as _solver


# --- the epsilon chain ------------------------------------------------------

def chain_terms(eps: float, mu_minus: float, mu_plus: float) -> tuple[float, float, float]:
    """The three quantities of the smallness chain, left to right."""
    lhs = (2 * mu_plus - eps - 2 * mu_minus) / (
        2 * (mu_plus - 2 * eps) * math.sqrt(mu_plus - mu_minus)
    )
    mid = 2 * math.sqrt(mu_plus - mu_minus) / (
        mu_plus + 2 * math.sqrt(mu_minus * (mu_plus - mu_minus))
    )
    rhs = 1.0 / (2 * math.sqrt(mu_minus))
    return lhs, mid, rhs


def chain_holds(eps: float, mu_minus: float, mu_plus: float) -> bool:
    if not (0 < eps < mu_minus and eps < mu_plus / 2):
        return False
    lhs, mid, rhs = chain_terms(eps, mu_minus, mu_plus)
    return 0 < lhs < mid < rhs


def epsilon_max(mu_minus: float, mu_plus: float) -> float:
    """Largest eps in (0, mu_minus) satisfying the full chain (bisection).

    The chain's left member is strictly increasing in eps, so every
    smaller eps also satisfies it.
    """
    if not mu_minus > 0 or not mu_plus > 2 * mu_minus:
        raise RegimeError(f"need mu_plus > 2*mu_minus > 0, got ({mu_minus}, {mu_plus})")
    ub = mu_minus * (1.0 - 1e-12)
    if chain_holds(ub, mu_minus, mu_plus):
        return ub
    lo, hi = 0.0, ub
    while hi - lo > 1e-10 * max(hi, 1e-30):
        mid = 0.5 * (lo + hi)
        if chain_holds(mid, mu_minus, mu_plus):
            lo = mid
        else:
            hi = mid
    if lo <= 0:  # pragma: no cover - excluded by the regime test
        raise RegimeError("chain unsatisfiable for any positive eps")
    return lo


def theorem_rates(mu_minus: float, mu_plus: float) -> tuple[float, float]:
    """Growth-rate lower target mu_plus/sqrt(mu_plus-mu_minus) - 2 sqrt(mu_minus)
    and the universal upper rate 2(sqrt(mu_plus) - sqrt(mu_minus))."""
    if not (mu_plus > mu_minus > 0):
        raise DomainError("need mu_plus > mu_minus > 0")
    lower = mu_plus / math.sqrt(mu_plus - mu_minus) - 2 * math.sqrt(mu_minus)
    upper = 2 * (math.sqrt(mu_plus) - math.sqrt(mu_minus))
    return lower, upper


def eps_level_target(eps: float, mu_minus: float, mu_plus: float) -> float:
    """Interface growth rate proved at a fixed eps:
    2(mu_plus-2eps)sqrt(mu_plus-mu_minus)/(2mu_plus-eps-2mu_minus) - 2 sqrt(mu_minus)."""
    return (
        2 * (mu_plus - 2 * eps) * math.sqrt(mu_plus - mu_minus) / (2 * mu_plus - eps - 2 * mu_minus)
        - 2 * math.sqrt(mu_minus)
    )


# --- parameter bundle -------------------------------------------------------

def radius_for(eps: float) -> float:
    """Smallest R with pi^2/(4R^2) <= eps, rounded up to one decimal."""
    r = math.pi / (2 * math.sqrt(eps))
    return math.ceil(r * 10.0 - 1e-12) / 10.0


@dataclass(frozen=True)
class BoundParams:
    """The constant chain eps, R, Gamma, gamma, ell, theta, C feeding every bound."""

    mu_minus: float
    mu_plus: float
    eps: float
    eps0: float
    R: float
    Gamma: float
    gamma: float
    ell: float
    theta: float
    T_cal: float
    C_harnack: float

    def __post_init__(self):
        if not (0 < self.eps <= self.eps0 < self.mu_minus):
            raise ValidationError("need 0 < eps <= eps0 < mu_minus")
        if not chain_holds(self.eps, self.mu_minus, self.mu_plus):
            raise ValidationError("eps does not satisfy the smallness chain")
        if math.pi**2 / (4 * self.R**2) > self.eps + 1e-12:
            raise ValidationError("need pi^2/(4R^2) <= eps")
        if abs(self.Gamma - self.eps / self.mu_plus) > 1e-12:
            raise ValidationError("Gamma must equal eps/mu_plus")
        if not (0 < self.gamma <= self.Gamma):
            raise ValidationError("need gamma in (0, Gamma]")
        if not self.ell > -math.log(self.gamma) / math.sqrt(self.mu_minus):
            raise ValidationError("need ell > -ln(gamma)/sqrt(mu_minus)")
        if not (0 < self.theta < 1):
            raise ValidationError("theta must lie in (0,1)")
        if not (0 < self.C_harnack < 1):
            raise ValidationError("C_harnack must lie in (0,1)")

    def with_harnack(self, c: float) -> "BoundParams":
        return replace(self, C_harnack=c)


def make_params(
    mu_minus: float,
    mu_plus: float,
    theta: float,
    T_cal: float,
    *,
    eps: float | None = None,
    gamma: float | None = None,
    ell: float | None = None,
    C_harnack: float = 0.5,
) -> BoundParams:
    """Fill the default chain: eps = eps0, Gamma = eps/mu_plus, gamma = Gamma/2,
    ell = 1.25 * (-ln gamma)/sqrt(mu_minus)."""
    eps0 = epsilon_max(mu_minus, mu_plus)
    eps = eps0 if eps is None else eps
    Gamma = eps / mu_plus
    gamma = Gamma / 2 if gamma is None else gamma
    ell = 1.25 * (-math.log(gamma) / math.sqrt(mu_minus)) if ell is None else ell
    return BoundParams(
        mu_minus=mu_minus,
        mu_plus=mu_plus,
        eps=eps,
        eps0=eps0,
        R=radius_for(eps),
        Gamma=Gamma,
        gamma=gamma,
        ell=ell,
        theta=theta,
        T_cal=T_cal,
        C_harnack=C_harnack,
    )


# --- elementary bounds ------------------------------------------------------

def exp_upper_bound(mu_plus: float, t, x):
    """Global envelope min(exp(2 mu_plus t - sqrt(mu_plus) x), 1)."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise DomainError("t must be nonnegative")
    arg = 2 * mu_plus * ta - math.sqrt(mu_plus) * np.asarray(x, dtype=float)
    out = np.exp(np.minimum(arg, 0.0))
    return float(out) if out.ndim == 0 else out


def heat_band_integral(t, x):
    """Heat-kernel mass over the seed band (-1,0):
    (1/2)[erf((x+1)/(2 sqrt t)) - erf(x/(2 sqrt t))]."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0):
        raise DomainError("t must be positive")
    s = 2.0 * np.sqrt(ta)
    xa = np.asarray(x, dtype=float)
    out = 0.5 * (erf((xa + 1.0) / s) - erf(xa / s))
    return float(out) if out.ndim == 0 else out


def gaussian_lower_bound(params: BoundParams, t, x):
    """theta * gamma * exp((mu_minus - eps) t) * band integral, valid for
    x >= 2 sqrt(mu_minus - eps) t."""
    speed = 2.0 * math.sqrt(params.mu_minus - params.eps)
    ta = np.asarray(t, dtype=float)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < speed * ta - 1e-12):
        raise OutsideValidity("x < 2 sqrt(mu_minus - eps) t")
    out = params.theta * params.gamma * np.exp((params.mu_minus - params.eps) * ta) * heat_band_integral(ta, xa)
    return float(out) if out.ndim == 0 else out


# --- theta calibration ------------------------------------------------------

@dataclass(frozen=True)
class ThetaCalibration:
    T: float
    theta: float
    probe_speed: float


@lru_cache(maxsize=32)
def _calibrate_cached(eps, Gamma, mu_minus, dx, dt, budget, window, sample):
    cfg = _solver.SolverConfig(dx=dx, dt=dt, scheme="imex-be")
    profile = MediaProfile.homogeneous(mu_minus)
    speed = 2.0 * math.sqrt(mu_minus - eps)
    field = _solver.field_from_indicator(cfg, (-60.0, 120.0), -1.0, 0.0, Gamma)

    times: list[float] = []
    probe_vals: list[float] = []

    class _Probe:
        def observe(self, t, x, u):
            times.append(t)
            probe_vals.append(float(np.interp(speed * t, x, u, left=0.0, right=0.0)))

    _solver.run(field, cfg, profile, budget, observers=(_Probe(),), sample_interval=sample)

    tv = np.asarray(times)
    pv = np.asarray(probe_vals)
    ok = pv >= Gamma
    win_steps = int(round(window / sample))
    for i in range(1, tv.size - win_steps):
        if ok[i : i + win_steps + 1].all():
            T = float(tv[i])
            return ThetaCalibration(T=T, theta=math.exp(-mu_minus * T), probe_speed=speed)
    raise CalibrationTimeout(
        f"probe never held >= {Gamma:.4g} over a {window}-long window within t <= {budget}"
    )


def calibrate_theta(
    eps: float,
    Gamma: float,
    mu_minus: float,
    solver_config: _solver.SolverConfig | None = None,
    budget: float = 150.0,
    window: float = 20.0,
    sample_interval: float = 0.25,
) -> ThetaCalibration:
    """Simulate dV/dt = V'' + mu_minus V(1-V) from Gamma * indicator(-1,0) and
    return the first sampled T past which V stays >= Gamma along the ray
    x = 2 sqrt(mu_minus - eps) t, together with theta = exp(-mu_minus T).

    Dirichlet-0 walls only lower V, so the returned T is conservative.
    """
    if not (0 < eps < mu_minus):
        raise DomainError("need 0 < eps < mu_minus")
    if not (0 < Gamma < 1):
        raise DomainError("need Gamma in (0,1)")
    cfg = solver_config or _solver.SolverConfig()
    return _calibrate_cached(
        float(eps), float(Gamma), float(mu_minus), cfg.dx, cfg.dt, float(budget), float(window), float(sample_interval)
    )


# --- supersolutions over a slow block ---------------------------------------

def _require(cond: bool, msg: str):
    if not cond:
        raise OutsideValidity(msg)


def s_n(n: int, seq: SequencePair, mu_plus: float) -> float:
    """Anchor time y_n / (2 sqrt(mu_plus))."""
    return seq.ys[n] / (2 * math.sqrt(mu_plus))


def supersolution_vbar(n: int, seq: SequencePair, mu_minus: float, mu_plus: float, t, x):
    """Two-exponential supersolution over the slow block [y_n, x_{n+1}]:
    exp(2 mu_minus (t-s_n) - sqrt(mu_minus)(x-y_n))
    + 2 exp(mu_plus (t-s_n) + sqrt(mu_plus-mu_minus)(x-x_{n+1})
            - sqrt(mu_plus-mu_minus)(x_{n+1}-y_n))."""
    yn, xnp1 = seq.ys[n], seq.xs[n + 1]
    sn = s_n(n, seq, mu_plus)
    ta = np.asarray(t, dtype=float)
    xa = np.asarray(x, dtype=float)
    _require(bool(np.all(ta >= sn - 1e-12)), "t < s_n")
    _require(bool(np.all((xa >= yn - 1e-12) & (xa <= xnp1 + 1e-12))), "x outside [y_n, x_{n+1}]")
    root = math.sqrt(mu_plus - mu_minus)
    with np.errstate(over="ignore"):
        term1 = np.exp(2 * mu_minus * (ta - sn) - math.sqrt(mu_minus) * (xa - yn))
        term2 = 2.0 * np.exp(mu_plus * (ta - sn) + root * (xa - xnp1) - root * (xnp1 - yn))
    out = term1 + term2
    return float(out) if out.ndim == 0 else out


def supersolution_ubar(n: int, seq: SequencePair, mu_minus: float, mu_plus: float, t, x):
    """Piecewise supersolution valid on [s_n, inf) x [y_n, inf), constant in x
    beyond x_{n+1} and continuous at the junction."""
    yn, xnp1 = seq.ys[n], seq.xs[n + 1]
    sn = s_n(n, seq, mu_plus)
    ta = np.asarray(t, dtype=float)
    xa = np.asarray(x, dtype=float)
    _require(bool(np.all(ta >= sn - 1e-12)), "t < s_n")
    _require(bool(np.all(xa >= yn - 1e-12)), "x < y_n")
    root = math.sqrt(mu_plus - mu_minus)
    with np.errstate(over="ignore"):
        growth = np.exp(mu_plus * (ta - sn))
        inner = np.exp(-root * (xa - yn)) + np.exp(root * (xa - xnp1) - root * (xnp1 - yn))
        outer = 2.0 * math.exp(-root * (xnp1 - yn))
        out = growth * np.where(xa < xnp1, inner, outer)
    return float(out) if out.ndim == 0 else out


# --- the growing bump -------------------------------------------------------

@dataclass(frozen=True)
class BumpSchedule:
    """Timing of the compact cosine subsolution inside the fast plateau."""

    n: int
    s_n: float
    tau_prime: float
    alpha_n: float
    log_alpha: float
    tau_dprime: float
    tau_n: float
    asymptotic_tau: float


def bump_schedule(n: int, seq: SequencePair, params: BoundParams) -> BumpSchedule:
    """Seed amplitude and waiting times for the bump at index n.

    alpha_n is computed in log space; the stored alpha_n may underflow to
    zero for large blocks while the schedule stays finite.
    """
    if n + 1 >= len(seq):
        raise GateFailed(n, "no x_{n+1} in the constructed sequence")
    mu_m, mu_p, eps = params.mu_minus, params.mu_plus, params.eps
    gap = seq.gap(n)
    L = gap + 2 * params.R + 2
    tau_prime = L / (2 * math.sqrt(mu_p - mu_m))
    if gap < 2 * math.sqrt(mu_m - eps) * tau_prime:
        raise GateFailed(n, "x_{n+1} - y_n < 2 sqrt(mu_minus - eps) tau'_n")
    log_alpha = (
        math.log(params.theta * params.C_harnack * params.gamma)
        + (mu_m - eps) * tau_prime
        - L**2 / (4 * tau_prime)
        - 0.5 * math.log(4 * math.pi * tau_prime)
    )
    if log_alpha >= math.log(params.gamma):
        raise AlphaTooLarge(f"alpha_n >= gamma at n={n}")
    tau_dprime = (math.log(params.gamma) - log_alpha) / (mu_p - 2 * eps)
    asymptotic = (
        (2 * mu_p - eps - 2 * mu_m)
        / (2 * (mu_p - 2 * eps) * math.sqrt(mu_p - mu_m))
        * gap
    )
    return BumpSchedule(
        n=n,
        s_n=s_n(n, seq, mu_p),
        tau_prime=tau_prime,
        alpha_n=math.exp(log_alpha) if log_alpha > -745.0 else 0.0,
        log_alpha=log_alpha,
        tau_dprime=tau_dprime,
        tau_n=1.0 + tau_prime + tau_dprime,
        asymptotic_tau=asymptotic,
    )


def bump_subsolution(schedule: BumpSchedule, params: BoundParams, seq: SequencePair, t, x):
    """Cosine bump alpha_n cos(pi (x - x_{n+1} - R - 1)/(2R)) exp((mu_plus - 2 eps) t)
    on x in [x_{n+1}+1, x_{n+1}+2R+1], t the clock since the seed instant."""
    xnp1 = seq.xs[schedule.n + 1]
    R = params.R
    ta = np.asarray(t, dtype=float)
    xa = np.asarray(x, dtype=float)
    _require(bool(np.all((ta >= -1e-12) & (ta <= schedule.tau_dprime + 1e-12))), "t outside [0, tau''_n]")
    _require(
        bool(np.all((xa >= xnp1 + 1.0 - 1e-12) & (xa <= xnp1 + 2 * R + 1.0 + 1e-12))),
        "x outside the bump interval",
    )
    rate = params.mu_plus - 2 * params.eps
    out = np.exp(schedule.log_alpha + rate * ta) * np.cos(
        math.pi * (xa - xnp1 - R - 1.0) / (2 * R)
    )
    return float(out) if out.ndim == 0 else out


# --- the X- window ----------------------------------------------------------

@dataclass(frozen=True)
class XMinusWindow:
    n: int
    t_lo: float
    t_hi: float
    M: float
    valid: bool

    def bound_line(self, seq: SequencePair, params: BoundParams, t):
        """X-_gamma(t) <= ell + y_n + 2 sqrt(mu_minus)(t - s_n) on [t_lo, t_hi]."""
        return params.ell + seq.ys[self.n] + 2 * math.sqrt(params.mu_minus) * (
            np.asarray(t, dtype=float) - self.t_lo
        )


def xminus_window(n: int, seq: SequencePair, params: BoundParams) -> XMinusWindow:
    """Constant M and the time window on which the slow-crawl line confines X-."""
    mu_m, mu_p = params.mu_minus, params.mu_plus
    gamma, ell = params.gamma, params.ell
    if gamma <= math.exp(-ell * math.sqrt(mu_m)):
        raise DomainError("gamma <= exp(-ell sqrt(mu_minus)): M undefined")
    if n + 1 >= len(seq):
        raise GateFailed(n, "no x_{n+1} in the constructed sequence")
    denom = mu_p + 2 * math.sqrt(mu_m * (mu_p - mu_m))
    M = (
        math.log(gamma - math.exp(-ell * math.sqrt(mu_m)))
        - math.log(2.0)
        - ell * math.sqrt(mu_p - mu_m)
    ) / denom
    gap = seq.gap(n)
    sn = s_n(n, seq, mu_p)
    span = 2 * math.sqrt(mu_p - mu_m) * gap / denom
    cond1 = (
        ell + 2 * M * math.sqrt(mu_m) + 4 * math.sqrt(mu_m * (mu_p - mu_m)) * gap / denom < gap
    )
    cond2 = M + span >= 0
    return XMinusWindow(n=n, t_lo=sn, t_hi=sn + M + span, M=M, valid=bool(cond1 and cond2))


# --- pointwise checking -----------------------------------------------------

@dataclass
class ViolationReport:
    bound: str
    region: str
    kind: str  # "upper" or "lower"
    tolerance: float
    points_checked: int = 0
    violations: int = 0
    violations_at_zero: int = 0
    max_excess: float = -math.inf
    worst_t: float = math.nan
    worst_x: float = math.nan

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "region": self.region,
            "points_checked": self.points_checked,
            "violations": self.violations,
            "violations_at_zero": self.violations_at_zero,
            "max_excess": None if self.points_checked == 0 else self.max_excess,
            "worst_t": None if self.points_checked == 0 else self.worst_t,
            "worst_x": None if self.points_checked == 0 else self.worst_x,
            "tolerance": self.tolerance,
        }


class BoundChecker:
    """Observer comparing u against a closed-form bound on the observer stride.

    kind="upper" checks u <= bound + tol, kind="lower" checks u >= bound - tol.
    Violations are recorded, never raised.
    """

    def __init__(
        self,
        name: str,
        kind: str,
        bound_fn: Callable[[float, np.ndarray], np.ndarray],
        region_fn: Callable[[float, np.ndarray], np.ndarray] | None,
        tolerance: float,
        region_label: str = "",
    ):
        assert kind in ("upper", "lower")
        self.bound_fn = bound_fn
        self.region_fn = region_fn
        self.report = ViolationReport(
            bound=name, region=region_label or "all", kind=kind, tolerance=tolerance
        )

    def observe(self, t, x, u):
        mask = None
        if self.region_fn is not None:
            mask = self.region_fn(t, x)
            if not mask.any():
                return
            x = x[mask]
            u = u[mask]
        b = np.asarray(self.bound_fn(t, x), dtype=float)
        excess = (u - b) if self.report.kind == "upper" else (b - u)
        rep = self.report
        rep.points_checked += int(excess.size)
        rep.violations += int(np.count_nonzero(excess > rep.tolerance))
        rep.violations_at_zero += int(np.count_nonzero(excess > 0.0))
        i = int(np.argmax(excess))
        if excess[i] > rep.max_excess:
            rep.max_excess = float(excess[i])
            rep.worst_t = float(t)
            rep.worst_x = float(x[i])


def check_bound(
    snapshots: Iterable[tuple[float, np.ndarray, np.ndarray]],
    name: str,
    kind: str,
    bound_fn,
    region_fn,
    tolerance: float,
    region_label: str = "",
) -> ViolationReport:
    """Offline form of the checker: feed recorded (t, x, u) snapshots."""
    checker = BoundChecker(name, kind, bound_fn, region_fn, tolerance, region_label)
    for t, x, u in snapshots:
        checker.observe(t, x, u)
    return checker.report
