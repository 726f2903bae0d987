"""Figure rendering for experiment reports (PNG files next to the CSVs)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .media import MediaProfile, sample_profile  # noqa: E402

_FIGSIZE = (7.0, 4.0)
_DPI = 110


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_media(profile: MediaProfile, x_lo: float, x_hi: float, path) -> Path:
    x, mu = sample_profile(profile, x_lo, x_hi, (x_hi - x_lo) / 4000)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(x, mu, lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel("growth rate")
    ax.set_title("growth-rate landscape")
    return _save(fig, path)


def plot_ratio(times, ratios, lower_target, upper_target, gamma, path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(times, ratios, lw=1.2, label=f"width/t at level {gamma:.4g}")
    ax.axhline(lower_target, color="tab:green", ls="--", lw=1.0, label="growth target")
    ax.axhline(upper_target, color="tab:red", ls=":", lw=1.0, label="upper rate")
    ax.set_xlabel("t")
    ax.set_ylabel("interface width / t")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def plot_trace(trace, path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(trace.times, trace.x_plus, lw=1.0, label="rightmost crossing")
    ax.plot(trace.times, trace.x_minus, lw=1.0, label="leftmost crossing")
    ax.fill_between(trace.times, trace.x_minus, trace.x_plus, alpha=0.25)
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.set_title(f"level {trace.gamma:.4g} interface")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def plot_snapshots(snapshots, profile: MediaProfile | None, path) -> Path:
    """snapshots: list of (t, x, u)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for t, x, u in snapshots:
        ax.plot(x, u, lw=1.0, label=f"t={t:g}")
    if profile is not None and snapshots:
        x = snapshots[-1][1]
        mu = profile.mu(x)
        ax.plot(x, mu / profile.mu_plus, color="0.7", lw=0.8, ls="--", label="mu/mu_plus")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_ylim(-0.05, 1.1)
    ax.legend(loc="best", fontsize=7)
    return _save(fig, path)
