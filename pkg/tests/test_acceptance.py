"""Acceptance criteria, one test per criterion, each printing a verdict line.

The expensive preset runs come from the shared session fixtures; criteria
9 and 11 are pure closed-form/oracle checks.
"""

import math
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from kppfronts import bounds as B
from kppfronts.cli import parse_config
from kppfronts.harness import run_simulate
from kppfronts.media import MediaProfile, generate_sequences
from kppfronts.solver import SolverConfig, init_field, step


def verdict(num, ok, detail):
    line = f"CRITERION {num:>2}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def read_trace(outdir, gamma):
    path = Path(outdir) / f"trace_{gamma:.6g}.csv"
    rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
    return np.array([[float(v) for v in r] for r in rows])  # gamma,t,xm,xp,w


def test_criterion_1_homogeneous_spreading_speed(homogeneous_speed):
    outcome, _ = homogeneous_speed
    fit = outcome.report["fit"]
    wall = outcome.report["runtime"]["wall_seconds"]
    ok = fit["rel_err"] <= 0.03 and wall < 30.0
    verdict(
        1,
        ok,
        f"X+ slope {fit['slope']:.4f} vs 2.0 (err {fit['rel_err']:.2%} <= 3%), "
        f"run {wall:.1f}s < 30s",
    )


def test_criterion_2_zero_width_for_monotone_homogeneous(homogeneous_speed):
    _, cfg = homogeneous_speed
    dx = cfg.solver_config().dx
    worst = 0.0
    for gamma in (0.1, 0.5, 0.9):
        tr = read_trace(cfg.output_dir, gamma)
        worst = max(worst, float(tr[:, 4].max()))
    verdict(2, worst <= dx, f"max I_gamma over levels {{0.1,0.5,0.9}} = {worst:.3g} <= dx={dx}")


def test_criterion_3_global_exponential_bound(
    ci_theorem1, desk_theorem1, ci_bounds, zlatos_run, homogeneous_speed
):
    total_viol = 0
    total_pts = 0
    for outcome, _ in (ci_theorem1, desk_theorem1, ci_bounds, zlatos_run, homogeneous_speed):
        for rep in outcome.report["bounds"]:
            if rep["bound"] == "exp_upper":
                total_viol += rep["violations"]
                total_pts += rep["points_checked"]
    verdict(3, total_viol == 0, f"u <= min(exp(2mu+t - sqrt(mu+)x),1)+1e-3 at {total_pts} points, "
                                f"{total_viol} violations across all preset runs")


def test_criterion_4_gaussian_lower_bound(ci_bounds):
    outcome, _ = ci_bounds
    rep = next(b for b in outcome.report["bounds"] if b["bound"] == "gaussian_lower")
    ok = rep["violations"] == 0
    verdict(4, ok, f"calibrated seed bound on ci: {rep['points_checked']} points in "
                   f"x >= 2 sqrt(mu- - eps) t, {rep['violations']} violations (tol 1e-3)")


def test_criterion_5_supersolution_sweep(ci_bounds):
    outcome, _ = ci_bounds
    reps = [b for b in outcome.report["bounds"] if b["bound"].startswith(("vbar", "ubar"))]
    assert reps, "no gated index produced supersolution checks"
    bad = sum(r["violations"] for r in reps)
    pts = sum(r["points_checked"] for r in reps)
    verdict(5, bad == 0, f"vbar/ubar dominate u on their regions: {pts} points, {bad} violations")


def test_criterion_6_finite_index_interface_line(ci_theorem1, desk_theorem1):
    checked = []
    ok = True
    for outcome, _ in (ci_theorem1, desk_theorem1):
        for rec in outcome.report["indices"]:
            if "P_n" not in rec:
                continue
            if rec["counted"]:
                good = rec["I_at_formula_time"] >= rec["P_n"] - 0.5
                ok &= good
                checked.append(
                    f"n={rec['n']}: I={rec['I_at_formula_time']:.3f} >= P-0.5={rec['P_n'] - 0.5:.3f}"
                )
            else:
                checked.append(f"n={rec['n']}: P={rec['P_n']:.2f} <= 0, not counted")
    verdict(6, ok, "; ".join(checked))


def test_criterion_7_ratio_dichotomy(desk_theorem1):
    outcome, _ = desk_theorem1
    gamma = outcome.report["params"]["gamma"]
    r = outcome.report["ratios"][repr(gamma)]
    threshold = outcome.report["targets"]["acceptance_lower"]
    upper = outcome.report["targets"]["upper_rate"]
    ok = (
        r["max_ratio"] >= threshold
        and r["min_ratio_final_third"] <= 0.05
        and all(v["max_ratio"] <= upper for v in outcome.report["ratios"].values())
    )
    verdict(
        7,
        ok,
        f"desk max I/t = {r['max_ratio']:.4f} >= {threshold:.4f}, "
        f"late min = {r['min_ratio_final_third']:.4f} <= 0.05, all ratios <= {upper}",
    )


def test_criterion_8_zlatos_regime_control(zlatos_run):
    outcome, cfg = zlatos_run
    dx = cfg.solver_config().dx
    details = []
    ok = True
    for level, rec in sorted(outcome.report["levels"].items()):
        ok &= rec["non_growing"]
        details.append(f"gamma={level}: {rec['second_half_max']:.3g} <= {rec['first_half_max']:.3g}+{dx}")
    verdict(8, ok, "interface non-growing at mu+ = 1.5 mu-: " + "; ".join(details))


def test_criterion_9_closed_form_integrity():
    rng = np.random.default_rng(99)
    worst_band = 0.0
    for _ in range(1000):
        t = rng.uniform(0.01, 100.0)
        x = rng.uniform(-50.0, 200.0)
        ref, _ = quad(
            lambda z: math.exp(-((x - z) ** 2) / (4 * t)) / math.sqrt(4 * math.pi * t), -1.0, 0.0
        )
        worst_band = max(worst_band, abs(B.heat_band_integral(t, x) - ref))

    seq = generate_sequences("factorial", {}, 2)
    params = B.make_params(1.0, 4.0, theta=0.5, T_cal=math.log(2.0))
    h = 1e-4
    worst_vbar = 0.0
    for _ in range(1000):
        t = 6.0 + rng.uniform(2 * h, 0.5)
        x = 24.0 + rng.uniform(2 * h, 40.0)
        f = lambda tt, xx: B.supersolution_vbar(0, seq, 1.0, 4.0, tt, xx)
        v = f(t, x)
        res = (f(t + h, x) - f(t - h, x)) / (2 * h) - (
            f(t, x + h) - 2 * v + f(t, x - h)
        ) / h**2 - 1.0 * v
        worst_vbar = max(worst_vbar, abs(res) / max(1.0, abs(v)))

    sch = B.bump_schedule(0, seq, params)
    sch = B.BumpSchedule(
        n=sch.n, s_n=sch.s_n, tau_prime=sch.tau_prime, alpha_n=0.01, log_alpha=math.log(0.01),
        tau_dprime=sch.tau_dprime, tau_n=sch.tau_n, asymptotic_tau=sch.asymptotic_tau,
    )
    rate = params.mu_plus - 2 * params.eps + math.pi**2 / (4 * params.R**2)
    worst_bump = 0.0
    for _ in range(1000):
        t = rng.uniform(2 * h, 1.0)
        x = rng.uniform(seq.xs[1] + 1.0 + 2 * h, seq.xs[1] + 2 * params.R + 1.0 - 2 * h)
        g = lambda tt, xx: B.bump_subsolution(sch, params, seq, tt, xx)
        v = g(t, x)
        res = (g(t + h, x) - g(t - h, x)) / (2 * h) - (
            g(t, x + h) - 2 * v + g(t, x - h)
        ) / h**2 - rate * v
        worst_bump = max(worst_bump, abs(res))

    ok = worst_band < 1e-10 and worst_vbar < 1e-6 and worst_bump < 1e-6
    verdict(
        9,
        ok,
        f"band vs quadrature {worst_band:.2e} < 1e-10; PDE residuals "
        f"vbar {worst_vbar:.2e}, bump {worst_bump:.2e} < 1e-6 (1000 points each)",
    )


def test_criterion_10_crossing_time_gate(ci_theorem1, desk_theorem1):
    details = []
    ok = True
    for outcome, cfg in (ci_theorem1, desk_theorem1):
        mu_minus = outcome.report["params"]["mu_minus"]
        for rec in outcome.report["indices"]:
            if rec["t_cross"] is None:
                continue
            bound = rec["y_n"] / math.sqrt(mu_minus)
            ok &= rec["t_cross"] < bound
            details.append(f"{cfg.preset} n={rec['n']}: {rec['t_cross']:.1f} < {bound:.0f}")
    verdict(10, ok, "t_cross < y_n/sqrt(mu-): " + "; ".join(details))


def test_criterion_11_dense_matrix_oracle():
    cfg = SolverConfig(dx=0.05, dt=0.02)
    f = init_field(cfg, (-5.0, 5.0))
    assert f.values.size == 200
    media = MediaProfile.homogeneous(1.0)
    mu = media.mu(f.x)
    lam = cfg.dt / cfg.dx**2
    u = f.values
    ustar = u + cfg.dt * mu * u * (1.0 - u)
    n = u.size
    T = (
        np.diag(np.full(n - 1, 1.0), 1)
        + np.diag(np.full(n - 1, 1.0), -1)
        + np.diag(np.full(n, -2.0))
    )
    A = np.eye(n) - lam * T
    b = ustar.copy()
    b[0] += lam * 1.0
    expected = np.linalg.solve(A, b)
    got = step(f, cfg, media)
    err = float(np.max(np.abs(got.values - expected)))
    verdict(11, err < 1e-12, f"one step vs dense reference on 200 cells: max diff {err:.2e} < 1e-12")


def test_criterion_12_deterministic_artifacts(tmp_path):
    digests = []
    for run_dir in ("one", "two"):
        out = tmp_path / run_dir
        cfg = parse_config(
            None,
            {
                "preset": "ci",
                "experiment": "simulate",
                "output_dir": str(out),
                "horizon": 40.0,
            },
        )
        run_simulate(cfg)
        digests.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    same = digests[0].keys() == digests[1].keys() and all(
        digests[0][k] == digests[1][k] for k in digests[0]
    )
    verdict(
        12,
        same,
        f"two ci runs: {len(digests[0])} CSV files byte-identical "
        f"({sum(len(v) for v in digests[0].values())} bytes)",
    )
