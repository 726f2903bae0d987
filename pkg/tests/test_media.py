import numpy as np
import pytest

from kppfronts.errors import ConstraintViolation, DomainError, KppViolation, RegimeError, ValidationError
from kppfronts.media import (
    MediaProfile,
    SequencePair,
    generate_sequences,
    mu_at,
    reaction,
    sample_profile,
    verify_kpp,
)


def hypxn_ok(xs, ys):
    """Independent re-check of the structural inequalities."""
    n = len(xs)
    for i in range(n):
        if not (0 < xs[i] < ys[i] - 2 < ys[i]):
            return False
        if i + 1 < n and not ys[i] < xs[i + 1]:
            return False
    gaps = [ys[i] - xs[i] for i in range(n)]
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        return False
    ratios = [ys[i] / xs[i + 1] for i in range(n - 1)]
    if any(b >= a for a, b in zip(ratios, ratios[1:])):
        return False
    return True


class TestSequences:
    def test_factorial_example(self):
        seq = generate_sequences("factorial", {}, 3)
        assert seq.xs == (6.0, 120.0, 5040.0)
        assert seq.ys == (24.0, 720.0, 40320.0)
        assert hypxn_ok(seq.xs, seq.ys)

    def test_explicit_rejects_tight_pair(self):
        with pytest.raises(ConstraintViolation) as err:
            generate_sequences("explicit", {"xs": [1], "ys": [2]}, 1)
        assert err.value.index == 0
        assert "x[0] < y[0] - 2" in err.value.which

    def test_geometric_two_pairs_accepted(self):
        seq = generate_sequences(
            "geometric", {"base_x": 20, "base_y": 100, "ratio": 25}, 2
        )
        assert seq.xs == (20.0, 500.0)
        assert seq.ys == (100.0, 2500.0)
        assert seq.ys[0] / seq.xs[1] == 0.2
        assert hypxn_ok(seq.xs, seq.ys)

    def test_geometric_three_pairs_fail_strict_decrease(self):
        # constant ratio y_n/x_{n+1} violates the finite-truncation proxy
        with pytest.raises(ConstraintViolation) as err:
            generate_sequences("geometric", {"base_x": 20, "base_y": 100, "ratio": 25}, 3)
        assert "strictly decreasing" in err.value.which

    def test_factorial_offset(self):
        seq = generate_sequences("factorial-offset", {"alpha": 2.0, "beta": 1.5, "n_start": 4}, 3)
        assert hypxn_ok(seq.xs, seq.ys)
        assert seq.xs[0] == 24.0
        assert seq.ys[0] == pytest.approx(24.0 + 2.0 * 4**1.5)

    def test_gap_increase_enforced(self):
        with pytest.raises(ConstraintViolation) as err:
            SequencePair((10.0, 100.0), (50.0, 130.0))
        assert "strictly increasing" in err.value.which

    def test_n_max_validation(self):
        with pytest.raises(ValidationError):
            generate_sequences("factorial", {}, 0)


@pytest.fixture
def profile():
    seq = generate_sequences("explicit", {"xs": [6, 120], "ys": [24, 720]}, 2)
    return MediaProfile(mu_minus=1.0, mu_plus=4.0, seq=seq)


class TestMuAt:
    def test_fast_plateau(self, profile):
        assert mu_at(profile, 10.0) == 4.0  # 10 in [7, 23]

    def test_slow_plateau(self, profile):
        assert mu_at(profile, 50.0) == 1.0  # 50 in [24, 120]

    def test_smooth_exp_midpoint(self, profile):
        assert mu_at(profile, 6.5) == pytest.approx(2.5, abs=1e-12)

    def test_plateau_endpoints_exact(self, profile):
        for x, want in [(7.0, 4.0), (23.0, 4.0), (24.0, 1.0), (120.0, 1.0)]:
            assert mu_at(profile, x) == want

    def test_tails(self, profile):
        assert mu_at(profile, -100.0) == 1.0
        assert mu_at(profile, 1e6) == 1.0  # held at the last plateau value

    def test_range_bound_random(self, profile):
        rng = np.random.default_rng(0)
        x = rng.uniform(-50, 1500, size=4000)
        mu = profile.mu(x)
        assert np.all(mu >= 1.0 - 1e-15)
        assert np.all(mu <= 4.0 + 1e-15)

    def test_plateau_bit_exact_random(self, profile):
        rng = np.random.default_rng(1)
        for n in range(2):
            xf = rng.uniform(profile.seq.xs[n] + 1, profile.seq.ys[n] - 1, size=200)
            assert np.all(profile.mu(xf) == 4.0)
        xs = rng.uniform(profile.seq.ys[0], profile.seq.xs[1], size=200)
        assert np.all(profile.mu(xs) == 1.0)

    def test_continuity_modulus(self, profile):
        rng = np.random.default_rng(2)
        x = rng.uniform(0, 800, size=2000)
        h = 1e-4
        jump = np.abs(profile.mu(x + h) - profile.mu(x))
        # smoothstep slope is bounded by 2 on the unit ramp
        assert np.max(jump) <= (4.0 - 1.0) * 2.5 * h

    def test_smooth_exp_second_differences_bounded(self, profile):
        x = np.linspace(6.0, 7.0, 401)
        h = x[1] - x[0]
        mu = profile.mu(x)
        d2 = (mu[2:] - 2 * mu[1:-1] + mu[:-2]) / h**2
        assert np.max(np.abs(d2)) < 60.0  # finite across the transition zone

    def test_linear_and_none_transitions(self):
        seq = generate_sequences("explicit", {"xs": [6, 120], "ys": [24, 720]}, 2)
        lin = MediaProfile(1.0, 4.0, seq, transition="linear")
        assert lin.mu(6.25) == pytest.approx(1.0 + 3.0 * 0.25)
        hard = MediaProfile(1.0, 4.0, seq, transition="none")
        assert hard.mu(6.25) == 1.0
        assert hard.mu(6.75) == 4.0

    def test_vector_matches_scalar(self, profile):
        x = np.array([-3.0, 6.5, 10.0, 23.5, 50.0, 119.5, 200.0, 800.0])
        vec = profile.mu(x)
        assert vec == pytest.approx([profile.mu(float(v)) for v in x], abs=0)


class TestRegimes:
    def test_theorem1_needs_fast_contrast(self):
        seq = generate_sequences("factorial", {}, 2)
        with pytest.raises(RegimeError):
            MediaProfile(1.0, 2.0, seq, regime="theorem1")

    def test_zlatos_window(self):
        seq = generate_sequences("factorial", {}, 2)
        MediaProfile(1.0, 1.5, seq, regime="zlatos")
        with pytest.raises(RegimeError):
            MediaProfile(1.0, 2.5, seq, regime="zlatos")

    def test_homogeneous(self):
        prof = MediaProfile.homogeneous(2.0)
        assert prof.mu(123.4) == 2.0
        with pytest.raises(RegimeError):
            MediaProfile(1.0, 2.0, None, regime="homogeneous")


class TestReaction:
    def test_zero_at_equilibria(self, profile):
        assert reaction(profile, 10.0, 0.0) == 0.0
        assert reaction(profile, 10.0, 1.0) == 0.0

    def test_plateau_half(self, profile):
        assert reaction(profile, 10.0, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_slow_value(self, profile):
        assert reaction(profile, 50.0, 0.1) == pytest.approx(0.09, abs=1e-15)

    def test_domain_error(self, profile):
        with pytest.raises(DomainError):
            reaction(profile, 10.0, 1.1)
        # within tolerance is fine
        reaction(profile, 10.0, 1.0 + 1e-13)

    def test_gamma_property(self, profile):
        # f(x,s) >= (mu(x) - eps) s for s in [0, eps/mu_plus]
        rng = np.random.default_rng(3)
        for eps in (0.1, 0.5, 1.0, 3.9):
            x = rng.uniform(-10, 800, size=100)
            s = rng.uniform(0, eps / 4.0, size=100)
            f = reaction(profile, x, s)
            assert np.all(f >= (profile.mu(x) - eps) * s - 1e-12)


class TestVerifyKpp:
    def test_logistic_identity(self, profile):
        reports = verify_kpp(profile, [(0.1, 0.2), (0.5, 1.0)])
        assert reports[0].inf_value == pytest.approx(1.0 * 0.1, abs=1e-12)
        assert reports[1].inf_value == pytest.approx(0.5, abs=1e-12)

    def test_corrupted_profile_flagged(self, profile):
        class Corrupt(MediaProfile):
            def mu(self, x):
                out = np.atleast_1d(np.asarray(MediaProfile.mu(self, x), dtype=float))
                xa = np.atleast_1d(np.asarray(x, dtype=float))
                out[np.abs(xa - 50.0) < 0.5] = 0.0
                return float(out[0]) if np.isscalar(x) else out

        bad = Corrupt(1.0, 4.0, profile.seq)
        with pytest.raises(KppViolation) as err:
            verify_kpp(bad, [(0.1, 0.2)], x_samples=np.linspace(0, 120, 241))
        assert err.value.value == pytest.approx(0.0)
        assert abs(err.value.x - 50.0) < 0.5

    def test_bad_pair_rejected(self, profile):
        with pytest.raises(DomainError):
            verify_kpp(profile, [(0.3, 0.2)])


def test_sample_profile_resolution(profile):
    x, mu = sample_profile(profile, 0.0, 10.0, 0.5)
    assert x[0] == 0.0
    assert x[-1] == 10.0
    assert len(x) == 21
    assert mu[20] == 4.0
