"""Tests for profile inversion, the barred transform, and identity checks."""
from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from linrelay.bound import BoundaryPair, ChannelParams, solve_endpoint, theorem_bound
from linrelay.errors import DegenerateBoundError, ProfileMismatchError
from linrelay.trajectory import (
    build_trajectory,
    check_identities,
    invert_A_profile,
    lambda_and_Q1,
    reconstruct_barred,
    unbar,
)

A11 = ChannelParams(a=1.1, b=2.0)
PAIR = BoundaryPair(A_f=0.47745726861858833, B_f=0.7594024699528037)


@pytest.fixture(scope="module")
def endpoint():
    return solve_endpoint(PAIR, A11)


@pytest.fixture(scope="module")
def trajectory(endpoint):
    return build_trajectory(endpoint, A11, n_samples=256)


class TestLambdaAndQ1:
    def test_pinned_values(self, endpoint):
        lam, Q1 = lambda_and_Q1(endpoint, A11)
        assert lam == pytest.approx(1.4294336719912322, rel=1e-12)
        assert Q1 == pytest.approx(0.18382326979694708, rel=1e-12)

    def test_boundary_endpoint_rejected(self):
        pair = BoundaryPair(A_f=A11.a**2 * 0.7, B_f=0.7)
        ep = solve_endpoint(pair, A11)
        with pytest.raises(DegenerateBoundError):
            lambda_and_Q1(ep, A11)


class TestInvertAProfile:
    def test_profile_shape(self, endpoint):
        lam, Q1 = lambda_and_Q1(endpoint, A11)
        S, A = invert_A_profile(endpoint, A11, Q1, 64)
        assert S[0] == 0.0
        assert S[-1] == Q1
        assert A[0] == endpoint.A0
        assert A[-1] == endpoint.A_f
        assert np.all(np.diff(A) < 0.0)

    def test_samples_satisfy_defining_integral(self, endpoint):
        # Check one interior sample against the defining relation by direct
        # quadrature on the same integrand.
        from linrelay.bound import _integrand_second
        from linrelay.numerics import integrate_adaptive

        lam, Q1 = lambda_and_Q1(endpoint, A11)
        S, A = invert_A_profile(endpoint, A11, Q1, 16)
        a2 = A11.a**2
        j = 7
        lhs = integrate_adaptive(
            lambda w: _integrand_second(w, endpoint.phi), endpoint.A_f, A[j]
        )
        rhs = math.log((1.0 + a2 * Q1) / (1.0 + a2 * S[j]))
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_inconsistent_Q1_rejected(self, endpoint):
        lam, Q1 = lambda_and_Q1(endpoint, A11)
        with pytest.raises(ProfileMismatchError):
            invert_A_profile(endpoint, A11, 2.0 * Q1, 16)

    def test_input_validation(self, endpoint):
        with pytest.raises(ValueError):
            invert_A_profile(endpoint, A11, -1.0, 16)
        with pytest.raises(ValueError):
            invert_A_profile(endpoint, A11, 0.1, 1)


class TestUnbar:
    def test_scalar_transform(self):
        # Hand-computed inverse transform at lam = 2, a = 1.1, b = 2.
        T, R, Z, V = unbar(
            np.array([3.0]), np.array([5.0]), np.array([7.0]), np.array([11.0]),
            2.0, A11,
        )
        assert T[0] == pytest.approx(6.0, rel=1e-15)
        assert R[0] == pytest.approx(22.0, rel=1e-15)
        assert Z[0] == pytest.approx(7.0 / 4.0 - 0.5, rel=1e-15)
        assert V[0] == pytest.approx(11.0 / (1.21 * 4.0) - 1.0 / 2.2, rel=1e-15)

    def test_rejects_nonpositive_lambda(self):
        one = np.array([1.0])
        with pytest.raises(ValueError):
            unbar(one, one, one, one, 0.0, A11)


class TestBuildTrajectory:
    def test_initial_values_match_closed_forms(self, endpoint, trajectory):
        traj, lam, Q1 = trajectory
        c1 = A11.b * endpoint.psi
        a, b = A11.a, A11.b
        V0 = c1**3 / lam**2 - 1.0 / (a * b)
        Z0 = endpoint.A0**2 * endpoint.B0 / a**2 - a**2 * c1**2 / (b**2 * endpoint.A0)
        assert traj.V[0] == pytest.approx(V0, rel=1e-10)
        assert traj.Z[0] == pytest.approx(Z0, rel=1e-10)

    def test_start_and_terminal_states(self, trajectory):
        traj, _, _ = trajectory
        assert abs(traj.T[0]) < 1e-12
        assert abs(traj.R[0]) < 1e-12
        assert abs(traj.Z[-1]) < 1e-10
        assert abs(traj.V[-1]) < 1e-10

    def test_conservation_direct(self, endpoint, trajectory):
        # Sbar*Vbar - Tbar*Zbar is constant and equals c1^3; recomputed here
        # without going through check_identities.
        traj, _, _ = trajectory
        c1 = A11.b * endpoint.psi
        invariant = traj.Sbar * traj.Vbar - traj.Tbar * traj.Zbar
        assert np.max(np.abs(invariant - c1**3)) < 1e-10 * c1**3

    def test_relay_energy_identity_direct(self, endpoint, trajectory):
        # a T(Q1)/(b lam) - R(Q1)/(b^2 lam) equals the relay energy from the
        # closed-form bound.
        traj, lam, _ = trajectory
        ev = theorem_bound(PAIR, A11)
        a, b = A11.a, A11.b
        lhs = a * traj.T[-1] / (b * lam) - traj.R[-1] / (b * b * lam)
        assert lhs == pytest.approx(ev.Q2, rel=1e-10)

    def test_log_argument_identity_direct(self, endpoint, trajectory):
        traj, lam, Q1 = trajectory
        ev = theorem_bound(PAIR, A11)
        a, b = A11.a, A11.b
        lhs = (
            1.0
            + traj.Z[0]
            + a * a * Q1
            - 2.0 * a * traj.T[-1] / b
            + traj.R[-1] / (b * b)
        )
        assert lhs == pytest.approx(ev.log_arg, rel=1e-10)


class TestCheckIdentities:
    def test_clean_trajectory_passes(self, endpoint, trajectory):
        traj, lam, Q1 = trajectory
        report = check_identities(traj, endpoint, A11, lam, Q1)
        assert report.passed
        for check in report.checks:
            assert check.passed, check.name

    def test_report_lookup(self, endpoint, trajectory):
        traj, lam, Q1 = trajectory
        report = check_identities(traj, endpoint, A11, lam, Q1)
        assert report["conservation"].worst_residual < 1e-10
        with pytest.raises(KeyError):
            report["no_such_check"]

    def test_accepts_bound_eval_source(self, endpoint, trajectory):
        traj, lam, Q1 = trajectory
        ev = theorem_bound(PAIR, A11)
        report = check_identities(traj, endpoint, A11, lam, Q1, bound_eval=ev)
        assert report.passed

    def test_corrupted_lambda_is_flagged(self, endpoint, trajectory):
        traj, lam, Q1 = trajectory
        bad = lam * 1.01
        T, R, Z, V = unbar(traj.Tbar, traj.Rbar, traj.Zbar, traj.Vbar, bad, A11)
        corrupted = dataclasses.replace(traj, T=T, R=R, Z=Z, V=V)
        report = check_identities(corrupted, endpoint, A11, bad, Q1)
        assert not report.passed
        assert not report["q2_identity"].passed
        assert not report["log_identity"].passed
        # Barred-only checks are untouched by the corruption.
        assert report["conservation"].passed
        assert report["ab_invariant"].passed
