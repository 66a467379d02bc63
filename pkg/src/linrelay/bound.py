"""Rank-1 linear-relaying energy-per-bit bound for the Gaussian relay channel.

The channel has gain a from source to relay and gain b from relay to
destination.  For a terminal pair (A_f, B_f) with A_f/B_f <= a^2 there is a
unique endpoint (A0, psi) solving a coupled pair of integral equations; from
it, closed-form source and relay energies Q1, Q2 and a mutual-information
term yield an upper bound E(A_f, B_f) on the minimum energy-per-bit
achievable with rank-1 linear relaying.  The overall bound is the infimum of
E over valid pairs, realized here by a coarse log-grid scan followed by
Nelder-Mead refinement.
"""
from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass

from .errors import (
    BracketOverflowError,
    DegenerateBoundError,
    DepthExceededError,
    DomainError,
    NoBracketError,
    NoFeasiblePointError,
    NonFiniteError,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    SimplexOptions,
    find_root_bracketed,
    integrate_adaptive,
    minimize_simplex,
)

__all__ = [
    "ChannelParams",
    "BoundaryPair",
    "EndpointSolution",
    "BoundEvaluation",
    "compute_phi",
    "f_eval",
    "g_eval",
    "solve_endpoint",
    "theorem_bound",
    "optimize_bound",
]

TWO_LN2 = 2.0 * math.log(2.0)

# The ratio A_f/B_f = a^2 is an exact degeneracy (Q1 = 0, log argument = 1);
# pairs this close to it are rejected rather than evaluated as 0/0 noise.
RATIO_MARGIN = 1e-9

# A computed difference smaller than this fraction of its largest term is
# below float cancellation noise and unusable; 1e-10 leaves a ~1e-6 relative
# accuracy margin over the ~1e-16 rounding of each term.
_CANCEL_FLOOR = 1e-10

# Bracket expansion cap when hunting for the endpoint A0.
_BRACKET_CAP = 1e30

# Penalty value returned to the simplex for infeasible probe points.  Finite,
# so the minimizer backs off instead of aborting.
_PENALTY = 1e9


@dataclass(frozen=True)
class ChannelParams:
    """Amplitude gains of the relay channel: a source-to-relay, b relay-to-destination."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise ValueError(f"gain a must be positive and finite, got {self.a!r}")
        if not (self.b > 0.0 and math.isfinite(self.b)):
            raise ValueError(f"gain b must be positive and finite, got {self.b!r}")


@dataclass(frozen=True)
class BoundaryPair:
    """Terminal values (A_f, B_f) of the 2-D system; the outer search variables."""

    A_f: float
    B_f: float

    def __post_init__(self) -> None:
        if not (self.A_f > 0.0 and math.isfinite(self.A_f)):
            raise ValueError(f"A_f must be positive and finite, got {self.A_f!r}")
        if not (self.B_f > 0.0 and math.isfinite(self.B_f)):
            raise ValueError(f"B_f must be positive and finite, got {self.B_f!r}")

    def ratio(self) -> float:
        return self.A_f / self.B_f


@dataclass(frozen=True)
class EndpointSolution:
    """Unique endpoint of the integral-equation system for one boundary pair.

    Attributes:
        phi: Conserved constant A*B + 1/A - 1/B along the trajectory.
        A0: Value of A at S = 0 (the trajectory start).
        psi: Positive constant recovered from the second integral equation.
        B0: f(A0), the B value at S = 0.
        A_f: Echo of the input pair (terminal A).
        B_f: Echo of the input pair (terminal B).
        i1_value: First cumulative integral of f/(1+w f^2) over [A_f, A0].
        i2_value: Second cumulative integral of f^2/(1+w f^2) over [A_f, A0].
        residual_first: Scaled residual of the first integral equation.
        residual_second: Scaled residual of the second integral equation.
    """

    phi: float
    A0: float
    psi: float
    B0: float
    A_f: float
    B_f: float
    i1_value: float
    i2_value: float
    residual_first: float
    residual_second: float


@dataclass(frozen=True)
class BoundEvaluation:
    """Energy-per-bit bound at one boundary pair.

    Attributes:
        lam: The multiplier scale lambda = a^2 c1^2 / A0.
        c1: The conserved cube root b*psi.
        Q1: Source energy.
        Q2: Relay energy.
        log_arg: Argument of the log in the bound denominator (> 1 off
            the degenerate boundary).
        energy_per_bit: (Q1 + Q2) / (0.5 * log2(log_arg)).
        normalized: energy_per_bit / (2 ln 2); 1.0 is direct transmission.
    """

    lam: float
    c1: float
    Q1: float
    Q2: float
    log_arg: float
    energy_per_bit: float
    normalized: float


def compute_phi(pair: BoundaryPair) -> float:
    """Conserved constant phi = A_f*B_f + 1/A_f - 1/B_f of the 2-D system."""
    return pair.A_f * pair.B_f + 1.0 / pair.A_f - 1.0 / pair.B_f


def f_eval(w: float, phi: float) -> float:
    """Positive root B of w*B + 1/w - 1/B = phi, as a function of w.

    Equivalent closed form: (phi*w - 1 + sqrt((phi*w - 1)^2 + 4 w^3)) / (2 w^2).
    When phi*w - 1 < 0 the literal form subtracts nearly equal quantities, so
    the rationalized branch 2w / (sqrt(...) + 1 - phi*w) is used instead.

    Args:
        w: Evaluation point, strictly positive.
        phi: The conserved constant.

    Returns:
        f(w) > 0.

    Raises:
        DomainError: If w <= 0.
    """
    if w <= 0.0:
        raise DomainError(f"f is defined for w > 0, got {w!r}")
    t = phi * w - 1.0
    disc = math.sqrt(t * t + 4.0 * w * w * w)
    if t < 0.0:
        return 2.0 * w / (disc - t)
    return (t + disc) / (2.0 * w * w)


def _integrand_first(w: float, phi: float) -> float:
    fw = f_eval(w, phi)
    return fw / (1.0 + w * fw * fw)


def _integrand_second(w: float, phi: float) -> float:
    fw = f_eval(w, phi)
    return fw * fw / (1.0 + w * fw * fw)


def g_eval(
    A0: float,
    pair: BoundaryPair,
    channel: ChannelParams,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Zero function whose unique root locates the endpoint A0.

    g(A0) = 1/B_f + I1(A0) - (a/sqrt(A_f B_f)) * exp(-(H(A0) - I2(A0))/2)
    with I1 the integral of f/(1+w f^2), I2 of f^2/(1+w f^2), and H of 1/w,
    all over [A_f, A0].  Both non-elementary integrals go through
    integrate_adaptive; H is ln(A0/A_f) exactly.  g is strictly increasing
    and g(A_f) <= 0 whenever A_f/B_f <= a^2, so bracketing on [A_f, inf) is
    safe.

    Args:
        A0: Candidate endpoint, at least A_f.
        pair: Terminal pair fixing phi.
        channel: Supplies the gain a.
        quadrature: Quadrature control.

    Returns:
        g(A0); negative below the root, positive above.
    """
    if A0 < pair.A_f:
        raise DomainError(f"A0={A0!r} lies below A_f={pair.A_f!r}")
    phi = compute_phi(pair)
    i1 = integrate_adaptive(lambda w: _integrand_first(w, phi), pair.A_f, A0, quadrature)
    i2 = integrate_adaptive(lambda w: _integrand_second(w, phi), pair.A_f, A0, quadrature)
    exponent = -0.5 * (math.log(A0 / pair.A_f) - i2)
    return (
        1.0 / pair.B_f
        + i1
        - (channel.a / math.sqrt(pair.A_f * pair.B_f)) * math.exp(exponent)
    )


class _CumulativeIntegrals:
    """Anchored cumulative values of the two endpoint integrals.

    Root-finding evaluates the zero function at many nearby A0 candidates.
    Rather than integrating from A_f every time, completed prefixes are kept
    as anchors and only the gap from the nearest anchor below is integrated.
    Anchor chains stay short, so the accumulated quadrature error is a small
    multiple of the per-call tolerance.
    """

    def __init__(self, phi: float, A_f: float, quadrature: QuadratureSpec) -> None:
        self._phi = phi
        self._quadrature = quadrature
        self._ws = [A_f]
        self._i1 = [0.0]
        self._i2 = [0.0]

    def upto(self, w: float) -> tuple[float, float]:
        """Return (I1(w), I2(w)) for w >= the anchor origin A_f."""
        idx = bisect.bisect_right(self._ws, w) - 1
        base_w = self._ws[idx]
        phi = self._phi
        i1 = self._i1[idx] + integrate_adaptive(
            lambda x: _integrand_first(x, phi), base_w, w, self._quadrature
        )
        i2 = self._i2[idx] + integrate_adaptive(
            lambda x: _integrand_second(x, phi), base_w, w, self._quadrature
        )
        if w > base_w:
            at = idx + 1
            self._ws.insert(at, w)
            self._i1.insert(at, i1)
            self._i2.insert(at, i2)
        return i1, i2


def solve_endpoint(
    pair: BoundaryPair,
    channel: ChannelParams,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
    root_tol: float = 1e-13,
) -> EndpointSolution:
    """Solve the coupled integral equations for the endpoint (A0, psi).

    A0 is the unique root of the monotone zero function; the bracket starts
    at [A_f, max(2 A_f, 1)] and the upper end doubles until the sign flips.
    psi then follows from the second integral equation, and the first
    equation is evaluated as an independent residual check.

    Args:
        pair: Terminal pair with A_f/B_f <= a^2.
        channel: Channel gains.
        quadrature: Quadrature control for the integral evaluations.
        root_tol: Relative bracket tolerance for the A0 root.

    Returns:
        The endpoint solution with both residuals populated.

    Raises:
        DomainError: If the pair violates A_f/B_f <= a^2.
        BracketOverflowError: If no sign change appears below the growth cap.
    """
    a = channel.a
    if pair.ratio() > a * a * (1.0 + 1e-12):
        raise DomainError(
            f"A_f/B_f={pair.ratio()!r} exceeds a^2={a * a!r}; no endpoint exists"
        )
    phi = compute_phi(pair)
    cache = _CumulativeIntegrals(phi, pair.A_f, quadrature)
    inv_Bf = 1.0 / pair.B_f
    log_Af = math.log(pair.A_f)
    scale = a / math.sqrt(pair.A_f * pair.B_f)

    def zero(A0: float) -> float:
        i1, i2 = cache.upto(A0)
        exponent = -0.5 * (math.log(A0) - log_Af - i2)
        return inv_Bf + i1 - scale * math.exp(exponent)

    if zero(pair.A_f) >= 0.0:
        # Only possible (up to roundoff) at the exact ratio boundary, where
        # the root sits at A_f itself and both integrals are empty.
        A0 = pair.A_f
    else:
        hi = max(2.0 * pair.A_f, 1.0)
        while zero(hi) <= 0.0:
            hi *= 2.0
            if hi > _BRACKET_CAP:
                raise BracketOverflowError(
                    f"no sign change of the zero function below {_BRACKET_CAP:g}"
                )
        A0 = find_root_bracketed(zero, pair.A_f, hi, tol=root_tol)
    i1, i2 = cache.upto(A0)
    # Second equation defines psi; evaluated in log space to dodge overflow
    # of A0^3 for extreme pairs.
    log_psi = 0.5 * (3.0 * math.log(A0) + math.log(pair.B_f) - 4.0 * math.log(a) - i2)
    psi = math.exp(log_psi)
    B0 = f_eval(A0, phi)

    rhs_first = A0 / (a * psi) - inv_Bf
    res_first = (i1 - rhs_first) / max(1.0, abs(i1), abs(rhs_first))
    rhs_second = 3.0 * math.log(A0) + math.log(pair.B_f) - 4.0 * math.log(a) - 2.0 * log_psi
    res_second = (i2 - rhs_second) / max(1.0, abs(i2))
    return EndpointSolution(
        phi=phi,
        A0=A0,
        psi=psi,
        B0=B0,
        A_f=pair.A_f,
        B_f=pair.B_f,
        i1_value=i1,
        i2_value=i2,
        residual_first=res_first,
        residual_second=res_second,
    )


def theorem_bound(
    pair: BoundaryPair,
    channel: ChannelParams,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
    root_tol: float = 1e-13,
) -> BoundEvaluation:
    """Energy-per-bit bound E(A_f, B_f) at one strictly interior pair.

    Writing J for the second cumulative integral, the source energy is
    Q1 = (exp(J) - 1)/a^2, algebraically identical to the closed form
    -1/a^2 + A0^3 B_f/(a^6 psi^2) but free of its catastrophic cancellation
    near the degenerate boundary.  Q2 and the log argument follow the closed
    forms directly.

    Args:
        pair: Terminal pair with A_f/B_f strictly inside the a^2 boundary.
        channel: Channel gains.
        quadrature: Quadrature control.
        root_tol: Root tolerance passed to the endpoint solve.

    Returns:
        The bound evaluation with all intermediate constants.

    Raises:
        DegenerateBoundError: At or numerically too close to the boundary
            (Q1 <= 0, log_arg <= 1, or nonpositive total energy).
    """
    a, b = channel.a, channel.b
    if pair.ratio() > a * a * (1.0 - RATIO_MARGIN):
        raise DegenerateBoundError(
            f"A_f/B_f={pair.ratio()!r} within {RATIO_MARGIN:g} of the a^2 boundary"
        )
    ep = solve_endpoint(pair, channel, quadrature, root_tol)
    A0, psi, B0 = ep.A0, ep.psi, ep.B0
    c1 = b * psi
    lam = a * a * c1 * c1 / A0
    Q1 = math.expm1(ep.i2_value) / (a * a)
    q2_cubic = A0**3 / (a**5 * b * b * psi**3)
    q2_mixed = (
        A0 * A0 * (pair.A_f * pair.B_f**2 - 1.0) / (a**4 * b * b * psi * psi * pair.B_f)
    )
    Q2 = -1.0 / (b * b) + q2_cubic + q2_mixed
    arg_scale = max(1.0 / pair.B_f, A0 * B0, pair.A_f * pair.B_f)
    log_arg = (A0 / (a * a)) * (1.0 / pair.B_f + A0 * B0 - pair.A_f * pair.B_f)
    if not (math.isfinite(Q2) and math.isfinite(log_arg)):
        raise DegenerateBoundError("non-finite energy terms; pair outside float range")
    if Q1 <= 0.0:
        raise DegenerateBoundError(f"Q1={Q1!r} is not positive")
    total = Q1 + Q2
    # Both Q2 and log_arg are differences of like-sized terms that cancel to
    # zero at the a^2 boundary.  Once the surviving value drops below the
    # rounding scale of those terms, the quotient is pure noise (it can land
    # anywhere, including far below the true limit), so treat it as
    # degenerate rather than return a fabricated bound.
    q2_noise = _CANCEL_FLOOR * max(1.0 / (b * b), abs(q2_cubic), abs(q2_mixed))
    if total <= q2_noise:
        raise DegenerateBoundError(
            f"total energy {total!r} below the cancellation floor {q2_noise!r}"
        )
    arg_noise = _CANCEL_FLOOR * (A0 / (a * a)) * arg_scale
    if log_arg - 1.0 <= arg_noise:
        raise DegenerateBoundError(
            f"log argument {log_arg!r} within the cancellation floor of 1"
        )
    energy = total / (0.5 * math.log2(log_arg))
    return BoundEvaluation(
        lam=lam,
        c1=c1,
        Q1=Q1,
        Q2=Q2,
        log_arg=log_arg,
        energy_per_bit=energy,
        normalized=energy / TWO_LN2,
    )


_FEASIBILITY_ERRORS = (
    DegenerateBoundError,
    BracketOverflowError,
    NoBracketError,
    DepthExceededError,
    NonFiniteError,
    OverflowError,
)

# Coarse scan settles for shallower quadrature and root accuracy; the winners
# are re-evaluated at full precision during refinement.  The depth budget is
# deliberately tight: smooth integrands meet 1e-9 well under depth 20, while
# extreme scan pairs (rho -> 1, large B_f) produce jitter-limited integrands
# that refine to the width floor at great cost.  Capping the depth turns those
# points into fast infeasibility skips instead of multi-second grinds.
_SCAN_QUADRATURE = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-9, max_depth=30)
_SCAN_ROOT_TOL = 1e-9


def _rho_grid() -> list[float]:
    # 24 points on [1e-3, 1 - 1e-6]: 12 log-spaced in rho up to 1/2, then 12
    # log-spaced in 1 - rho down to 1e-6.
    first = [
        10.0 ** (-3.0 + i * (math.log10(0.5) + 3.0) / 12.0) for i in range(12)
    ]
    second = [
        1.0 - 10.0 ** (math.log10(0.5) + i * (-6.0 - math.log10(0.5)) / 11.0)
        for i in range(12)
    ]
    return first + second


def _bf_grid(lo: float, hi: float, n: int) -> list[float]:
    llo, lhi = math.log10(lo), math.log10(hi)
    return [10.0 ** (llo + i * (lhi - llo) / (n - 1)) for i in range(n)]


def optimize_bound(
    channel: ChannelParams,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[BoundaryPair, BoundEvaluation]:
    """Infimum of the bound over valid pairs (A_f, B_f) for one channel.

    Strategy: scan a 24 x 25 log grid in (rho, B_f) with A_f = rho a^2 B_f,
    rho in [1e-3, 1 - 1e-6] and B_f in [1e-3, 1e3], then refine from the
    best three grid points with Nelder-Mead in (logit rho, ln B_f)
    coordinates, penalizing constraint violations.  If the refined optimum
    lands on the B_f cap the search is rerun once with the cap widened
    tenfold and a warning is emitted.

    Args:
        channel: Channel gains.
        quadrature: Full-precision quadrature control for refinement and the
            returned evaluation.

    Returns:
        Pair (best boundary pair, its full-precision evaluation).

    Raises:
        NoFeasiblePointError: If every grid point is degenerate.
    """
    pair, ev, on_cap = _optimize_bound_once(channel, quadrature, bf_lo=1e-3, bf_hi=1e3)
    if on_cap:
        warnings.warn(
            f"optimum B_f={pair.B_f:g} landed on the search cap; widening tenfold",
            RuntimeWarning,
            stacklevel=2,
        )
        pair, ev, still_on_cap = _optimize_bound_once(
            channel, quadrature, bf_lo=1e-4, bf_hi=1e4
        )
        if still_on_cap:
            warnings.warn(
                f"optimum B_f={pair.B_f:g} still on the widened cap; result suspect",
                RuntimeWarning,
                stacklevel=2,
            )
    return pair, ev


def _optimize_bound_once(
    channel: ChannelParams,
    quadrature: QuadratureSpec,
    bf_lo: float,
    bf_hi: float,
) -> tuple[BoundaryPair, BoundEvaluation, bool]:
    a = channel.a
    a2 = a * a

    candidates: list[tuple[float, float, float]] = []
    for rho in _rho_grid():
        for bf in _bf_grid(bf_lo, bf_hi, 25):
            try:
                ev = theorem_bound(
                    BoundaryPair(rho * a2 * bf, bf),
                    channel,
                    _SCAN_QUADRATURE,
                    _SCAN_ROOT_TOL,
                )
            except _FEASIBILITY_ERRORS:
                continue
            if math.isfinite(ev.normalized):
                candidates.append((ev.normalized, rho, bf))
    if not candidates:
        raise NoFeasiblePointError(
            f"every grid point degenerate for a={a!r}, b={channel.b!r}"
        )
    candidates.sort()

    def objective(x) -> float:
        logit_rho, log_bf = float(x[0]), float(x[1])
        if abs(logit_rho) > 60.0 or abs(log_bf) > 60.0:
            return _PENALTY
        rho = 1.0 / (1.0 + math.exp(-logit_rho))
        bf = math.exp(log_bf)
        if rho >= 1.0 - RATIO_MARGIN:
            return _PENALTY
        try:
            ev = theorem_bound(BoundaryPair(rho * a2 * bf, bf), channel, quadrature)
        except _FEASIBILITY_ERRORS:
            return _PENALTY
        return ev.normalized if math.isfinite(ev.normalized) else _PENALTY

    best_x = None
    best_val = math.inf
    for _, rho, bf in candidates[:3]:
        start = [math.log(rho / (1.0 - rho)), math.log(bf)]
        x, val = minimize_simplex(objective, start, SimplexOptions())
        if val < best_val:
            best_val = val
            best_x = x

    if best_x is None or best_val >= _PENALTY:
        raise NoFeasiblePointError("refinement found no feasible point")
    rho = 1.0 / (1.0 + math.exp(-float(best_x[0])))
    bf = math.exp(float(best_x[1]))
    pair = BoundaryPair(rho * a2 * bf, bf)
    ev = theorem_bound(pair, channel, quadrature)
    on_cap = bf <= bf_lo * 1.01 or bf >= bf_hi * 0.99
    return pair, ev, on_cap
