"""Explicit finite-k relay codes and their matrix-formula evaluation.

build_code discretizes the trajectory ODE with the component-sequential
Euler recursion, extracting the auxiliary sequences u, z, r and the strictly
lower-triangular relay matrix D they induce.  evaluate_rank1 computes the
energy-per-bit of any (s, D) scheme directly from the defining matrix
formula; it shares no arithmetic with the builder, so agreement between the
two is a genuine cross-check of the whole pipeline.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .bound import ChannelParams, EndpointSolution
from .errors import DenominatorCollapseError, FactorizationFailureError
from .trajectory import TrajectoryGrid

__all__ = [
    "RelayCode",
    "CodeEvaluation",
    "DEFAULT_K_CAP",
    "build_code",
    "evaluate_rank1",
    "export_code",
    "parse_code",
]

TWO_LN2 = 2.0 * math.log(2.0)

# Dense k x k storage and a cubic factorization keep desk-scale runtimes only
# up to a few thousand; larger k needs an explicit override.
DEFAULT_K_CAP = 4096

_COLLAPSE_TOL = 1e-12


@dataclass(frozen=True)
class RelayCode:
    """A finite-k rank-1 linear relay code.

    Attributes:
        k: Blocklength.
        delta: Step size Q1/k; every source entry is sqrt(delta).
        s: Source direction, length k.
        u, z, r: Auxiliary sequences of the optimality conditions.
        D: Strictly lower-triangular relay matrix, k x k.
        lam: The multiplier scale used in the D entries.
    """

    k: int
    delta: float
    s: np.ndarray
    u: np.ndarray
    z: np.ndarray
    r: np.ndarray
    D: np.ndarray
    lam: float


@dataclass(frozen=True)
class CodeEvaluation:
    """Energy-per-bit of one (s, D) scheme via the matrix formula.

    Attributes:
        numerator_energy: ||s||^2 + a^2 ||D s||^2 + trace(D D^T).
        mutual_info_bits: 0.5 log2(1 + s^T (I+abD^T)(I+b^2 D D^T)^{-1} (I+abD) s).
        energy_per_bit: Ratio of the two.
        normalized: energy_per_bit / (2 ln 2).
    """

    numerator_energy: float
    mutual_info_bits: float
    energy_per_bit: float
    normalized: float


def build_code(
    channel: ChannelParams,
    endpoint: EndpointSolution,
    traj: TrajectoryGrid,
    lam: float,
    Q1: float,
    k: int,
) -> RelayCode:
    """Construct the k-dimensional relay code from the trajectory data.

    The state (V, Z, T, R) starts at (V(0), Z(0), 0, 0) taken from the
    reconstructed trajectory and advances with step delta = Q1/k.  Per step,
    in order: u_i and z_i from the previous T, R, S; then V and Z absorb
    -u_i z_i and -z_i^2; then r_i from the fresh V, Z; then T and R absorb
    r_i s_i and r_i^2.  This is the component-sequential Euler sweep, since
    every increment equals delta times the matching derivative component.
    Finally D_ij = -a^2 u_i s_j + z_i r_j / lam on the strict lower triangle.

    Args:
        channel: Channel gains.
        endpoint: Endpoint solution (unused numerically, kept for provenance
            of V(0), Z(0) which must come from its trajectory).
        traj: Reconstructed trajectory; supplies V(0) and Z(0).
        lam: Multiplier scale from lambda_and_Q1.
        Q1: Source energy from lambda_and_Q1.
        k: Blocklength, at least 1.

    Returns:
        The assembled relay code.

    Raises:
        DenominatorCollapseError: If the positivity condition
            (1 + a^2 S)(lam - R) + a^2 T^2 > 0 fails numerically at any step.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    a, b = channel.a, channel.b
    a2 = a * a
    V = float(traj.V[0])
    Z = float(traj.Z[0])
    T = 0.0
    R = 0.0
    delta = Q1 / k
    s_i = math.sqrt(delta)
    u = np.empty(k)
    z = np.empty(k)
    r = np.empty(k)
    for i in range(k):
        S_prev = i * delta
        den = (1.0 + a2 * S_prev) * (lam - R) + a2 * T * T
        if den < _COLLAPSE_TOL:
            raise DenominatorCollapseError(
                f"denominator {den!r} below {_COLLAPSE_TOL:g} at step {i + 1} of {k}"
            )
        u_i = T * s_i / den
        z_i = lam * (1.0 + a2 * S_prev) * s_i / den
        V -= u_i * z_i
        Z -= z_i * z_i
        r_i = lam * (a * b + a2 * b * b * V) * s_i / (lam + b * b * Z)
        T += r_i * s_i
        R += r_i * r_i
        u[i] = u_i
        z[i] = z_i
        r[i] = r_i
    s = np.full(k, s_i)
    D = np.tril(-a2 * np.outer(u, s) + np.outer(z, r) / lam, k=-1)
    return RelayCode(k=k, delta=delta, s=s, u=u, z=z, r=r, D=D, lam=lam)


def evaluate_rank1(channel: ChannelParams, s: np.ndarray, D: np.ndarray) -> CodeEvaluation:
    """Energy-per-bit of an (s, D) scheme straight from the matrix formula.

    The denominator quadratic form is computed by assembling
    M = I + b^2 D D^T and solving M x = (I + a b D) s through a Cholesky
    factorization; no builder sequences are consulted.

    Args:
        channel: Channel gains.
        s: Source vector, nonzero, length k.
        D: Relay matrix, k x k, strictly lower-triangular.

    Returns:
        The evaluation record.

    Raises:
        ValueError: If D is not strictly lower-triangular or s is zero.
        FactorizationFailureError: If M fails the positive-definite
            factorization (corrupted D).
    """
    s = np.asarray(s, dtype=float)
    D = np.asarray(D, dtype=float)
    k = s.shape[0]
    if D.shape != (k, k):
        raise ValueError(f"D must be {k} x {k}, got {D.shape}")
    if np.any(np.triu(D) != 0.0):
        raise ValueError("D must be strictly lower-triangular")
    norm_s2 = float(s @ s)
    if norm_s2 == 0.0:
        raise ValueError("s must be nonzero")
    a, b = channel.a, channel.b
    Ds = D @ s
    numerator = norm_s2 + a * a * float(Ds @ Ds) + float(np.sum(D * D))
    M = np.eye(k) + (b * b) * (D @ D.T)
    v = s + a * b * Ds
    try:
        factor = cho_factor(M, lower=True)
    except LinAlgError as exc:
        raise FactorizationFailureError(f"I + b^2 D D^T not positive definite: {exc}")
    x = cho_solve(factor, v)
    quad = float(v @ x)
    # log1p keeps the rate accurate for near-zero-power inputs, where
    # 1 + quad would round away most of quad.
    bits = 0.5 * math.log1p(quad) / math.log(2.0)
    energy = numerator / bits
    return CodeEvaluation(
        numerator_energy=numerator,
        mutual_info_bits=bits,
        energy_per_bit=energy,
        normalized=energy / TWO_LN2,
    )


def export_code(code: RelayCode, channel: ChannelParams) -> str:
    """Serialize a relay code to the textual exchange format.

    Layout: a header line `k a b lambda Q1`, one line with the k entries of
    s, then the strict lower triangle of D row by row starting at row 2
    (row i carries i-1 entries).  All floats use 17 significant digits, so
    parsing reproduces them bit for bit.
    """
    fmt = "%.17g"
    q1 = code.k * code.delta
    lines = [
        f"{code.k} {fmt % channel.a} {fmt % channel.b} {fmt % code.lam} {fmt % q1}",
        " ".join(fmt % v for v in code.s),
    ]
    for i in range(1, code.k):
        lines.append(" ".join(fmt % v for v in code.D[i, :i]))
    return "\n".join(lines) + "\n"


def parse_code(source: str | Path) -> tuple[ChannelParams, RelayCode]:
    """Parse the textual exchange format back into a channel and code.

    Accepts either the text itself or a path to a file holding it.  The u,
    z, r sequences are not part of the format; they are restored as empty
    arrays since only (s, D, lambda) matter for evaluation.

    Raises:
        ValueError: On malformed content (wrong counts, non-numeric fields).
    """
    if isinstance(source, Path):
        text = source.read_text()
    else:
        text = source
    stream = io.StringIO(text)
    header = stream.readline().split()
    if len(header) != 5:
        raise ValueError(f"header must have 5 fields, got {len(header)}")
    k = int(header[0])
    a, b, lam, q1 = (float(x) for x in header[1:])
    s = np.array([float(x) for x in stream.readline().split()])
    if s.shape != (k,):
        raise ValueError(f"expected {k} source entries, got {s.shape[0]}")
    D = np.zeros((k, k))
    for i in range(1, k):
        row = [float(x) for x in stream.readline().split()]
        if len(row) != i:
            raise ValueError(f"row {i + 1} must carry {i} entries, got {len(row)}")
        D[i, :i] = row
    channel = ChannelParams(a=a, b=b)
    empty = np.empty(0)
    code = RelayCode(
        k=k, delta=q1 / k, s=s, u=empty, z=empty, r=empty, D=D, lam=lam
    )
    return channel, code
