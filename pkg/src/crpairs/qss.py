"""Fast-equilibrium (quasi-steady-state) pair abundances.

The consumption and interference processes relax much faster than birth and
death, so the pair abundances solve the algebraic system obtained by setting
every pair derivative to zero while the species totals are held fixed.  This
module provides the closed-form solutions channel by channel and a damped
Newton solver for the fully general case, which doubles as the oracle for the
closed forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, InfeasibleRootError
from .model import ModelConfig, derive_constants

#: feasibility slack used when filtering candidate roots
_FEAS_EPS = 1e-9


@dataclass(frozen=True)
class CubicCoefficients:
    """Coefficients and discriminant data of the single-channel interference cubic.

    The cubic is x^3 + phi2 x^2 + phi1 x + phi0 = 0 with its depressed form
    t^3 + psi t + varphi = 0 and discriminant = -4 psi^3 - 27 varphi^2.
    """

    phi0: float
    phi1: float
    phi2: float
    psi: float
    varphi: float
    discriminant: float


def intra_cubic_coefficients(R: float, C: float, K: float, beta: float) -> CubicCoefficients:
    """Coefficients of the pair-abundance cubic for one consumer, one resource,
    chasing plus same-species interference."""
    phi2 = 2.0 * beta * K**2 - K - C - 2.0 * R
    phi1 = 2.0 * C * R + K * R + R**2
    phi0 = -C * R**2
    psi = phi1 - phi2**2 / 3.0
    varphi = phi0 - phi1 * phi2 / 3.0 + 2.0 * phi2**3 / 27.0
    disc = -4.0 * psi**3 - 27.0 * varphi**2
    return CubicCoefficients(phi0=phi0, phi1=phi1, phi2=phi2, psi=psi,
                             varphi=varphi, discriminant=disc)


def _cbrt(v: float) -> float:
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def cubic_real_roots(coeffs: CubicCoefficients) -> tuple[float, ...]:
    """All real roots of the cubic, via the trigonometric branch when the
    discriminant is positive (three real roots) and Cardano otherwise."""
    phi2, psi, varphi, disc = coeffs.phi2, coeffs.psi, coeffs.varphi, coeffs.discriminant
    shift = phi2 / 3.0
    if disc > 0.0:
        # three distinct real roots
        amp = 2.0 * math.sqrt(-psi / 3.0)
        arg = -(varphi / 2.0) / (-psi / 3.0) ** 1.5
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg) / 3.0
        return tuple(amp * math.cos(theta - 2.0 * math.pi * j / 3.0) - shift for j in range(3))
    if psi == 0.0 and varphi == 0.0:
        return (-shift,)
    root_term = math.sqrt(max(-disc / 108.0, 0.0))
    t1 = _cbrt(-varphi / 2.0 + root_term)
    t2 = _cbrt(-varphi / 2.0 - root_term)
    return (t1 + t2 - shift,)


def _polish_root(x: float, c: CubicCoefficients, steps: int = 2) -> float:
    # trig/Cardano formulas lose digits near a vanishing discriminant
    for _ in range(steps):
        p = ((x + c.phi2) * x + c.phi1) * x + c.phi0
        dp = (3.0 * x + 2.0 * c.phi2) * x + c.phi1
        if dp == 0.0:
            break
        x -= p / dp
    return x


def qss_chasing_quadratic(R: float, C: float, K: float) -> float:
    """Chasing-pair abundance for one consumer and one resource species.

    Smaller root of x^2 - (R + C + K) x + R C = 0, evaluated in the
    cancellation-free form 2RC / (s + sqrt(s^2 - 4RC)); always in [0, min(R, C)].
    """
    if R < 0 or C < 0 or K < 0:
        raise DomainError("R, C, K must be non-negative")
    if R == 0.0 or C == 0.0:
        return 0.0
    s = R + C + K
    disc = s * s - 4.0 * R * C
    # non-negative by AM-GM; tolerate roundoff only
    assert disc > -1e-12 * s * s
    x = 2.0 * R * C / (s + math.sqrt(max(disc, 0.0)))
    # two Newton polish steps on the defining quadratic
    for _ in range(2):
        dp = 2.0 * x - s
        if dp == 0.0:
            break
        x -= (x * x - s * x + R * C) / dp
    return min(max(x, 0.0), min(R, C))


def qss_intra_cubic(R: float, C: float, K: float, beta: float) -> float:
    """Pair abundance with same-species interference: feasible real root of the
    cubic in [0, min(R, C)].

    When several real roots are feasible the one continuously connected to the
    beta = 0 quadratic solution is chosen by a short homotopy in beta.
    """
    if min(R, C, K, beta) < 0:
        raise DomainError("inputs must be non-negative")
    if R == 0.0 or C == 0.0:
        return 0.0
    if beta == 0.0:
        return qss_chasing_quadratic(R, C, K)

    hi = min(R, C)
    slack = _FEAS_EPS * max(1.0, hi)

    def feasible(roots):
        return [min(max(r, 0.0), hi) for r in roots if -slack <= r <= hi + slack]

    coeffs = intra_cubic_coefficients(R, C, K, beta)
    roots = [_polish_root(r, coeffs) for r in cubic_real_roots(coeffs)]
    cands = feasible(roots)
    if len(cands) == 1:
        return cands[0]
    if not cands:
        raise InfeasibleRootError(
            f"no cubic root in [0, {hi}] for R={R}, C={C}, K={K}, beta={beta}",
            candidates=roots,
        )
    # several feasible roots: track the physical branch from beta = 0 upward
    x = qss_chasing_quadratic(R, C, K)
    for frac in (0.25, 0.5, 0.75, 1.0):
        cj = intra_cubic_coefficients(R, C, K, beta * frac)
        rj = [_polish_root(r, cj) for r in cubic_real_roots(cj)]
        fj = feasible(rj)
        if not fj:
            raise InfeasibleRootError(
                "homotopy lost the feasible branch", candidates=rj)
        x = min(fj, key=lambda r: abs(r - x))
    return x


class IntraApproximation(enum.Enum):
    """Closed-form approximations to the interference cubic in the dilute regime."""

    QUASI_RIGOROUS = "quasi_rigorous"
    SMALL_BETA = "small_beta"
    LARGE_BETA = "large_beta"


def qss_intra_approx(R: float, C: float, K: float, beta: float,
                     variant: IntraApproximation = IntraApproximation.QUASI_RIGOROUS) -> float:
    """Dilute-regime (R >> C) closed forms for the interference channel.

    QUASI_RIGOROUS keeps the full square root; SMALL_BETA is its first-order
    expansion, valid for 8 beta C / (1 + R/K)^2 << 1; LARGE_BETA covers the
    opposite extreme.  Total functions of non-negative inputs; the intended
    regime is not enforced.
    """
    if min(R, C, K, beta) < 0:
        raise DomainError("inputs must be non-negative")
    if R == 0.0 or C == 0.0:
        return 0.0
    variant = IntraApproximation(variant)
    half = 0.5 * (K + R)
    if variant is IntraApproximation.QUASI_RIGOROUS:
        return R * C / (math.sqrt(half**2 + 2.0 * C * beta * K**2) + half)
    if variant is IntraApproximation.SMALL_BETA:
        return R * C / ((K + R) + 2.0 * K * beta * C / (1.0 + R / K))
    root = K * math.sqrt(2.0 * C * beta)
    if root == 0.0:
        return R * C / (K + R)
    return R * C / (root + (K + R) ** 2 / (8.0 * root) + half)


def qss_inter_pair(R: float, C1: float, C2: float, K1: float, K2: float,
                   gamma: float) -> tuple[float, float]:
    """Chasing-pair abundances for two consumer species whose free individuals
    form cross-species interference pairs, in the dilute regime.

    Symmetric under the simultaneous swap (C1, K1) <-> (C2, K2).
    """
    if min(R, C1, C2, K1, K2, gamma) < 0:
        raise DomainError("inputs must be non-negative")

    A1 = 1.0 + R / K1
    A2 = 1.0 + R / K2

    def one(Ci, Cj, Ai, Aj, Ki):
        if Ci == 0.0 or R == 0.0:
            return 0.0
        base = gamma * (Cj - Ci) + Ai * Aj
        denom = base + math.sqrt(base * base + 4.0 * gamma * Ci * Ai * Aj)
        return 2.0 * Ci * Aj * (R / Ki) / denom

    return one(C1, C2, A1, A2, K1), one(C2, C1, A2, A1, K2)


@dataclass(frozen=True)
class QssSolution:
    """Pair abundances solving the fast-equilibrium system at fixed totals."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    residual: float
    branch: str

    def consumers_bound(self) -> np.ndarray:
        return self.x.sum(axis=1) + 2.0 * self.y + self.z.sum(axis=1)


def qss_generic_numeric(state_totals: dict, config: ModelConfig,
                        tol: float = 1e-12, max_iter: int = 200) -> QssSolution:
    """Solve the full QSS system for arbitrary M, N and any scenario.

    ``state_totals`` maps ``"C"`` to the consumer totals (length M) and ``"R"``
    to the resource totals (length N).  The pair equations reduce to M coupled
    equations for the free consumer abundances, solved by Picard iteration
    followed by damped Newton with an analytic Jacobian.  The reported residual
    is the largest conservation mismatch scaled by max(1, total).
    """
    C = np.atleast_1d(np.asarray(state_totals["C"], float))
    R = np.atleast_1d(np.asarray(state_totals["R"], float))
    if np.any(C < 0) or np.any(R < 0):
        raise DomainError("totals must be non-negative")
    M, N = config.M, config.N
    if C.shape != (M,) or R.shape != (N,):
        raise DomainError(f"totals must have shapes ({M},), ({N},)")

    cons = derive_constants(config)
    invK = np.where(np.isfinite(cons.K), 1.0 / np.where(cons.K > 0, cons.K, 1.0), 0.0)
    if np.any(cons.K == 0):
        raise DomainError("instant-capture channels (K = 0) are not supported here")
    beta, gamma = cons.beta, cons.gamma

    def free_resources(c):
        return R / (1.0 + c @ invK)

    def residual_vec(c):
        r = free_resources(c)
        return c * (1.0 + invK @ r + 2.0 * beta * c + gamma @ c) - C

    # Picard: c = C / (1 + loads), positive and typically contracting
    c = C / (1.0 + invK @ R)
    for _ in range(60):
        r = free_resources(c)
        denom = 1.0 + invK @ r + 2.0 * beta * c + gamma @ c
        c_new = C / denom
        if np.max(np.abs(c_new - c)) <= 1e-14 * max(1.0, np.max(c_new)):
            c = c_new
            break
        c = c_new

    scale = np.maximum(1.0, C)
    f = residual_vec(c)
    it = 0
    while np.max(np.abs(f) / scale) > tol and it < max_iter:
        r = free_resources(c)
        # d r_l / d c_j = -r_l^2 / (R_l K_jl)
        dr = np.zeros((N, M))
        nz = R > 0
        dr[nz, :] = -(r[nz] ** 2)[:, None] * invK.T[nz, :] / R[nz][:, None]
        J = np.diag(1.0 + invK @ r + 4.0 * beta * c + gamma @ c) \
            + c[:, None] * (invK @ dr + gamma)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in QSS Newton",
                                   last_iterate=c, residual=float(np.max(np.abs(f)))) from exc
        lam = 1.0
        base = np.max(np.abs(f) / scale)
        while lam > 1e-8:
            c_try = np.maximum(c + lam * step, 0.0)
            f_try = residual_vec(c_try)
            if np.max(np.abs(f_try) / scale) < base:
                c, f = c_try, f_try
                break
            lam *= 0.5
        else:
            break
        it += 1

    res = float(np.max(np.abs(residual_vec(c)) / scale))
    r = free_resources(c)
    res_r = float(np.max(np.abs(r * (1.0 + c @ invK) - R) / np.maximum(1.0, R)))
    res = max(res, res_r)
    if res > 1e-10:
        raise ConvergenceError(
            f"QSS solver stalled at residual {res:.3e}", last_iterate=c, residual=res)

    x = np.outer(c, np.ones(N)) * r[None, :] * invK
    y = beta * c**2
    z = gamma * np.outer(c, c)
    np.fill_diagonal(z, 0.0)
    return QssSolution(x=x, y=y, z=z, residual=res, branch="picard+newton")
