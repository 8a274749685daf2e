"""Closed-form steady states, coexistence bounds, and a Newton fixed-point refiner.

The closed forms hold in the dilute regime where every resource total far
exceeds the summed consumer totals (free resources approximately equal the
totals).  Each returned fixed point reports how dilute the solution actually is
(``regime_ratio``) together with the exact-system residual, but validity is
never enforced: out-of-regime evaluation is allowed and simply shows up in
those diagnostics.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import RhsFunction, build_rhs
from .errors import (BoundaryFixedPointError, ConvergenceError,
                     DegenerateParameterError, InfeasibleRegimeError,
                     InvalidConfigError, SingularSystemError)
from .model import (ModelConfig, ResourceKind, ScenarioKind, SystemState,
                    derive_constants)
from .numerics import damped_newton, fd_jacobian


class FixedPointMethod(enum.Enum):
    CLOSED_FORM_DILUTE = "closed_form_dilute"
    MATRIX_SOLVE = "matrix_solve"
    NEWTON_REFINED = "newton_refined"


@dataclass(frozen=True)
class FixedPoint:
    """A coexistence fixed point: species totals plus the component breakdown."""

    state: SystemState
    method: FixedPointMethod
    residual: float
    regime_ratio: float

    @property
    def consumers(self) -> np.ndarray:
        return self.state.total_consumers()

    @property
    def resources(self) -> np.ndarray:
        return self.state.total_resources()

    def to_json(self, path=None) -> str:
        payload = {
            "method": self.method.value,
            "residual": self.residual,
            "regime_ratio": self.regime_ratio,
            "consumers": self.consumers.tolist(),
            "resources": self.resources.tolist(),
            "c_free": self.state.c_free.tolist(),
            "r_free": self.state.r_free.tolist(),
            "x": self.state.x.tolist(),
            "y": self.state.y.tolist(),
            "z": self.state.z.tolist(),
        }
        text = json.dumps(payload, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


@dataclass(frozen=True)
class CoexistenceBound:
    """Supremum of the relative mortality difference that still allows coexistence."""

    delta_sup: float
    resource_kind: ResourceKind


def _scaled_residual(rhs: RhsFunction, vec: np.ndarray) -> float:
    f = rhs(0.0, vec)
    return float(np.max(np.abs(f) / np.maximum(1.0, np.abs(vec))))


def _finish(config: ModelConfig, state: SystemState,
            method: FixedPointMethod) -> FixedPoint:
    rhs = build_rhs(config)
    vec = rhs.layout.pack(state)
    res = _scaled_residual(rhs, vec)
    C = state.total_consumers()
    R = state.total_resources()
    ratio = float(np.min(R) / max(np.sum(C), 1e-300))
    return FixedPoint(state=state, method=method, residual=res, regime_ratio=ratio)


def _require(config: ModelConfig, *, M=None, N=None, scenarios=None, need_beta=False):
    if M is not None and config.M != M:
        raise InvalidConfigError(f"operation requires M={M}, got {config.M}")
    if N is not None and config.N != N:
        raise InvalidConfigError(f"operation requires N={N}, got {config.N}")
    if scenarios is not None and config.scenario not in scenarios:
        raise InvalidConfigError(
            f"operation requires scenario in {[s.value for s in scenarios]}, "
            f"got {config.scenario.value}")
    if need_beta and np.any(config.a_intra <= 0):
        raise InvalidConfigError("closed form needs a positive intraspecific rate "
                                 "for every consumer species")


def _law(config: ModelConfig, l: int = 0):
    return config.resource_laws[l]


def analytic_intra_2x1(config: ModelConfig) -> FixedPoint:
    """Dilute closed-form coexistence point for two consumers, one resource,
    chasing plus intraspecific interference."""
    _require(config, M=2, N=1, scenarios=(ScenarioKind.CHASING_INTRA,), need_beta=True)
    cons = derive_constants(config)
    K = cons.K[:, 0]
    alpha = cons.alpha[:, 0]
    beta = cons.beta
    k = config.k[:, 0]
    law = _law(config)
    K0 = law.carrying_capacity

    if law.kind is ResourceKind.BIOTIC:
        R0 = law.intrinsic_rate
        num = R0 + np.sum(k / (2.0 * beta * K))
        den = np.sum(k * (1.0 - alpha) / (2.0 * beta * alpha * K**2)) + R0 / K0
        R = num / den
    else:
        Ra = law.intrinsic_rate
        kappa1 = Ra / K0 - np.sum(k / (2.0 * beta * K))
        kappa2 = np.sum(k * (1.0 - alpha) / (2.0 * beta * alpha * K**2))
        R = (-kappa1 + math.sqrt(kappa1**2 + 4.0 * kappa2 * Ra)) / (2.0 * kappa2)

    C = ((1.0 - alpha) * R**2 - K * alpha * R) / (2.0 * beta * (K * alpha) ** 2)
    _check_positive(R, C)
    state = _intra_state(config, np.array([R]), C)
    return _finish(config, state, FixedPointMethod.CLOSED_FORM_DILUTE)


def _check_positive(R, C):
    R = np.atleast_1d(np.asarray(R, float))
    C = np.asarray(C, float)
    bad = [f"R{l + 1}" for l in range(R.size) if not (R[l] > 0)]
    bad += [f"C{i + 1}" for i in range(C.size) if not (C[i] > 0)]
    if bad:
        raise InfeasibleRegimeError(
            f"closed form drives {', '.join(bad)} non-positive "
            "(parameters outside the coexistence region)", negative_species=bad)


def _intra_state(config: ModelConfig, R: np.ndarray, C: np.ndarray) -> SystemState:
    """Component reconstruction for intraspecific scenarios with free resources
    approximated by the totals."""
    cons = derive_constants(config)
    M, N = config.M, config.N
    cf = np.empty(M)
    for i in range(M):
        load = np.sum((1.0 / cons.alpha[i] - 1.0) * R / cons.K[i])
        cf[i] = (load - 1.0) / (2.0 * cons.beta[i])
    if np.any(cf < 0):
        bad = [f"C{i + 1}" for i in range(M) if cf[i] < 0]
        raise InfeasibleRegimeError(
            "free-consumer reconstruction went negative", negative_species=bad)
    x = cf[:, None] * R[None, :] / cons.K
    y = cons.beta * cf**2
    r_free = np.maximum(R - x.sum(axis=0), 0.0)
    return SystemState(c_free=cf, r_free=r_free, x=x, y=y,
                       z=np.zeros((M, M)))


def coexistence_delta_sup(config: ModelConfig) -> CoexistenceBound:
    """Upper limit of the mortality difference Delta = (D1 - D2)/D2 compatible
    with coexistence, for two species identical in everything but mortality."""
    _require(config, M=2, N=1, scenarios=(ScenarioKind.CHASING_INTRA,), need_beta=True)
    for name in ("a", "d", "k", "w"):
        arr = getattr(config, name)[:, 0]
        if not math.isclose(arr[0], arr[1], rel_tol=1e-12):
            raise InvalidConfigError(f"delta-sup bound assumes equal {name} across species")
    for name in ("a_intra", "d_intra"):
        arr = getattr(config, name)
        if not math.isclose(arr[0], arr[1], rel_tol=1e-12):
            raise InvalidConfigError(f"delta-sup bound assumes equal {name} across species")

    cons = derive_constants(config)
    K = cons.K[1, 0]
    alpha2 = cons.alpha[1, 0]
    beta = cons.beta[1]
    k = config.k[1, 0]
    law = _law(config)
    K0 = law.carrying_capacity
    if law.kind is ResourceKind.BIOTIC:
        R0 = law.intrinsic_rate
        load = (K / K0 + 1.0) * alpha2
        delta = (1.0 - load) / (k / (2.0 * beta * K * R0) + load)
    else:
        Ra = law.intrinsic_rate
        half = 0.5 * (1.0 / K0 - k / (2.0 * Ra * beta * K))
        rho = half + 0.5 * math.sqrt(
            (1.0 / K0 - k / (2.0 * Ra * beta * K)) ** 2
            + 2.0 * k * (1.0 - alpha2) / (Ra * beta * alpha2 * K**2))
        delta = 1.0 / (alpha2 * (K * rho + 1.0)) - 1.0
    return CoexistenceBound(delta_sup=float(delta), resource_kind=law.kind)


def analytic_general_biotic(config: ModelConfig) -> FixedPoint:
    """General M x N dilute steady state for all-biotic resources via the
    linear system in the resource totals."""
    _require(config, scenarios=(ScenarioKind.CHASING_INTRA,), need_beta=True)
    if any(law.kind is not ResourceKind.BIOTIC for law in config.resource_laws):
        raise InvalidConfigError("analytic_general_biotic requires biotic resources only")
    cons = derive_constants(config)
    M, N = config.M, config.N
    K, alpha, beta = cons.K, cons.alpha, cons.beta
    k = config.k
    R0 = np.array([law.intrinsic_rate for law in config.resource_laws])
    K0 = np.array([law.carrying_capacity for law in config.resource_laws])

    A = np.zeros((N, N))
    for s in range(N):
        for q in range(N):
            A[s, q] = np.sum(k[:, s] * (1.0 / alpha[:, q] - 1.0)
                             / (2.0 * beta * K[:, s] * K[:, q]))
        A[s, s] += R0[s] / K0[s]
    B = R0 + np.array([np.sum(k[:, s] / (2.0 * beta * K[:, s])) for s in range(N)])

    try:
        R = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("resource balance matrix is singular") from exc
    if np.any(R <= 0):
        bad = [f"R{l + 1}" for l in range(N) if R[l] <= 0]
        raise InfeasibleRegimeError("matrix solution has non-positive resources",
                                    negative_species=bad)
    C = _general_consumers(cons, R)
    _check_positive(R, C)
    state = _intra_state(config, R, C)
    return _finish(config, state, FixedPointMethod.MATRIX_SOLVE)


def _general_consumers(cons, R: np.ndarray) -> np.ndarray:
    M = cons.beta.size
    C = np.empty(M)
    for i in range(M):
        load = np.sum((1.0 / cons.alpha[i] - 1.0) * R / cons.K[i])
        C[i] = np.sum(R / (2.0 * cons.beta[i] * cons.alpha[i] * cons.K[i])) * (load - 1.0)
    return C


def analytic_general_abiotic(config: ModelConfig) -> FixedPoint:
    """Dilute steady state with abiotic resources: explicit root for N = 1,
    damped Newton on the coupled quadratic system otherwise."""
    _require(config, scenarios=(ScenarioKind.CHASING_INTRA,), need_beta=True)
    if any(law.kind is not ResourceKind.ABIOTIC for law in config.resource_laws):
        raise InvalidConfigError("analytic_general_abiotic requires abiotic resources only")
    cons = derive_constants(config)
    N = config.N
    K, alpha, beta = cons.K, cons.alpha, cons.beta
    k = config.k
    Ra = np.array([law.intrinsic_rate for law in config.resource_laws])
    K0 = np.array([law.carrying_capacity for law in config.resource_laws])

    if N == 1:
        g1 = Ra[0] / K0[0] - np.sum(k[:, 0] / (2.0 * beta * K[:, 0]))
        g2 = np.sum(k[:, 0] * (1.0 - alpha[:, 0])
                    / (2.0 * beta * alpha[:, 0] * K[:, 0] ** 2))
        R = np.array([(-g1 + math.sqrt(g1**2 + 4.0 * g2 * Ra[0])) / (2.0 * g2)])
    else:
        S = np.array([np.sum(k[:, s] / (2.0 * beta * K[:, s])) for s in range(N)])
        T = np.zeros((N, N))
        for s in range(N):
            for q in range(N):
                T[s, q] = np.sum(k[:, s] * (1.0 / alpha[:, q] - 1.0)
                                 / (2.0 * beta * K[:, s] * K[:, q]))

        def system(R):
            return (Ra / K0 - S + T @ R) * R - Ra

        def jac(R):
            return np.diag(Ra / K0 - S + T @ R) + R[:, None] * T

        try:
            R, _, _ = damped_newton(system, K0 / 2.0, tol=1e-12, jac=jac,
                                    project_nonnegative=True)
        except ConvergenceError:
            biotic_laws = tuple(
                law.__class__(kind=ResourceKind.BIOTIC,
                              intrinsic_rate=law.intrinsic_rate,
                              carrying_capacity=law.carrying_capacity)
                for law in config.resource_laws)
            seed_cfg = config.with_updates(resource_laws=biotic_laws)
            seed = analytic_general_biotic(seed_cfg).resources
            R, _, _ = damped_newton(system, seed, tol=1e-12, jac=jac,
                                    project_nonnegative=True)

    C = _general_consumers(cons, R)
    _check_positive(R, C)
    state = _intra_state(config, np.asarray(R, float), C)
    return _finish(config, state, FixedPointMethod.MATRIX_SOLVE)


def analytic_inter_2x1(config: ModelConfig) -> FixedPoint:
    """Dilute closed-form interior fixed point for two consumers coupled by
    cross-species interference (known to be dynamically unstable)."""
    _require(config, M=2, N=1, scenarios=(ScenarioKind.CHASING_INTER,))
    cons = derive_constants(config)
    if config.a_inter[0, 1] <= 0:
        raise InvalidConfigError("interspecific closed form needs a positive cross rate")
    K = cons.K[:, 0]
    alpha = cons.alpha[:, 0]
    gamma = cons.gamma[0, 1]
    k = config.k[:, 0]
    law = _law(config)
    K0 = law.carrying_capacity

    cross = gamma * K[0] * alpha[0] * K[1] * alpha[1]
    if law.kind is ResourceKind.BIOTIC:
        R0 = law.intrinsic_rate
        num = R0 + k[0] / (gamma * K[0]) + k[1] / (gamma * K[1])
        den = (k[0] * (1.0 - alpha[1]) / (gamma * K[0] * K[1] * alpha[1])
               + k[1] * (1.0 - alpha[0]) / (gamma * K[0] * K[1] * alpha[0])
               + R0 / K0)
        R = num / den
    else:
        Ra = law.intrinsic_rate
        kappa1 = Ra / K0 - k[0] / (gamma * K[0]) - k[1] / (gamma * K[1])
        kappa2 = (k[0] * (1.0 - alpha[1]) / (gamma * K[0] * K[1] * alpha[1])
                  + k[1] * (1.0 - alpha[0]) / (gamma * K[0] * K[1] * alpha[0]))
        R = (-kappa1 + math.sqrt(kappa1**2 + 4.0 * kappa2 * Ra)) / (2.0 * kappa2)

    C1 = ((1.0 - alpha[1]) * R**2 - K[1] * alpha[1] * R) / cross
    C2 = ((1.0 - alpha[0]) * R**2 - K[0] * alpha[0] * R) / cross
    C = np.array([C1, C2])
    _check_positive(R, C)
    state = _inter_state(config, R, C)
    return _finish(config, state, FixedPointMethod.CLOSED_FORM_DILUTE)


def _inter_state(config: ModelConfig, R: float, C: np.ndarray) -> SystemState:
    cons = derive_constants(config)
    alpha = cons.alpha[:, 0]
    K = cons.K[:, 0]
    x = (alpha * C)[:, None]
    cf = K * alpha * C / R
    z = np.zeros((2, 2))
    z[0, 1] = z[1, 0] = cons.gamma[0, 1] * cf[0] * cf[1]
    y = cons.beta * cf**2
    r_free = np.maximum(np.array([R]) - x.sum(axis=0), 0.0)
    return SystemState(c_free=cf, r_free=r_free, x=x, y=y, z=z)


def analytic_both_2x1(config: ModelConfig) -> FixedPoint:
    """Dilute closed forms when both interference channels act together."""
    _require(config, M=2, N=1, scenarios=(ScenarioKind.CHASING_INTRA_INTER,),
             need_beta=True)
    cons = derive_constants(config)
    K = cons.K[:, 0]
    alpha = cons.alpha[:, 0]
    beta = cons.beta
    gamma = cons.gamma[0, 1]
    k = config.k[:, 0]
    law = _law(config)
    K0 = law.carrying_capacity
    disc = 4.0 * beta[0] * beta[1] - gamma**2
    if disc == 0.0:
        raise DegenerateParameterError(
            "4 beta1 beta2 == gamma^2: closed form denominator vanishes")

    u = K * alpha

    def consumers(R):
        c1 = R * ((2.0 * beta[1] * u[1] * (1.0 - alpha[0])
                   - gamma * u[0] * (1.0 - alpha[1])) * R
                  + (gamma - 2.0 * beta[1]) * u[0] * u[1]) / (u[0] ** 2 * u[1] * disc)
        c2 = R * ((2.0 * beta[0] * u[0] * (1.0 - alpha[1])
                   - gamma * u[1] * (1.0 - alpha[0])) * R
                  + (gamma - 2.0 * beta[0]) * u[0] * u[1]) / (u[0] * u[1] ** 2 * disc)
        return np.array([c1, c2])

    # coefficients of R_a-style quadratic: (A1+A2) R^2 + (B1+B2) R = harvest/R
    A = (2.0 * k[0] * beta[1] * (1.0 - alpha[0]) / (K[0] ** 2 * alpha[0] * disc)
         + 2.0 * k[1] * beta[0] * (1.0 - alpha[1]) / (K[1] ** 2 * alpha[1] * disc)
         - k[0] * gamma * (1.0 - alpha[1]) / (K[0] * K[1] * alpha[1] * disc)
         - k[1] * gamma * (1.0 - alpha[0]) / (K[0] * K[1] * alpha[0] * disc))
    B = (k[0] * (gamma - 2.0 * beta[1]) / (K[0] * disc)
         + k[1] * (gamma - 2.0 * beta[0]) / (K[1] * disc))

    if law.kind is ResourceKind.BIOTIC:
        R0 = law.intrinsic_rate
        R = (R0 - B) / (A + R0 / K0)
    else:
        Ra = law.intrinsic_rate
        kap1 = A
        kap2 = B + Ra / K0
        R = (-kap2 + math.sqrt(kap2**2 + 4.0 * kap1 * Ra)) / (2.0 * kap1)

    C = consumers(R)
    _check_positive(R, C)
    state = _both_state(config, R, C)
    return _finish(config, state, FixedPointMethod.CLOSED_FORM_DILUTE)


def _both_state(config: ModelConfig, R: float, C: np.ndarray) -> SystemState:
    cons = derive_constants(config)
    alpha = cons.alpha[:, 0]
    K = cons.K[:, 0]
    x = (alpha * C)[:, None]
    cf = K * alpha * C / R
    y = cons.beta * cf**2
    z = np.zeros((2, 2))
    z[0, 1] = z[1, 0] = cons.gamma[0, 1] * cf[0] * cf[1]
    r_free = np.maximum(np.array([R]) - x.sum(axis=0), 0.0)
    return SystemState(c_free=cf, r_free=r_free, x=x, y=y, z=z)


def refine_fixed_point(config: ModelConfig, guess, *, tol: float = 1e-9,
                       max_iter: int = 200, fd_rel_step: float = 1e-6,
                       fd_min_step: float = 1e-9) -> FixedPoint:
    """Damped Newton on the full steady-state system seeded from ``guess``.

    ``guess`` may be a FixedPoint or a SystemState.  Convergence onto the
    boundary of the positive cone (some abundance pinned at zero) raises
    BoundaryFixedPointError with the converged point attached, which is
    reported separately from plain divergence.
    """
    state = guess.state if isinstance(guess, FixedPoint) else guess
    rhs = build_rhs(config)
    lay = rhs.layout
    vec0 = lay.pack(state)
    if not np.all(np.isfinite(vec0)):
        raise InvalidConfigError("guess contains non-finite components")

    def func(v):
        return rhs(0.0, v)

    vec, res, _ = damped_newton(func, vec0, tol=tol, max_iter=max_iter,
                                project_nonnegative=True,
                                fd_rel_step=fd_rel_step, fd_min_step=fd_min_step)
    refined = lay.unpack(vec)
    point = FixedPoint(state=refined, method=FixedPointMethod.NEWTON_REFINED,
                       residual=res,
                       regime_ratio=float(np.min(refined.total_resources())
                                          / max(np.sum(refined.total_consumers()), 1e-300)))
    floor = 1e-10 * max(1.0, float(np.max(vec)))
    if np.min(vec) < floor:
        raise BoundaryFixedPointError(
            "Newton converged onto the boundary (a component is zero): "
            "no interior coexistence fixed point here", fixed_point=point)
    return point
