"""Shared data model: scenario parameterization, system states, derived constants.

Conventions used throughout the package
---------------------------------------
* ``M`` consumer species, ``N`` resource species.
* ``a[i, l]``   encounter rate of consumer i with resource l (per abundance per time)
* ``d[i, l]``   escape rate of a consumer-resource pair (per time)
* ``k[i, l]``   capture rate of a consumer-resource pair (per time)
* ``w[i, l]``   biomass conversion ratio in (0, 1]
* ``D[i]``      consumer mortality rate (per time)
* ``a_intra[i], d_intra[i]``      same-species interference pair formation/separation
* ``a_inter[i, j], d_inter[i, j]`` cross-species interference (symmetric, zero diagonal)

Units are documented conventions only; no unit system is enforced.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfigError


class ScenarioKind(enum.Enum):
    """Which pairwise-encounter channels are active."""

    CHASING_ONLY = "chasing_only"
    CHASING_INTRA = "chasing_intra"
    CHASING_INTER = "chasing_inter"
    CHASING_INTRA_INTER = "chasing_intra_inter"

    @property
    def has_intra(self) -> bool:
        return self in (ScenarioKind.CHASING_INTRA, ScenarioKind.CHASING_INTRA_INTER)

    @property
    def has_inter(self) -> bool:
        return self in (ScenarioKind.CHASING_INTER, ScenarioKind.CHASING_INTRA_INTER)


class ResourceKind(enum.Enum):
    BIOTIC = "biotic"
    ABIOTIC = "abiotic"


@dataclass(frozen=True)
class ResourceLaw:
    """Renewal law of one resource species.

    Biotic resources replicate logistically with intrinsic rate ``intrinsic_rate``;
    abiotic resources are supplied externally at that rate and decay toward the
    shared capacity ``carrying_capacity``.
    """

    kind: ResourceKind
    intrinsic_rate: float
    carrying_capacity: float

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ResourceKind(self.kind))
        if not (self.intrinsic_rate > 0):
            raise InvalidConfigError("resource intrinsic_rate must be > 0")
        if not (self.carrying_capacity > 0):
            raise InvalidConfigError("resource carrying_capacity must be > 0")

    def growth(self, total: float) -> float:
        """Renewal flux as a function of the *total* resource abundance."""
        if self.kind is ResourceKind.BIOTIC:
            return self.intrinsic_rate * total * (1.0 - total / self.carrying_capacity)
        return self.intrinsic_rate * (1.0 - total / self.carrying_capacity)


def _as_matrix(value, shape, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(shape, float(arr))
    elif arr.shape != shape:
        arr = np.broadcast_to(arr, shape).copy()
    else:
        arr = arr.copy()
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise InvalidConfigError(f"{name} must be finite and non-negative")
    return arr


@dataclass(frozen=True)
class ModelConfig:
    """Full parameterization of one scenario.

    Instances are immutable after construction (arrays are locked read-only) and
    therefore safe to share between workers.
    """

    M: int
    N: int
    a: np.ndarray
    d: np.ndarray
    k: np.ndarray
    w: np.ndarray
    D: np.ndarray
    a_intra: np.ndarray
    d_intra: np.ndarray
    a_inter: np.ndarray
    d_inter: np.ndarray
    resource_laws: tuple[ResourceLaw, ...]
    scenario: ScenarioKind

    def __post_init__(self):
        M, N = self.M, self.N
        if M < 1 or N < 1:
            raise InvalidConfigError("need at least one consumer and one resource species")
        for name, shape in (("a", (M, N)), ("d", (M, N)), ("k", (M, N)), ("w", (M, N))):
            object.__setattr__(self, name, _as_matrix(getattr(self, name), shape, name))
        object.__setattr__(self, "D", _as_matrix(self.D, (M,), "D"))
        object.__setattr__(self, "a_intra", _as_matrix(self.a_intra, (M,), "a_intra"))
        object.__setattr__(self, "d_intra", _as_matrix(self.d_intra, (M,), "d_intra"))
        object.__setattr__(self, "a_inter", _as_matrix(self.a_inter, (M, M), "a_inter"))
        object.__setattr__(self, "d_inter", _as_matrix(self.d_inter, (M, M), "d_inter"))
        if isinstance(self.scenario, str):
            object.__setattr__(self, "scenario", ScenarioKind(self.scenario))
        if len(self.resource_laws) != N:
            raise InvalidConfigError("resource_laws must list one law per resource species")
        object.__setattr__(self, "resource_laws", tuple(self.resource_laws))

        if np.any((self.a > 0) & (self.k <= 0)):
            raise InvalidConfigError("k must be positive wherever a is positive")
        if np.any(self.w > 1):
            raise InvalidConfigError("conversion ratio w must lie in (0, 1]")
        if not np.allclose(self.a_inter, self.a_inter.T) or not np.allclose(
            self.d_inter, self.d_inter.T
        ):
            raise InvalidConfigError("interference matrices must be symmetric")
        if np.any(np.diag(self.a_inter) != 0) or np.any(np.diag(self.d_inter) != 0):
            raise InvalidConfigError(
                "a_inter/d_inter diagonals must be zero (same-species pairs live in a_intra)"
            )

        sc = self.scenario
        if not sc.has_intra and np.any(self.a_intra > 0):
            raise InvalidConfigError(f"{sc.value} forbids nonzero intraspecific encounter rates")
        if not sc.has_inter and np.any(self.a_inter > 0):
            raise InvalidConfigError(f"{sc.value} forbids nonzero interspecific encounter rates")

        for arr in (self.a, self.d, self.k, self.w, self.D, self.a_intra,
                    self.d_intra, self.a_inter, self.d_inter):
            arr.setflags(write=False)

    @classmethod
    def build(
        cls,
        M,
        N,
        *,
        a,
        d,
        k,
        w,
        D,
        resource_laws,
        a_intra=0.0,
        d_intra=0.0,
        a_inter=0.0,
        d_inter=0.0,
        scenario=None,
    ) -> "ModelConfig":
        """Construct a config from scalars or arrays, broadcasting as needed.

        ``a_inter``/``d_inter`` scalars are broadcast to every off-diagonal entry.
        ``resource_laws`` may be a single law (shared by all N resources) or a list.
        The scenario is inferred from which interference rates are nonzero when
        not given explicitly.
        """
        if isinstance(resource_laws, ResourceLaw):
            resource_laws = (resource_laws,) * N
        a_intra_v = np.broadcast_to(np.asarray(a_intra, float), (M,)).copy()
        d_intra_v = np.broadcast_to(np.asarray(d_intra, float), (M,)).copy()
        ai = np.asarray(a_inter, dtype=float)
        di = np.asarray(d_inter, dtype=float)
        if ai.ndim == 0:
            ai = np.full((M, M), float(ai))
            np.fill_diagonal(ai, 0.0)
        if di.ndim == 0:
            di = np.full((M, M), float(di))
            np.fill_diagonal(di, 0.0)
        if scenario is None:
            has_intra = bool(np.any(a_intra_v > 0))
            has_inter = bool(np.any(ai > 0))
            scenario = {
                (False, False): ScenarioKind.CHASING_ONLY,
                (True, False): ScenarioKind.CHASING_INTRA,
                (False, True): ScenarioKind.CHASING_INTER,
                (True, True): ScenarioKind.CHASING_INTRA_INTER,
            }[(has_intra, has_inter)]
        return cls(
            M=M, N=N, a=a, d=d, k=k, w=w, D=D,
            a_intra=a_intra_v, d_intra=d_intra_v, a_inter=ai, d_inter=di,
            resource_laws=resource_laws, scenario=scenario,
        )

    def with_updates(self, **kwargs) -> "ModelConfig":
        """Return a copy with some fields replaced (arrays re-validated)."""
        data = {
            "M": self.M, "N": self.N, "a": self.a, "d": self.d, "k": self.k,
            "w": self.w, "D": self.D, "a_intra": self.a_intra, "d_intra": self.d_intra,
            "a_inter": self.a_inter, "d_inter": self.d_inter,
            "resource_laws": self.resource_laws, "scenario": self.scenario,
        }
        data.update(kwargs)
        return ModelConfig(**data)


@dataclass(frozen=True)
class DerivedConstants:
    """Composite constants used by every closed form.

    ``K[i, l] = (d + k) / a`` is the effective dissociation abundance of a
    chasing channel, ``alpha[i, l] = D_i / (w k)`` the mortality-to-capture
    ratio, ``beta[i] = a_intra / d_intra`` and ``gamma[i, j] = a_inter / d_inter``
    the interference strengths.  K and alpha are ``+inf`` on channels with
    ``a == 0`` (no encounters: the pair abundance is identically zero); beta and
    gamma are zero where the corresponding channel is absent.
    """

    K: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        for arr in (self.K, self.alpha, self.beta, self.gamma):
            arr.setflags(write=False)


def derive_constants(config: ModelConfig) -> DerivedConstants:
    """Compute K, alpha, beta, gamma from a validated config.

    Raises InvalidConfigError when a channel carries escape/capture rates but a
    zero encounter rate (the ratio (d+k)/a would divide by zero on a channel
    that claims to be active).
    """
    a, d, k, w = config.a, config.d, config.k, config.w
    active = a > 0
    if np.any(~active & ((d > 0) | (k > 0))):
        raise InvalidConfigError("channel has d or k set but zero encounter rate a")
    K = np.full_like(a, np.inf)
    np.divide(d + k, a, out=K, where=active)
    alpha = np.full_like(a, np.inf)
    wk = w * k
    ok = active & (wk > 0)
    np.divide(np.broadcast_to(config.D[:, None], a.shape), wk, out=alpha, where=ok)
    beta = np.zeros(config.M)
    bi = config.d_intra > 0
    beta[bi] = config.a_intra[bi] / config.d_intra[bi]
    if np.any((config.d_intra == 0) & (config.a_intra > 0)):
        raise InvalidConfigError("a_intra > 0 requires d_intra > 0")
    gamma = np.zeros((config.M, config.M))
    gi = config.d_inter > 0
    gamma[gi] = config.a_inter[gi] / config.d_inter[gi]
    if np.any((config.d_inter == 0) & (config.a_inter > 0)):
        raise InvalidConfigError("a_inter > 0 requires d_inter > 0")
    return DerivedConstants(K=K, alpha=alpha, beta=beta, gamma=gamma)


@dataclass(frozen=True)
class SystemState:
    """Instantaneous abundances of free individuals and every pair type.

    ``x[i, l]`` chasing pairs, ``y[i]`` same-species interference pairs,
    ``z[i, j]`` cross-species interference pairs stored as a symmetric matrix
    with zero diagonal (each unordered pair appears at both (i, j) and (j, i)
    but is counted once per member in the totals).
    """

    c_free: np.ndarray
    r_free: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c_free", np.asarray(self.c_free, float).copy())
        object.__setattr__(self, "r_free", np.asarray(self.r_free, float).copy())
        M = self.c_free.shape[0]
        N = self.r_free.shape[0]
        object.__setattr__(self, "x", _shape_or_zeros(self.x, (M, N)))
        object.__setattr__(self, "y", _shape_or_zeros(self.y, (M,)))
        object.__setattr__(self, "z", _shape_or_zeros(self.z, (M, M)))
        for arr in (self.c_free, self.r_free, self.x, self.y, self.z):
            if np.any(arr < 0):
                raise InvalidConfigError("state abundances must be non-negative")
            arr.setflags(write=False)
        if not np.array_equal(self.z, self.z.T):
            raise InvalidConfigError("z must be symmetric")

    @classmethod
    def zeros(cls, M: int, N: int, t: float = 0.0) -> "SystemState":
        return cls(np.zeros(M), np.zeros(N), np.zeros((M, N)), np.zeros(M),
                   np.zeros((M, M)), t)

    @property
    def M(self) -> int:
        return self.c_free.shape[0]

    @property
    def N(self) -> int:
        return self.r_free.shape[0]

    def total_consumers(self) -> np.ndarray:
        """C_i = free + chasing pairs + 2 per same-species pair + cross pairs."""
        return self.c_free + self.x.sum(axis=1) + 2.0 * self.y + self.z.sum(axis=1)

    def total_resources(self) -> np.ndarray:
        """R_l = free + resources bound in chasing pairs."""
        return self.r_free + self.x.sum(axis=0)


def _shape_or_zeros(value, shape):
    if value is None:
        return np.zeros(shape)
    arr = np.asarray(value, float).copy()
    if arr.shape != shape:
        raise InvalidConfigError(f"state component has shape {arr.shape}, expected {shape}")
    return arr


@dataclass(frozen=True)
class KineticGeometry:
    """Landscape geometry and speeds that generate the mean-field encounter rates."""

    L: float
    v_c: np.ndarray
    v_r: np.ndarray
    r_chase: np.ndarray
    r_intra: np.ndarray
    r_inter: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v_c", np.atleast_1d(np.asarray(self.v_c, float)))
        object.__setattr__(self, "v_r", np.atleast_1d(np.asarray(self.v_r, float)))
        M = self.v_c.shape[0]
        N = self.v_r.shape[0]
        object.__setattr__(self, "r_chase", _as_matrix(self.r_chase, (M, N), "r_chase"))
        object.__setattr__(self, "r_intra", _as_matrix(self.r_intra, (M,), "r_intra"))
        object.__setattr__(self, "r_inter", _as_matrix(self.r_inter, (M, M), "r_inter"))
        if not (self.L > 0):
            raise InvalidConfigError("landscape side L must be positive")
        if np.any(self.v_c < 0) or np.any(self.v_r < 0):
            raise InvalidConfigError("speeds must be non-negative")
        radii = [self.r_chase, self.r_intra, self.r_inter]
        if any(np.any(r <= 0) for r in radii):
            raise InvalidConfigError("encounter radii must be positive")
        if any(np.any(r >= self.L / 2) for r in radii):
            raise InvalidConfigError("encounter radii must be smaller than L/2")

    @property
    def M(self) -> int:
        return self.v_c.shape[0]

    @property
    def N(self) -> int:
        return self.v_r.shape[0]


@dataclass(frozen=True)
class MeanFieldRates:
    """Encounter-rate families predicted from geometry by the mean-field formulas."""

    a: np.ndarray
    a_intra: np.ndarray
    a_inter: np.ndarray


def mean_field_rates(geom: KineticGeometry) -> MeanFieldRates:
    """Encounter rates from the swept-area argument on a well-mixed square of side L.

    For a consumer moving at v_c against a resource at v_r the rms relative speed
    is sqrt(v_c^2 + v_r^2), giving a = 2 r sqrt(v_c^2 + v_r^2) / L^2; two
    same-species consumers yield 2 sqrt(2) v_c r / L^2.
    """
    L2 = geom.L**2
    vc2 = geom.v_c**2
    rel_cr = np.sqrt(vc2[:, None] + geom.v_r[None, :] ** 2)
    a = 2.0 * geom.r_chase * rel_cr / L2
    a_intra = 2.0 * math.sqrt(2.0) * geom.v_c * geom.r_intra / L2
    rel_cc = np.sqrt(vc2[:, None] + vc2[None, :])
    a_inter = 2.0 * geom.r_inter * rel_cc / L2
    np.fill_diagonal(a_inter, 0.0)
    return MeanFieldRates(a=a, a_intra=a_intra, a_inter=a_inter)
