"""Deterministic population dynamics: RHS assembly, integration, outcome labels.

The state is stored as (free consumers, free resources, pair abundances); the
derivative of each free pool is assembled so that the implied totals obey

    dC_i/dt = sum_l w k x_il - D_i C_i          (death drains the whole species)
    dR_l/dt = g_l(R_l) - sum_i k x_il           (g from the resource law)

identically, while the pair equations keep their own mass-action form.  Only
channels that exist in the scenario enter the packed vector, so Jacobians have
no spurious zero modes.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.integrate import solve_ivp

from .errors import (InvalidConfigError, StiffnessError, TrajectoryTooShortError)
from .model import ModelConfig, ResourceKind, SystemState


class EventKind(enum.Enum):
    EXTINCTION_BELOW_THRESHOLD = "extinction_below_threshold"
    STEADY_STATE_REACHED = "steady_state_reached"
    NEGATIVITY_CLIPPED = "negativity_clipped"


@dataclass(frozen=True)
class TrajectoryEvent:
    time: float
    species: int | None
    kind: EventKind


class StateLayout:
    """Mapping between SystemState components and the packed ODE vector."""

    def __init__(self, config: ModelConfig):
        M, N = config.M, config.N
        self.M, self.N = M, N
        xi, xl = np.nonzero(config.a > 0)
        self.x_rows = xi
        self.x_cols = xl
        active_y = (config.a_intra > 0) | (config.d_intra > 0)
        self.y_species = np.nonzero(active_y)[0]
        iu, ju = np.triu_indices(M, k=1)
        active_z = (config.a_inter[iu, ju] > 0) | (config.d_inter[iu, ju] > 0)
        self.z_rows = iu[active_z]
        self.z_cols = ju[active_z]
        self.n_x = xi.size
        self.n_y = self.y_species.size
        self.n_z = self.z_rows.size
        self.dim = M + N + self.n_x + self.n_y + self.n_z
        self._ofs_r = M
        self._ofs_x = M + N
        self._ofs_y = self._ofs_x + self.n_x
        self._ofs_z = self._ofs_y + self.n_y
        # scatter/sum matrices: row sums of channel vectors by species index
        self._sum_x_by_i = np.zeros((M, self.n_x))
        self._sum_x_by_i[xi, np.arange(self.n_x)] = 1.0
        self._sum_x_by_l = np.zeros((N, self.n_x))
        self._sum_x_by_l[xl, np.arange(self.n_x)] = 1.0
        self._sum_y_by_i = np.zeros((M, self.n_y))
        self._sum_y_by_i[self.y_species, np.arange(self.n_y)] = 1.0
        self._sum_z_by_i = np.zeros((M, self.n_z))
        self._sum_z_by_i[self.z_rows, np.arange(self.n_z)] += 1.0
        self._sum_z_by_i[self.z_cols, np.arange(self.n_z)] += 1.0

    def pack(self, state: SystemState) -> np.ndarray:
        vec = np.empty(self.dim)
        vec[: self.M] = state.c_free
        vec[self._ofs_r: self._ofs_x] = state.r_free
        vec[self._ofs_x: self._ofs_y] = state.x[self.x_rows, self.x_cols]
        vec[self._ofs_y: self._ofs_z] = state.y[self.y_species]
        vec[self._ofs_z:] = state.z[self.z_rows, self.z_cols]
        return vec

    def unpack(self, vec: np.ndarray, t: float = 0.0) -> SystemState:
        x = np.zeros((self.M, self.N))
        x[self.x_rows, self.x_cols] = vec[self._ofs_x: self._ofs_y]
        y = np.zeros(self.M)
        y[self.y_species] = vec[self._ofs_y: self._ofs_z]
        z = np.zeros((self.M, self.M))
        z[self.z_rows, self.z_cols] = vec[self._ofs_z:]
        z[self.z_cols, self.z_rows] = vec[self._ofs_z:]
        return SystemState(c_free=np.maximum(vec[: self.M], 0.0),
                           r_free=np.maximum(vec[self._ofs_r: self._ofs_x], 0.0),
                           x=np.maximum(x, 0.0), y=np.maximum(y, 0.0),
                           z=np.maximum(z, 0.0), t=t)

    def split(self, vec):
        return (vec[: self.M], vec[self._ofs_r: self._ofs_x],
                vec[self._ofs_x: self._ofs_y], vec[self._ofs_y: self._ofs_z],
                vec[self._ofs_z:])

    def consumer_totals(self, vec: np.ndarray) -> np.ndarray:
        c, _, xv, yv, zv = self.split(vec)
        return (c + self._sum_x_by_i @ xv + 2.0 * (self._sum_y_by_i @ yv)
                + self._sum_z_by_i @ zv)

    def resource_totals(self, vec: np.ndarray) -> np.ndarray:
        _, r, xv, _, _ = self.split(vec)
        return r + self._sum_x_by_l @ xv


@njit(cache=True)
def _rhs_kernel(vec, M, N, x_rows, x_cols, a_x, dk_x, k_x, wk_x,
                y_species, a_y, d_y, z_rows, z_cols, a_z, d_z,
                D, biotic, r_rate, r_cap):  # pragma: no cover - jitted
    n_x = x_rows.size
    n_y = y_species.size
    n_z = z_rows.size
    ofs_x = M + N
    ofs_y = ofs_x + n_x
    ofs_z = ofs_y + n_y
    out = np.empty(vec.size)

    ctot = vec[:M].copy()
    rtot = vec[M:M + N].copy()
    for j in range(n_x):
        ctot[x_rows[j]] += vec[ofs_x + j]
        rtot[x_cols[j]] += vec[ofs_x + j]
    for j in range(n_y):
        ctot[y_species[j]] += 2.0 * vec[ofs_y + j]
    for j in range(n_z):
        ctot[z_rows[j]] += vec[ofs_z + j]
        ctot[z_cols[j]] += vec[ofs_z + j]

    for i in range(M):
        out[i] = -D[i] * ctot[i]
    for l in range(N):
        if biotic[l]:
            out[M + l] = r_rate[l] * rtot[l] * (1.0 - rtot[l] / r_cap[l])
        else:
            out[M + l] = r_rate[l] * (1.0 - rtot[l] / r_cap[l])

    for j in range(n_x):
        xj = vec[ofs_x + j]
        xdot = a_x[j] * vec[x_rows[j]] * vec[M + x_cols[j]] - dk_x[j] * xj
        out[ofs_x + j] = xdot
        out[x_rows[j]] += wk_x[j] * xj - xdot
        out[M + x_cols[j]] -= k_x[j] * xj + xdot
    for j in range(n_y):
        ydot = a_y[j] * vec[y_species[j]] ** 2 - d_y[j] * vec[ofs_y + j]
        out[ofs_y + j] = ydot
        out[y_species[j]] -= 2.0 * ydot
    for j in range(n_z):
        zdot = a_z[j] * vec[z_rows[j]] * vec[z_cols[j]] - d_z[j] * vec[ofs_z + j]
        out[ofs_z + j] = zdot
        out[z_rows[j]] -= zdot
        out[z_cols[j]] -= zdot
    return out


class RhsFunction:
    """Callable d(state)/dt over the packed vector; carries its layout."""

    def __init__(self, config: ModelConfig):
        self.config = config
        self.layout = StateLayout(config)
        lay = self.layout
        self._a_x = config.a[lay.x_rows, lay.x_cols]
        self._dk_x = (config.d + config.k)[lay.x_rows, lay.x_cols]
        self._k_x = config.k[lay.x_rows, lay.x_cols]
        self._wk_x = (config.w * config.k)[lay.x_rows, lay.x_cols]
        self._a_y = config.a_intra[lay.y_species]
        self._d_y = config.d_intra[lay.y_species]
        self._a_z = config.a_inter[lay.z_rows, lay.z_cols]
        self._d_z = config.d_inter[lay.z_rows, lay.z_cols]
        self._D = config.D
        laws = config.resource_laws
        self._biotic = np.array([law.kind is ResourceKind.BIOTIC for law in laws])
        self._r_rate = np.array([law.intrinsic_rate for law in laws])
        self._r_cap = np.array([law.carrying_capacity for law in laws])

    def __call__(self, t: float, vec: np.ndarray) -> np.ndarray:
        lay = self.layout
        return _rhs_kernel(
            np.ascontiguousarray(vec), lay.M, lay.N,
            lay.x_rows, lay.x_cols, self._a_x, self._dk_x, self._k_x, self._wk_x,
            lay.y_species, self._a_y, self._d_y,
            lay.z_rows, lay.z_cols, self._a_z, self._d_z,
            self._D, self._biotic, self._r_rate, self._r_cap)

    def state_derivative(self, state: SystemState) -> dict[str, np.ndarray]:
        """Component derivatives of a SystemState, as full-shaped arrays."""
        lay = self.layout
        vec = lay.pack(state)
        dvec = self(state.t, vec)
        dc, dr, dxv, dyv, dzv = lay.split(dvec)
        dx = np.zeros((lay.M, lay.N))
        dx[lay.x_rows, lay.x_cols] = dxv
        dy = np.zeros(lay.M)
        dy[lay.y_species] = dyv
        dz = np.zeros((lay.M, lay.M))
        dz[lay.z_rows, lay.z_cols] = dzv
        dz[lay.z_cols, lay.z_rows] = dzv
        return {"c_free": dc, "r_free": dr, "x": dx, "y": dy, "z": dz}


def build_rhs(config: ModelConfig) -> RhsFunction:
    """Derivative function for the configured scenario.

    Raises InvalidConfigError if the config fails validation (construction of
    ModelConfig already enforces the scenario/parameter consistency rules).
    """
    if not isinstance(config, ModelConfig):
        raise InvalidConfigError("build_rhs expects a ModelConfig")
    return RhsFunction(config)


@dataclass
class IntegrationControls:
    """Tunables for integrate(); defaults match the package-wide tolerances."""

    rtol: float = 1e-8
    atol: float = 1e-10
    method: str = "DOP853"
    n_samples: int = 400
    sample_times: np.ndarray | None = None
    extinction_threshold: float = 1e-3
    max_step: float = np.inf
    steady_state_tol: float = 1e-9


@dataclass
class Trajectory:
    """Sampled solution with event annotations.

    ``values[k]`` is the packed state at ``times[k]``; use ``state_at`` /
    ``consumer_totals`` / ``resource_totals`` for structured views.
    """

    times: np.ndarray
    values: np.ndarray
    layout: StateLayout
    events: list[TrajectoryEvent] = field(default_factory=list)

    @property
    def states(self) -> list[SystemState]:
        return [self.layout.unpack(v, t) for t, v in zip(self.times, self.values)]

    def state_at(self, idx: int) -> SystemState:
        return self.layout.unpack(self.values[idx], self.times[idx])

    def final_state(self) -> SystemState:
        return self.state_at(-1)

    def consumer_totals(self) -> np.ndarray:
        return np.array([self.layout.consumer_totals(v) for v in self.values])

    def resource_totals(self) -> np.ndarray:
        return np.array([self.layout.resource_totals(v) for v in self.values])

    def to_csv(self, path) -> None:
        """Long-format export: time, species, value (species totals only)."""
        ctot = self.consumer_totals()
        rtot = self.resource_totals()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "species", "value"])
            for k, t in enumerate(self.times):
                for i in range(self.layout.M):
                    writer.writerow([repr(float(t)), f"C{i + 1}", repr(float(ctot[k, i]))])
                for l in range(self.layout.N):
                    writer.writerow([repr(float(t)), f"R{l + 1}", repr(float(rtot[k, l]))])


def integrate(rhs: RhsFunction, initial: SystemState, t_end: float,
              controls: IntegrationControls | None = None) -> Trajectory:
    """Adaptive embedded Runge-Kutta integration with dense sampling.

    Components are clipped at zero in the stored samples; a clip deeper than
    -atol is logged as an event.  Step-size underflow raises StiffnessError.
    """
    controls = controls or IntegrationControls()
    lay = rhs.layout
    y0 = lay.pack(initial)
    if np.any(y0 < 0):
        raise InvalidConfigError("initial state must be non-negative")
    t0 = initial.t
    if controls.sample_times is not None:
        t_eval = np.asarray(controls.sample_times, float)
        if t_eval[0] < t0 or t_eval[-1] > t_end:
            raise InvalidConfigError("sample_times must lie within [t0, t_end]")
    else:
        t_eval = np.linspace(t0, t_end, controls.n_samples)

    sol = solve_ivp(rhs, (t0, t_end), y0, method=controls.method,
                    rtol=controls.rtol, atol=controls.atol, t_eval=t_eval,
                    max_step=controls.max_step)
    if not sol.success:
        raise StiffnessError(f"integration failed: {sol.message}",
                             t=sol.t[-1] if sol.t.size else t0,
                             state=sol.y[:, -1] if sol.t.size else y0)

    values = sol.y.T.copy()
    events: list[TrajectoryEvent] = []
    below = values < -controls.atol
    if np.any(below):
        k_first = int(np.argmax(below.any(axis=1)))
        events.append(TrajectoryEvent(float(sol.t[k_first]), None,
                                      EventKind.NEGATIVITY_CLIPPED))
    np.clip(values, 0.0, None, out=values)

    ctot = np.array([lay.consumer_totals(v) for v in values])
    for i in range(lay.M):
        hit = ctot[:, i] < controls.extinction_threshold
        if hit.any() and not hit[0]:
            events.append(TrajectoryEvent(float(sol.t[int(np.argmax(hit))]), i,
                                          EventKind.EXTINCTION_BELOW_THRESHOLD))
        elif hit.all():
            events.append(TrajectoryEvent(float(sol.t[0]), i,
                                          EventKind.EXTINCTION_BELOW_THRESHOLD))

    dy_end = rhs(float(sol.t[-1]), values[-1])
    scale = np.maximum(np.abs(values[-1]), 1.0)
    if np.max(np.abs(dy_end) / scale) < controls.steady_state_tol:
        events.append(TrajectoryEvent(float(sol.t[-1]), None,
                                      EventKind.STEADY_STATE_REACHED))

    events.sort(key=lambda e: e.time)
    return Trajectory(times=sol.t.copy(), values=values, layout=lay, events=events)


class DynamicsLabel(enum.Enum):
    STABLE_FIXED_POINT = "stable_fixed_point"
    LIMIT_CYCLE = "limit_cycle"
    QUASI_PERIODIC = "quasi_periodic"
    UNDETERMINED = "undetermined"


class ConsumerFate(enum.Enum):
    PERSISTS = "persists"
    EXTINCT = "extinct"


@dataclass(frozen=True)
class OutcomeClass:
    per_consumer: tuple[ConsumerFate, ...]
    dynamics: DynamicsLabel


def _dominant_frequencies(signal: np.ndarray, dt: float):
    """Spectral peak frequencies above a tenth of the strongest peak (DC removed)."""
    sig = signal - signal.mean()
    power = np.abs(np.fft.rfft(sig)) ** 2
    freqs = np.fft.rfftfreq(sig.size, d=dt)
    power[0] = 0.0
    if power.max() <= 0:
        return []
    idx = [i for i in range(1, power.size - 1)
           if power[i] >= 0.1 * power.max()
           and power[i] >= power[i - 1] and power[i] >= power[i + 1]]
    return [(freqs[i], power[i]) for i in idx]


def classify_outcome(traj: Trajectory, window: float,
                     extinction_threshold: float = 1e-3,
                     fixed_point_tol: float = 1e-4) -> OutcomeClass:
    """Label the tail of a trajectory.

    A consumer is extinct if its total stays below the threshold over the last
    window.  The dynamics label looks at the relative oscillation of the
    surviving totals: tiny -> stable fixed point; stationary amplitude with a
    single (harmonically related) spectral family -> limit cycle; two or more
    incommensurate families -> quasi-periodic (a flag to be confirmed with
    Lyapunov/Poincare tools); otherwise undetermined.
    """
    T = traj.times[-1] - traj.times[0]
    if T < 2.0 * window:
        raise TrajectoryTooShortError(
            f"trajectory spans {T}, need at least {2 * window}")

    ctot = traj.consumer_totals()
    rtot = traj.resource_totals()
    t = traj.times
    tail2 = t >= t[-1] - window
    tail1 = (t >= t[-1] - 2.0 * window) & ~tail2

    fates = []
    for i in range(traj.layout.M):
        peak = ctot[tail2, i].max()
        fates.append(ConsumerFate.EXTINCT if peak < extinction_threshold
                     else ConsumerFate.PERSISTS)

    survivors = [i for i, f in enumerate(fates) if f is ConsumerFate.PERSISTS]
    cols = [ctot[:, i] for i in survivors] + [rtot[:, l] for l in range(traj.layout.N)]
    if not cols:
        return OutcomeClass(tuple(fates), DynamicsLabel.UNDETERMINED)

    def rel_osc(series, mask):
        seg = series[mask]
        spread = seg.max() - seg.min()
        return spread / max(abs(seg.mean()), 1e-30)

    osc = max(rel_osc(s, tail2) for s in cols)
    if osc < fixed_point_tol:
        return OutcomeClass(tuple(fates), DynamicsLabel.STABLE_FIXED_POINT)

    # oscillatory: check amplitude stationarity and the spectral content of the
    # most strongly oscillating component, resampled onto a uniform grid
    series = max(cols, key=lambda s: rel_osc(s, tail2))
    amp1 = 0.5 * (series[tail1].max() - series[tail1].min())
    amp2 = 0.5 * (series[tail2].max() - series[tail2].min())
    stationary = amp2 > 0 and abs(amp2 - amp1) / amp2 < 0.01

    n_uni = 2048
    t_uni = np.linspace(t[-1] - window, t[-1], n_uni)
    sig = np.interp(t_uni, t, series)
    peaks = _dominant_frequencies(sig, t_uni[1] - t_uni[0])
    if not peaks:
        return OutcomeClass(tuple(fates), DynamicsLabel.UNDETERMINED)
    f0 = max(peaks, key=lambda p: p[1])[0]
    families = 1
    for f, _ in peaks:
        ratio = f / f0
        if abs(ratio - round(ratio)) > 0.05 and abs(1 / ratio - round(1 / ratio)) > 0.05:
            families = 2
            break

    if families >= 2:
        return OutcomeClass(tuple(fates), DynamicsLabel.QUASI_PERIODIC)
    if stationary:
        return OutcomeClass(tuple(fates), DynamicsLabel.LIMIT_CYCLE)
    return OutcomeClass(tuple(fates), DynamicsLabel.UNDETERMINED)
