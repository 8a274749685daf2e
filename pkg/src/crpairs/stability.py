"""Linear stability, Hopf-threshold location, Lyapunov spectra, Poincare sections."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dynamics import (IntegrationControls, RhsFunction, Trajectory, build_rhs,
                       integrate)
from .errors import (CrpairsError, FrameDegeneracyError, InvalidConfigError,
                     NoCrossingError)
from .model import ModelConfig, ScenarioKind, SystemState
from .numerics import fd_jacobian
from .steady_state import (FixedPoint, analytic_intra_2x1, refine_fixed_point)

#: classification noise floor of the finite-difference Jacobian
TOL_MARGINAL = 1e-7


class StabilityClass(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class StabilityReport:
    fixed_point: FixedPoint
    eigenvalues: np.ndarray
    classification: StabilityClass
    leading_real_part: float


def jacobian_at(config: ModelConfig, point: FixedPoint | SystemState,
                rel_step: float = 1e-6, min_step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of the full RHS at a fixed point.

    The caller is expected to hand in a point with residual below ~1e-6;
    the FD step per component is max(min_step, rel_step * |component|).
    """
    state = point.state if isinstance(point, FixedPoint) else point
    rhs = build_rhs(config)
    vec = rhs.layout.pack(state)
    return fd_jacobian(lambda v: rhs(0.0, v), vec,
                       rel_step=rel_step, min_step=min_step)


def classify(config: ModelConfig, point: FixedPoint | SystemState,
             tol_marginal: float = TOL_MARGINAL,
             rel_step: float = 1e-6, min_step: float = 1e-6) -> StabilityReport:
    """Eigenvalue classification of a fixed point."""
    J = jacobian_at(config, point, rel_step=rel_step, min_step=min_step)
    try:
        eig = np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise CrpairsError(f"eigenvalue solver failed: {exc}") from exc
    order = np.argsort(-eig.real)
    eig = eig[order]
    lead = float(eig.real[0])
    if lead < -tol_marginal:
        cls = StabilityClass.STABLE
    elif abs(lead) <= tol_marginal:
        cls = StabilityClass.MARGINAL
    else:
        cls = StabilityClass.UNSTABLE
    fp = point if isinstance(point, FixedPoint) else None
    if fp is None:
        from .steady_state import FixedPointMethod, _finish
        fp = _finish(config, point, FixedPointMethod.NEWTON_REFINED)
    return StabilityReport(fixed_point=fp, eigenvalues=eig,
                           classification=cls, leading_real_part=lead)


@dataclass(frozen=True)
class HopfResult:
    """Located oscillation threshold in the joint pair-separation rate.

    ``orientation`` is +1 when the system is unstable above the critical rate
    and -1 when it is unstable below it (the scan reports whichever it finds).
    """

    d_prime_critical: float
    orientation: int
    amplitude_samples: tuple[tuple[float, float], ...]
    fit_slope: float
    fit_intercept: float
    fit_r2: float

    def to_json(self, path=None) -> str:
        payload = {
            "d_prime_critical": self.d_prime_critical,
            "orientation": self.orientation,
            "amplitude_samples": [list(p) for p in self.amplitude_samples],
            "fit_slope": self.fit_slope,
            "fit_intercept": self.fit_intercept,
            "fit_r2": self.fit_r2,
        }
        text = json.dumps(payload, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _leading_real_part(config: ModelConfig, d_prime: float,
                       newton_tol: float, fd_rel_step: float):
    cfg = config.with_updates(d_intra=np.full(config.M, d_prime))
    seed = analytic_intra_2x1(cfg)
    fp = refine_fixed_point(cfg, seed, tol=newton_tol, fd_rel_step=fd_rel_step)
    report = classify(cfg, fp, rel_step=fd_rel_step)
    return report.leading_real_part, fp, cfg


def hopf_scan(config: ModelConfig, d_prime_range: tuple[float, float],
              resolution: int = 16, *, amplitude_points: int = 8,
              amplitude_span: float = 0.45, amplitude_component: int = 0,
              t_attract: float = 3.0e4, newton_tol: float = 1e-10,
              fd_rel_step: float = 1e-6, bisect_rel_tol: float = 1e-6,
              ode_rtol: float = 1e-8, ode_atol: float = 1e-10) -> HopfResult:
    """Locate the oscillation threshold in the joint separation rate d' and
    verify the square-root amplitude law on the oscillatory side.

    Both species' separation rates sweep together.  The threshold is bracketed
    by the sign change of the leading Jacobian eigenvalue at the refined fixed
    point, then bisected to ``bisect_rel_tol`` relative; amplitudes are the
    half peak-to-peak excursions of one consumer total on the attractor, and
    amplitude^2 is regressed linearly on the distance to threshold.
    """
    if config.scenario is not ScenarioKind.CHASING_INTRA:
        raise InvalidConfigError("hopf_scan sweeps the intraspecific separation rate")
    if config.M != 2 or config.N != 1:
        raise InvalidConfigError("hopf_scan expects M=2, N=1")
    lo, hi = d_prime_range
    if not (0 < lo < hi):
        raise InvalidConfigError("d_prime_range must be positive and increasing")

    grid = np.linspace(lo, hi, resolution)
    leads = np.empty(resolution)
    for j, dp in enumerate(grid):
        leads[j], _, _ = _leading_real_part(config, dp, newton_tol, fd_rel_step)

    sign = np.sign(leads)
    flips = np.nonzero(np.diff(sign) != 0)[0]
    if flips.size == 0:
        raise NoCrossingError(
            f"leading eigenvalue does not change sign on [{lo}, {hi}] "
            f"(range {leads.min():.3e} .. {leads.max():.3e})")
    j = int(flips[0])
    a, b = grid[j], grid[j + 1]
    fa = leads[j]
    while (b - a) > bisect_rel_tol * max(abs(a), abs(b)):
        mid = 0.5 * (a + b)
        fm, _, _ = _leading_real_part(config, mid, newton_tol, fd_rel_step)
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    d_c = 0.5 * (a + b)

    # the unstable side is where the leading real part is positive
    unstable_high = leads[j + 1] > 0
    orientation = 1 if unstable_high else -1

    offsets = np.linspace(0.06, amplitude_span, amplitude_points)
    samples = []
    warm: SystemState | None = None
    controls = IntegrationControls(rtol=ode_rtol, atol=ode_atol, n_samples=2000)
    for off in offsets:
        dp = d_c * (1.0 + orientation * off)
        if dp <= 0 or dp < lo * 0.5 or dp > hi * 2.0:
            continue
        lead, fp, cfg = _leading_real_part(config, dp, newton_tol, fd_rel_step)
        if warm is None:
            start = SystemState(c_free=fp.state.c_free * 1.02,
                                r_free=fp.state.r_free,
                                x=fp.state.x, y=fp.state.y, z=fp.state.z)
        else:
            start = warm
        traj = integrate(build_rhs(cfg), start, start.t + t_attract, controls)
        ctot = traj.consumer_totals()[:, amplitude_component]
        tail = traj.times >= traj.times[-1] - 0.2 * (traj.times[-1] - traj.times[0])
        amp = 0.5 * (ctot[tail].max() - ctot[tail].min())
        samples.append((float(dp), float(amp)))
        final = traj.final_state()
        warm = SystemState(c_free=final.c_free, r_free=final.r_free,
                           x=final.x, y=final.y, z=final.z)

    if len(samples) < 2:
        raise NoCrossingError("not enough amplitude samples on the oscillatory side")
    dps = np.array([s[0] for s in samples])
    amps = np.array([s[1] for s in samples])
    fit = stats.linregress(orientation * (dps - d_c), amps**2)
    return HopfResult(d_prime_critical=float(d_c), orientation=orientation,
                      amplitude_samples=tuple(samples),
                      fit_slope=float(fit.slope),
                      fit_intercept=float(fit.intercept),
                      fit_r2=float(fit.rvalue**2))


@dataclass(frozen=True)
class LyapunovSpectrum:
    exponents: np.ndarray
    integration_time: float
    renorm_interval: float

    def to_json(self, path=None) -> str:
        payload = {
            "exponents": self.exponents.tolist(),
            "integration_time": self.integration_time,
            "renorm_interval": self.renorm_interval,
        }
        text = json.dumps(payload, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def lyapunov_spectrum(config: ModelConfig, initial: SystemState,
                      t_total: float, renorm_dt: float, *,
                      t_transient: float = 0.0, rtol: float = 1e-9,
                      atol: float = 1e-11) -> LyapunovSpectrum:
    """Full Lyapunov spectrum by the tangent-space method.

    An orthonormal frame is transported by the FD-linearized flow alongside the
    trajectory and re-orthonormalized by QR every ``renorm_dt``; exponents are
    the time-averaged log stretch factors, sorted descending.
    """
    from scipy.integrate import solve_ivp

    rhs = build_rhs(config)
    lay = rhs.layout
    n = lay.dim
    y = lay.pack(initial)

    def augmented(t, yv):
        state = yv[:n]
        V = yv[n:].reshape(n, n)
        J = fd_jacobian(lambda v: rhs(0.0, v), state, rel_step=1e-7, min_step=1e-9)
        return np.concatenate([rhs(t, state), (J @ V).ravel()])

    if t_transient > 0:
        sol = solve_ivp(rhs, (0.0, t_transient), y, method="DOP853",
                        rtol=rtol, atol=atol)
        y = sol.y[:, -1]

    V = np.eye(n)
    sums = np.zeros(n)
    n_steps = int(round(t_total / renorm_dt))
    if n_steps < 1:
        raise InvalidConfigError("t_total must cover at least one renormalization")
    for _ in range(n_steps):
        packed = np.concatenate([y, V.ravel()])
        sol = solve_ivp(augmented, (0.0, renorm_dt), packed, method="DOP853",
                        rtol=rtol, atol=atol)
        y = sol.y[:n, -1]
        V = sol.y[n:, -1].reshape(n, n)
        Q, Rm = np.linalg.qr(V)
        diag = np.abs(np.diag(Rm))
        if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
            raise FrameDegeneracyError("tangent frame collapsed during QR sweep")
        sums += np.log(diag)
        V = Q
    exponents = np.sort(sums / (n_steps * renorm_dt))[::-1]
    return LyapunovSpectrum(exponents=exponents,
                            integration_time=float(n_steps * renorm_dt),
                            renorm_interval=float(renorm_dt))


def _series_for_component(traj: Trajectory, component):
    if isinstance(component, str):
        kind, idx = component[0].upper(), int(component[1:]) - 1
        if kind == "C":
            return traj.consumer_totals()[:, idx]
        if kind == "R":
            return traj.resource_totals()[:, idx]
        raise InvalidConfigError(f"unknown component spec {component!r}")
    return traj.values[:, int(component)]


def poincare_section(traj: Trajectory, plane) -> tuple[np.ndarray, np.ndarray]:
    """Linear-interpolated crossings of a coordinate hyperplane.

    ``plane`` is (component, value, direction): the component is a packed state
    index or a total like "C1"/"R1"; direction +1 keeps upward crossings,
    -1 downward, 0 both.  Returns (times, states) of the crossings.
    """
    component, value, direction = plane
    series = _series_for_component(traj, component)
    s = series - value
    times, states = [], []
    for kidx in range(s.size - 1):
        s0, s1 = s[kidx], s[kidx + 1]
        if s0 == s1 or s0 * s1 > 0:
            continue
        rising = s1 > s0
        if direction == 1 and not rising:
            continue
        if direction == -1 and rising:
            continue
        w = -s0 / (s1 - s0)
        times.append(traj.times[kidx] + w * (traj.times[kidx + 1] - traj.times[kidx]))
        states.append(traj.values[kidx] + w * (traj.values[kidx + 1] - traj.values[kidx]))
    if not times:
        raise NoCrossingError("trajectory never crosses the requested plane")
    return np.asarray(times), np.asarray(states)


def poincare_to_csv(times: np.ndarray, states: np.ndarray, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time"] + [f"state_{j}" for j in range(states.shape[1])])
        for t, row in zip(times, states):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
