"""Exact stochastic simulation of the encounter/capture/birth/death network.

Reactions mirror the deterministic channels term by term: encounters bind free
individuals into pairs, escapes and captures release them, capture destroys the
resource and converts biomass into a Bernoulli(w) birth, mortality strikes any
individual of a species (a paired victim frees its partner), and the resource
law is split into separate birth and death reactions whose means reproduce the
ODE fluxes.  Counts are integers throughout; runs replay deterministically for
a fixed seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from numba import njit

from .dynamics import StateLayout
from .errors import InvalidConfigError
from .model import ModelConfig, ResourceKind, SystemState


@dataclass(frozen=True)
class ReactionSpec:
    """Inspection-friendly view of one reaction: label + propensity closure."""

    label: str
    propensity: object


class ReactionNetwork:
    """Enumerated reactions plus the packed arrays the jitted kernel consumes."""

    def __init__(self, config: ModelConfig):
        self.config = config
        self.layout = StateLayout(config)
        lay = self.layout
        self.a_x = config.a[lay.x_rows, lay.x_cols]
        self.d_x = config.d[lay.x_rows, lay.x_cols]
        self.k_x = config.k[lay.x_rows, lay.x_cols]
        self.w_x = config.w[lay.x_rows, lay.x_cols]
        self.a_y = config.a_intra[lay.y_species]
        self.d_y = config.d_intra[lay.y_species]
        self.a_z = config.a_inter[lay.z_rows, lay.z_cols]
        self.d_z = config.d_inter[lay.z_rows, lay.z_cols]
        self.D = config.D
        laws = config.resource_laws
        self.biotic = np.array([law.kind is ResourceKind.BIOTIC for law in laws])
        self.r_rate = np.array([law.intrinsic_rate for law in laws])
        self.r_cap = np.array([law.carrying_capacity for law in laws])
        self.n_reactions = (3 * lay.n_x + 2 * lay.n_y + 2 * lay.n_z
                            + lay.M + 2 * lay.N)

    # ------------------------------------------------------------------
    # python-side mirror used by tests and diagnostics
    # ------------------------------------------------------------------
    def reactions(self) -> list[ReactionSpec]:
        lay = self.layout
        specs: list[ReactionSpec] = []

        def chan(j):
            return lay.x_rows[j], lay.x_cols[j]

        for j in range(lay.n_x):
            i, l = chan(j)
            specs.append(ReactionSpec(
                f"encounter C{i + 1}+R{l + 1}",
                lambda v, j=j, i=i, l=l: self.a_x[j] * v[i] * v[lay.M + l]))
        for j in range(lay.n_x):
            i, l = chan(j)
            specs.append(ReactionSpec(
                f"escape x[{i + 1},{l + 1}]",
                lambda v, j=j: self.d_x[j] * v[lay.M + lay.N + j]))
        for j in range(lay.n_x):
            i, l = chan(j)
            specs.append(ReactionSpec(
                f"capture x[{i + 1},{l + 1}]",
                lambda v, j=j: self.k_x[j] * v[lay.M + lay.N + j]))
        ofs_y = lay.M + lay.N + lay.n_x
        for j, i in enumerate(lay.y_species):
            specs.append(ReactionSpec(
                f"pair-up C{i + 1}+C{i + 1}",
                lambda v, j=j, i=i: self.a_y[j] * v[i] * (v[i] - 1)))
        for j, i in enumerate(lay.y_species):
            specs.append(ReactionSpec(
                f"split y[{i + 1}]", lambda v, j=j: self.d_y[j] * v[ofs_y + j]))
        ofs_z = ofs_y + lay.n_y
        for j in range(lay.n_z):
            i, jj = lay.z_rows[j], lay.z_cols[j]
            specs.append(ReactionSpec(
                f"pair-up C{i + 1}+C{jj + 1}",
                lambda v, j=j, i=i, jj=jj: self.a_z[j] * v[i] * v[jj]))
        for j in range(lay.n_z):
            specs.append(ReactionSpec(
                f"split z[{j}]", lambda v, j=j: self.d_z[j] * v[ofs_z + j]))
        for i in range(lay.M):
            specs.append(ReactionSpec(
                f"death C{i + 1}",
                lambda v, i=i: self.D[i] * self._consumer_total(v, i)))
        for l in range(lay.N):
            if self.biotic[l]:
                specs.append(ReactionSpec(
                    f"birth R{l + 1}",
                    lambda v, l=l: self.r_rate[l] * self._resource_total(v, l)))
            else:
                specs.append(ReactionSpec(
                    f"influx R{l + 1}", lambda v, l=l: self.r_rate[l]))
        for l in range(lay.N):
            if self.biotic[l]:
                specs.append(ReactionSpec(
                    f"death R{l + 1}",
                    lambda v, l=l: (self.r_rate[l] * self._resource_total(v, l) ** 2
                                    / self.r_cap[l]) if v[lay.M + l] > 0 else 0.0))
            else:
                specs.append(ReactionSpec(
                    f"decay R{l + 1}",
                    lambda v, l=l: (self.r_rate[l] * self._resource_total(v, l)
                                    / self.r_cap[l]) if v[lay.M + l] > 0 else 0.0))
        return specs

    def _consumer_total(self, v, i):
        lay = self.layout
        tot = v[i]
        for j in range(lay.n_x):
            if lay.x_rows[j] == i:
                tot += v[lay.M + lay.N + j]
        for j, sp in enumerate(lay.y_species):
            if sp == i:
                tot += 2 * v[lay.M + lay.N + lay.n_x + j]
        ofs_z = lay.M + lay.N + lay.n_x + lay.n_y
        for j in range(lay.n_z):
            if lay.z_rows[j] == i or lay.z_cols[j] == i:
                tot += v[ofs_z + j]
        return tot

    def _resource_total(self, v, l):
        lay = self.layout
        tot = v[lay.M + l]
        for j in range(lay.n_x):
            if lay.x_cols[j] == l:
                tot += v[lay.M + lay.N + j]
        return tot

    def propensities(self, counts: np.ndarray) -> np.ndarray:
        v = np.asarray(counts)
        return np.array([spec.propensity(v) for spec in self.reactions()])

    def pack_counts(self, c_free, r_free, x=None, y=None, z=None) -> np.ndarray:
        """Packed integer state from full-shaped count arrays."""
        lay = self.layout
        state = SystemState(
            c_free=np.asarray(c_free, float),
            r_free=np.asarray(r_free, float),
            x=np.zeros((lay.M, lay.N)) if x is None else np.asarray(x, float),
            y=np.zeros(lay.M) if y is None else np.asarray(y, float),
            z=np.zeros((lay.M, lay.M)) if z is None else np.asarray(z, float))
        vec = lay.pack(state)
        counts = np.rint(vec).astype(np.int64)
        if np.any(np.abs(vec - counts) > 1e-9):
            raise InvalidConfigError("stochastic runs need integer initial counts")
        return counts


def build_reactions(config: ModelConfig) -> ReactionNetwork:
    return ReactionNetwork(config)


@dataclass
class SsaRun:
    """One stochastic realization sampled on a fixed time grid."""

    seed: int
    event_count: int
    times: np.ndarray
    counts: np.ndarray
    final_state: np.ndarray
    layout: StateLayout

    def consumer_totals(self) -> np.ndarray:
        return np.array([self.layout.consumer_totals(row.astype(float))
                         for row in self.counts])

    def resource_totals(self) -> np.ndarray:
        return np.array([self.layout.resource_totals(row.astype(float))
                         for row in self.counts])

    def to_csv(self, path) -> None:
        ctot = self.consumer_totals()
        rtot = self.resource_totals()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "species", "value"])
            for kk, t in enumerate(self.times):
                for i in range(self.layout.M):
                    writer.writerow([repr(float(t)), f"C{i + 1}", int(ctot[kk, i])])
                for l in range(self.layout.N):
                    writer.writerow([repr(float(t)), f"R{l + 1}", int(rtot[kk, l])])


@njit(cache=True)
def _kernel(state, t0, t_end, sample_times, seed,
            M, N, x_rows, x_cols, a_x, d_x, k_x, w_x,
            y_species, a_y, d_y, z_rows, z_cols, a_z, d_z,
            D, biotic, r_rate, r_cap):  # pragma: no cover - jitted
    np.random.seed(seed)
    n_x = x_rows.size
    n_y = y_species.size
    n_z = z_rows.size
    ofs_r = M
    ofs_x = M + N
    ofs_y = ofs_x + n_x
    ofs_z = ofs_y + n_y
    n_rx = 3 * n_x + 2 * n_y + 2 * n_z + M + 2 * N
    props = np.zeros(n_rx)
    ctot = np.zeros(M)
    rtot = np.zeros(N)
    n_s = sample_times.size
    out = np.zeros((n_s, state.size), dtype=np.int64)
    si = 0
    t = t0
    events = 0

    while True:
        # totals
        for i in range(M):
            ctot[i] = state[i]
        for l in range(N):
            rtot[l] = state[ofs_r + l]
        for j in range(n_x):
            ctot[x_rows[j]] += state[ofs_x + j]
            rtot[x_cols[j]] += state[ofs_x + j]
        for j in range(n_y):
            ctot[y_species[j]] += 2 * state[ofs_y + j]
        for j in range(n_z):
            ctot[z_rows[j]] += state[ofs_z + j]
            ctot[z_cols[j]] += state[ofs_z + j]

        # propensities
        idx = 0
        for j in range(n_x):
            props[idx] = a_x[j] * state[x_rows[j]] * state[ofs_r + x_cols[j]]
            idx += 1
        for j in range(n_x):
            props[idx] = d_x[j] * state[ofs_x + j]
            idx += 1
        for j in range(n_x):
            props[idx] = k_x[j] * state[ofs_x + j]
            idx += 1
        for j in range(n_y):
            cs = state[y_species[j]]
            props[idx] = a_y[j] * cs * (cs - 1) if cs > 1 else 0.0
            idx += 1
        for j in range(n_y):
            props[idx] = d_y[j] * state[ofs_y + j]
            idx += 1
        for j in range(n_z):
            props[idx] = a_z[j] * state[z_rows[j]] * state[z_cols[j]]
            idx += 1
        for j in range(n_z):
            props[idx] = d_z[j] * state[ofs_z + j]
            idx += 1
        for i in range(M):
            props[idx] = D[i] * ctot[i]
            idx += 1
        for l in range(N):
            if biotic[l]:
                props[idx] = r_rate[l] * rtot[l]
            else:
                props[idx] = r_rate[l]
            idx += 1
        for l in range(N):
            if state[ofs_r + l] > 0:
                if biotic[l]:
                    props[idx] = r_rate[l] * rtot[l] * rtot[l] / r_cap[l]
                else:
                    props[idx] = r_rate[l] * rtot[l] / r_cap[l]
            else:
                props[idx] = 0.0
            idx += 1

        a0 = 0.0
        for j in range(n_rx):
            a0 += props[j]

        if a0 <= 0.0:
            t_next = t_end + 1.0
        else:
            t_next = t + np.random.exponential(1.0 / a0)

        while si < n_s and sample_times[si] < t_next:
            for j in range(state.size):
                out[si, j] = state[j]
            si += 1
        if t_next > t_end or a0 <= 0.0:
            break
        t = t_next
        events += 1

        u = np.random.random() * a0
        r = 0
        acc = props[0]
        while acc < u and r < n_rx - 1:
            r += 1
            acc += props[r]

        if r < n_x:  # encounter
            j = r
            state[x_rows[j]] -= 1
            state[ofs_r + x_cols[j]] -= 1
            state[ofs_x + j] += 1
        elif r < 2 * n_x:  # escape
            j = r - n_x
            state[ofs_x + j] -= 1
            state[x_rows[j]] += 1
            state[ofs_r + x_cols[j]] += 1
        elif r < 3 * n_x:  # capture: resource consumed, Bernoulli(w) birth
            j = r - 2 * n_x
            state[ofs_x + j] -= 1
            state[x_rows[j]] += 1
            if np.random.random() < w_x[j]:
                state[x_rows[j]] += 1
        elif r < 3 * n_x + n_y:  # same-species pair forms
            j = r - 3 * n_x
            state[y_species[j]] -= 2
            state[ofs_y + j] += 1
        elif r < 3 * n_x + 2 * n_y:  # same-species pair splits
            j = r - 3 * n_x - n_y
            state[ofs_y + j] -= 1
            state[y_species[j]] += 2
        elif r < 3 * n_x + 2 * n_y + n_z:  # cross pair forms
            j = r - 3 * n_x - 2 * n_y
            state[z_rows[j]] -= 1
            state[z_cols[j]] -= 1
            state[ofs_z + j] += 1
        elif r < 3 * n_x + 2 * n_y + 2 * n_z:  # cross pair splits
            j = r - 3 * n_x - 2 * n_y - n_z
            state[ofs_z + j] -= 1
            state[z_rows[j]] += 1
            state[z_cols[j]] += 1
        elif r < 3 * n_x + 2 * n_y + 2 * n_z + M:  # consumer death
            i = r - 3 * n_x - 2 * n_y - 2 * n_z
            pick = np.random.random() * ctot[i]
            pick -= state[i]
            if pick < 0.0:
                state[i] -= 1
            else:
                done = False
                for j in range(n_x):
                    if x_rows[j] == i:
                        pick -= state[ofs_x + j]
                        if pick < 0.0:
                            state[ofs_x + j] -= 1
                            state[ofs_r + x_cols[j]] += 1
                            done = True
                            break
                if not done:
                    for j in range(n_y):
                        if y_species[j] == i:
                            pick -= 2 * state[ofs_y + j]
                            if pick < 0.0:
                                state[ofs_y + j] -= 1
                                state[i] += 1
                                done = True
                            break
                if not done:
                    for j in range(n_z):
                        if z_rows[j] == i or z_cols[j] == i:
                            pick -= state[ofs_z + j]
                            if pick < 0.0:
                                state[ofs_z + j] -= 1
                                other = z_cols[j] if z_rows[j] == i else z_rows[j]
                                state[other] += 1
                                done = True
                                break
                if not done and state[i] > 0:
                    state[i] -= 1  # roundoff fallback: free victim
        elif r < 3 * n_x + 2 * n_y + 2 * n_z + M + N:  # resource birth/influx
            l = r - 3 * n_x - 2 * n_y - 2 * n_z - M
            state[ofs_r + l] += 1
        else:  # resource death/decay (free individuals only)
            l = r - 3 * n_x - 2 * n_y - 2 * n_z - M - N
            state[ofs_r + l] -= 1

    return out, events, si


def run_ssa(net: ReactionNetwork, initial_counts: np.ndarray, t_end: float,
            seed: int, sample_times: np.ndarray | None = None,
            t0: float = 0.0) -> SsaRun:
    """Exact next-reaction-time simulation from an integer state.

    Identical seeds replay identical event sequences.  Absorbing states simply
    advance time to t_end.
    """
    counts = np.asarray(initial_counts, dtype=np.int64).copy()
    lay = net.layout
    if counts.shape != (lay.dim,):
        raise InvalidConfigError(f"initial counts must be a packed vector of length {lay.dim}")
    if np.any(counts < 0):
        raise InvalidConfigError("counts must be non-negative")
    if sample_times is None:
        sample_times = np.linspace(t0, t_end, 200)
    sample_times = np.asarray(sample_times, float)

    out, events, filled = _kernel(
        counts, float(t0), float(t_end), sample_times, int(seed),
        lay.M, lay.N, lay.x_rows.astype(np.int64), lay.x_cols.astype(np.int64),
        net.a_x, net.d_x, net.k_x, net.w_x,
        lay.y_species.astype(np.int64), net.a_y, net.d_y,
        lay.z_rows.astype(np.int64), lay.z_cols.astype(np.int64), net.a_z, net.d_z,
        net.D, net.biotic, net.r_rate, net.r_cap)
    out[filled:] = counts
    return SsaRun(seed=int(seed), event_count=int(events), times=sample_times,
                  counts=out, final_state=counts, layout=lay)


def run_ensemble(net: ReactionNetwork, initial_counts, t_end, seeds,
                 sample_times=None, n_jobs: int = 1) -> list[SsaRun]:
    """Independent replicates across seeds (optionally on a process pool)."""
    seeds = list(seeds)
    if n_jobs != 1:
        from joblib import Parallel, delayed

        return Parallel(n_jobs=n_jobs)(
            delayed(run_ssa)(net, initial_counts, t_end, s, sample_times)
            for s in seeds)
    return [run_ssa(net, initial_counts, t_end, s, sample_times) for s in seeds]


def ensemble_consumer_stats(runs: list[SsaRun]):
    """Per-checkpoint mean and standard error of the consumer totals."""
    stack = np.stack([run.consumer_totals() for run in runs])
    mean = stack.mean(axis=0)
    se = stack.std(axis=0, ddof=1) / np.sqrt(len(runs))
    return mean, se


def ensemble_to_csv(runs: list[SsaRun], path) -> None:
    mean, se = ensemble_consumer_stats(runs)
    times = runs[0].times
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "species", "mean", "stderr"])
        for kk, t in enumerate(times):
            for i in range(mean.shape[1]):
                writer.writerow([repr(float(t)), f"C{i + 1}",
                                 repr(float(mean[kk, i])), repr(float(se[kk, i]))])
