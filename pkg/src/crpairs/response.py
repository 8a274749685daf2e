"""Functional responses and searching efficiencies for every pairwise scenario,
their phenomenological interference-model counterparts, and discrepancy surfaces.

Order numbering follows the derivation chain for each scenario: 1 = exact,
2 = quasi-rigorous, 3 = first-order, 4 = dilute/strong-interference limit.
The cross-species scenario only admits orders 2 and 3 (no closed exact form).
All efficiencies satisfy Xi * R = F identically by construction.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidConfigError
from .model import ScenarioKind
from .qss import (IntraApproximation, qss_chasing_quadratic, qss_intra_approx,
                  qss_intra_cubic, qss_inter_pair)


class FrOrder(enum.Enum):
    EXACT = 1
    QUASI_RIGOROUS = 2
    FIRST_ORDER = 3
    DILUTE_LIMIT = 4


_ALLOWED_ORDERS = {
    ScenarioKind.CHASING_ONLY: frozenset(FrOrder),
    ScenarioKind.CHASING_INTRA: frozenset(FrOrder),
    ScenarioKind.CHASING_INTER: frozenset({FrOrder.QUASI_RIGOROUS, FrOrder.FIRST_ORDER}),
}


@dataclass(frozen=True)
class FrVariant:
    """A (scenario, order) pair; ``order=None`` marks the phenomenological model."""

    scenario: ScenarioKind
    order: FrOrder | None

    def __post_init__(self):
        if self.scenario not in _ALLOWED_ORDERS:
            raise InvalidConfigError(
                f"no functional-response family for scenario {self.scenario.value}")
        if self.order is not None and self.order not in _ALLOWED_ORDERS[self.scenario]:
            raise InvalidConfigError(
                f"order {self.order.name} undefined for {self.scenario.value}")

    @property
    def label(self) -> str:
        tag = "BD" if self.order is None else f"{self.order.value}"
        return f"{self.scenario.value}:{tag}"


def _check_pos(**vals):
    for name, v in vals.items():
        if v <= 0:
            raise DomainError(f"{name} must be positive")


def fr_chasing(R: float, C: float, a: float, d: float, k: float,
               order: FrOrder = FrOrder.EXACT) -> tuple[float, float]:
    """Per-consumer capture rate F and searching efficiency Xi = F/R for the
    chasing-only channel."""
    order = FrOrder(order)
    _check_pos(R=R, a=a, k=k)
    if d < 0 or C < 0:
        raise DomainError("d and C must be non-negative")
    K = (d + k) / a
    if order is FrOrder.EXACT:
        _check_pos(C=C)
        x = qss_chasing_quadratic(R, C, K)
        F = k * x / C
    elif order is FrOrder.QUASI_RIGOROUS:
        F = k * R / (R + C + K)
    elif order is FrOrder.FIRST_ORDER:
        s = R + C + K
        F = k * R / (s - R * C / s)
    else:
        F = k * R / (R + K)
    return F, F / R


def fr_intra(R: float, C: float, a: float, d: float, k: float,
             a_intra: float, d_intra: float,
             order: FrOrder = FrOrder.EXACT) -> tuple[float, float]:
    """F and Xi with same-species interference; the exact order routes through
    the cubic, the rest use the dilute closed forms."""
    order = FrOrder(order)
    _check_pos(R=R, a=a, k=k, d_intra=d_intra)
    if min(d, C, a_intra) < 0:
        raise DomainError("d, C, a_intra must be non-negative")
    K = (d + k) / a
    beta = a_intra / d_intra
    if order is FrOrder.EXACT:
        _check_pos(C=C)
        x = qss_intra_cubic(R, C, K, beta)
        F = k * x / C
    else:
        variant = {
            FrOrder.QUASI_RIGOROUS: IntraApproximation.QUASI_RIGOROUS,
            FrOrder.FIRST_ORDER: IntraApproximation.SMALL_BETA,
            FrOrder.DILUTE_LIMIT: IntraApproximation.LARGE_BETA,
        }[order]
        if C == 0.0:
            # limits of the closed forms as the consumer abundance vanishes
            if variant is IntraApproximation.LARGE_BETA:
                F = 0.0
            else:
                F = k * R / (R + K)
        else:
            F = k * qss_intra_approx(R, C, K, beta, variant) / C
    return F, F / R


def fr_inter(R: float, C1: float, C2: float, a1: float, a2: float,
             d1: float, d2: float, k1: float, k2: float, gamma: float,
             order: FrOrder = FrOrder.QUASI_RIGOROUS):
    """Per-species F and Xi when the two consumer species interfere with each
    other; returns (F1, F2, Xi1, Xi2).  Symmetric under the species swap."""
    order = FrOrder(order)
    if order not in _ALLOWED_ORDERS[ScenarioKind.CHASING_INTER]:
        raise InvalidConfigError(f"order {order.name} undefined for the cross-species family")
    _check_pos(R=R, a1=a1, a2=a2, k1=k1, k2=k2)
    if min(d1, d2, C1, C2, gamma) < 0:
        raise DomainError("d_i, C_i, gamma must be non-negative")
    K1 = (d1 + k1) / a1
    K2 = (d2 + k2) / a2
    A1 = 1.0 + R / K1
    A2 = 1.0 + R / K2

    if order is FrOrder.QUASI_RIGOROUS:
        def xi(ki, Ki, Ai, Aj, Ci, Cj):
            base = gamma * (Cj - Ci) + Ai * Aj
            return 2.0 * ki * (Aj / Ki) / (base + math.sqrt(base * base
                                                            + 4.0 * gamma * Ci * Ai * Aj))

        Xi1 = xi(k1, K1, A1, A2, C1, C2)
        Xi2 = xi(k2, K2, A2, A1, C2, C1)
    else:
        pool = gamma * (C1 + C2) + A1 * A2

        def xi(ki, Ki, Kj, Ci, Cj):
            denom = (R + Ki) + gamma * Ki * Kj * Cj / (R + Kj) \
                - gamma**2 * Ki * Kj * Ci * Cj / (pool * (R + Kj))
            return ki / denom

        Xi1 = xi(k1, K1, K2, C1, C2)
        Xi2 = xi(k2, K2, K1, C2, C1)
    return Xi1 * R, Xi2 * R, Xi1, Xi2


def fr_beddington(scenario: ScenarioKind, R: float, C, *, a, k,
                  beta: float = 0.0, gamma: float = 0.0,
                  use_c_minus_one: bool = False):
    """Phenomenological interference response with handling time 1/k and
    wasting time given by the interference separation rate.

    For the cross-species scenario ``C``, ``a`` and ``k`` are pairs and the
    return is (F1, F2, Xi1, Xi2); otherwise (F, Xi).  The consumer count
    entering the interference term is C by default (C - 1 when
    ``use_c_minus_one`` is set, which matters only at O(1) abundances).
    """
    scenario = ScenarioKind(scenario)
    if scenario is ScenarioKind.CHASING_INTER:
        C1, C2 = C
        a1, a2 = np.broadcast_to(np.asarray(a, float), (2,))
        k1, k2 = np.broadcast_to(np.asarray(k, float), (2,))
        _check_pos(R=R, a1=a1, a2=a2, k1=k1, k2=k2)
        c1 = C1 - 1.0 if use_c_minus_one else C1
        c2 = C2 - 1.0 if use_c_minus_one else C2
        Xi1 = a1 / (1.0 + a1 * R / k1 + gamma * max(c2, 0.0))
        Xi2 = a2 / (1.0 + a2 * R / k2 + gamma * max(c1, 0.0))
        return Xi1 * R, Xi2 * R, Xi1, Xi2
    _check_pos(R=R, a=a, k=k)
    interference = 0.0
    if scenario is ScenarioKind.CHASING_INTRA:
        cc = C - 1.0 if use_c_minus_one else C
        interference = beta * max(cc, 0.0)
    Xi = a / (1.0 + a * R / k + interference)
    return Xi * R, Xi


def xi_function(variant: FrVariant, **rates):
    """Bind a variant and its rate constants into a callable Xi(R, C).

    For the cross-species family C is the same-species abundance of the focal
    consumer and ``c_other`` (a rate argument) holds the competitor abundance.
    """
    scenario = variant.scenario
    if variant.order is None:
        if scenario is ScenarioKind.CHASING_INTER:
            def f(R, C):
                out = fr_beddington(scenario, R, (C, rates["c_other"]),
                                    a=(rates["a"], rates["a"]),
                                    k=(rates["k"], rates["k"]),
                                    gamma=rates.get("gamma", 0.0))
                return out[2]
        else:
            def f(R, C):
                return fr_beddington(scenario, R, C, a=rates["a"], k=rates["k"],
                                     beta=rates.get("beta", 0.0))[1]
        return f
    if scenario is ScenarioKind.CHASING_ONLY:
        def f(R, C):
            return fr_chasing(R, C, rates["a"], rates.get("d", 0.0), rates["k"],
                              variant.order)[1]
    elif scenario is ScenarioKind.CHASING_INTRA:
        def f(R, C):
            return fr_intra(R, C, rates["a"], rates.get("d", 0.0), rates["k"],
                            rates["a_intra"], rates["d_intra"], variant.order)[1]
    else:
        def f(R, C):
            out = fr_inter(R, C, rates["c_other"], rates["a"], rates["a"],
                           rates.get("d", 0.0), rates.get("d", 0.0),
                           rates["k"], rates["k"], rates.get("gamma", 0.0),
                           variant.order)
            return out[2]
    return f


@dataclass(frozen=True)
class FrSurface:
    """Values of F or Xi (or a comparison of two variants) on an (R, C) grid."""

    r_grid: np.ndarray
    c_grid: np.ndarray
    values: np.ndarray
    variant: str

    def __post_init__(self):
        if self.values.shape != (self.r_grid.size, self.c_grid.size):
            raise InvalidConfigError("surface shape must be (len(r_grid), len(c_grid))")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["R", "C", "value", "variant"])
            for i, r in enumerate(self.r_grid):
                for j, c in enumerate(self.c_grid):
                    writer.writerow([repr(float(r)), repr(float(c)),
                                     repr(float(self.values[i, j])), self.variant])


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Log-spaced abscissa; the regimes of interest span decades."""
    return np.logspace(math.log10(lo), math.log10(hi), n)


def evaluate_surface(xi, r_grid, c_grid, label: str) -> FrSurface:
    values = np.empty((len(r_grid), len(c_grid)))
    for i, r in enumerate(r_grid):
        for j, c in enumerate(c_grid):
            values[i, j] = xi(float(r), float(c))
    return FrSurface(r_grid=np.asarray(r_grid, float),
                     c_grid=np.asarray(c_grid, float), values=values, variant=label)


def fr_discrepancy_surface(xi_a, xi_b, r_grid, c_grid,
                           label_a: str = "a", label_b: str = "b"
                           ) -> tuple[FrSurface, FrSurface]:
    """Pointwise |Xi_a - Xi_b| and the relative error scaled by Xi_a."""
    sa = evaluate_surface(xi_a, r_grid, c_grid, label_a)
    sb = evaluate_surface(xi_b, r_grid, c_grid, label_b)
    diff = np.abs(sa.values - sb.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(sa.values != 0, diff / np.abs(sa.values), 0.0)
    return (FrSurface(sa.r_grid, sa.c_grid, diff, f"|{label_a}-{label_b}|"),
            FrSurface(sa.r_grid, sa.c_grid, rel, f"rel({label_a},{label_b})"))
