"""Named parameter presets for every packaged demonstration scenario.

Each preset bundles a ModelConfig (rates transcribed from the simulation
parameter listings), an engine, and default controls (initial abundances,
horizons, seeds, sweep axes).  Where a listing leaves something unstated
(initial conditions always; occasionally a mortality difference or an escape
rate), the preset fills a documented default rather than guessing silently;
see the ``notes`` field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModelConfig, ResourceLaw

_REGISTRY: dict[str, "Preset"] = {}


@dataclass(frozen=True)
class Preset:
    name: str
    engine: str
    description: str
    config: ModelConfig | None
    controls: dict = field(default_factory=dict)
    notes: str = ""


def _register(preset: Preset) -> Preset:
    _REGISTRY[preset.name] = preset
    return preset


def get_preset(name: str) -> Preset:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; see list_presets()") from None


def list_presets() -> list[str]:
    return sorted(_REGISTRY)


def _ramp_mortality(base: float, spread: float, M: int, seed: int) -> np.ndarray:
    """Mortalities base + spread * xi_i with xi uniform in (0, 1), seeded."""
    rng = np.random.default_rng(seed)
    return base + spread * rng.random(M)


def _ode_initial(config: ModelConfig, c0: float = 1.0) -> dict:
    r0 = [law.carrying_capacity / 2 for law in config.resource_laws]
    return {"c_free": [c0] * config.M, "r_free": r0}


def _ssa_initial(config: ModelConfig, c0: int = 10) -> dict:
    r0 = [max(1, int(law.carrying_capacity / 2)) for law in config.resource_laws]
    return {"c_free": [c0] * config.M, "r_free": r0}


def _build_all() -> None:
    bio = lambda rate, cap: ResourceLaw("biotic", rate, cap)
    abio = lambda rate, cap: ResourceLaw("abiotic", rate, cap)

    # ---------------------------------------------------------------- fig 1
    chasing_small = ModelConfig.build(
        2, 1, a=0.1, d=0.5, k=0.1, w=0.1, D=[0.002, 0.001],
        resource_laws=abio(0.05, 5.0))
    _register(Preset("fig1c", "ode", "two consumers, one abiotic resource, "
                     "chasing only: exclusion", chasing_small,
                     {"t_end": 1e5, "initial": {"c_free": [1.0, 1.0], "r_free": [1.0]}}))
    inter_1d = ModelConfig.build(
        2, 1, a=0.05, d=0.5, k=0.02, w=0.08, D=[0.001, 0.0009],
        a_inter=0.3, d_inter=0.01, resource_laws=abio(0.1, 10.0))
    _register(Preset("fig1d", "ode", "cross-species interference, abiotic "
                     "resource: no steady coexistence", inter_1d,
                     {"t_end": 1e5, "initial": _ode_initial(inter_1d, 0.5)}))
    intra_1e = ModelConfig.build(
        2, 1, a=0.5, d=0.5, k=0.4, w=0.2, D=[0.022, 0.020],
        a_intra=0.525, d_intra=0.5, resource_laws=bio(0.1, 10.0))
    _register(Preset("fig1e", "ode", "same-species interference, biotic "
                     "resource: stable coexistence", intra_1e,
                     {"t_end": 1e5, "initial": {"c_free": [0.1, 0.1], "r_free": [5.0]}}))
    _register(Preset("fig1f", "stability", "fixed-point view of fig1c",
                     chasing_small, {}))
    _register(Preset("fig1g", "stability", "fixed-point view of fig1d", inter_1d, {}))
    _register(Preset("fig1h", "stability", "fixed-point view of fig1e", intra_1e, {}))

    # ---------------------------------------------------------------- fig 2
    inter_s7 = ModelConfig.build(
        2, 1, a=0.05, d=0.1, k=0.1, w=0.05, D=[0.0009, 0.0007],
        a_inter=0.02, d_inter=0.02, resource_laws=bio(0.05, 60.0))
    _register(Preset("fig2a", "ssa", "cross interference, stochastic loss of "
                     "coexistence", inter_s7,
                     {"t_end": 1e5, "seeds": list(range(8)),
                      "initial": {"c_free": [30, 30], "r_free": [30]}},
                     notes="kinetic rates shared with the figS7 family"))
    _register(Preset("fig2b", "ssa", "second stochastic realization of fig2a",
                     inter_s7, {"t_end": 1e5, "seeds": list(range(8, 16)),
                                "initial": {"c_free": [30, 30], "r_free": [30]}}))
    inter_2c = ModelConfig.build(
        2, 1, a=0.15, d=0.1, k=0.2, w=0.1, D=[0.0009, 0.0007],
        a_inter=0.02, d_inter=0.02, resource_laws=bio(0.15, 60.0))
    _register(Preset("fig2c", "ssa", "cross interference, biotic resource: "
                     "stochastic extinction", inter_2c,
                     {"t_end": 1e5, "seeds": list(range(50)),
                      "initial": {"c_free": [30, 30], "r_free": [60]}},
                     notes="cross-pair rates 0.02/0.02 carried over from fig2a-b"))
    intra_2d = ModelConfig.build(
        2, 1, a=0.1, d=0.1, k=0.1, w=0.1, D=[0.0035, 0.0038],
        a_intra=0.125, d_intra=0.05, resource_laws=abio(0.3, 100.0))
    _register(Preset("fig2d", "ssa", "same-species interference, abiotic: "
                     "stochastic coexistence", intra_2d,
                     {"t_end": 1e5, "seeds": list(range(8)),
                      "initial": _ssa_initial(intra_2d)}))
    hopf_family = ModelConfig.build(
        2, 1, a=0.1, d=0.1, k=0.1, w=0.1, D=[0.0085, 0.0080],
        a_intra=0.125, d_intra=0.05, resource_laws=bio(0.05, 100.0))
    _register(Preset("fig2e", "ode", "oscillation family, separation rate 0.05",
                     hopf_family, {"t_end": 1e5, "initial": _ode_initial(hopf_family)}))
    _register(Preset("fig2f", "ode", "oscillation family, separation rate 0.1",
                     hopf_family.with_updates(d_intra=np.array([0.1, 0.1])),
                     {"t_end": 1e5, "initial": _ode_initial(hopf_family)},
                     notes="run-on in the listing read as separation 0.1 with "
                           "mortalities 0.0085/0.0080"))
    scan_base_abio = ModelConfig.build(
        2, 1, a=0.1, d=0.1, k=0.1, w=0.1, D=[0.002, 0.001],
        a_intra=0.125, d_intra=0.05, resource_laws=abio(0.1, 100.0))
    _register(Preset("fig2g", "scan", "coexistence region, abiotic",
                     scan_base_abio,
                     {"axes": [("delta", list(np.round(np.linspace(0.0, 2.0, 9), 3))),
                               ("d_intra", list(np.round(np.geomspace(0.01, 0.3, 9), 4)))],
                      "t_end": 2e4},
                     notes="pair-formation rate fixed at the family value 0.125"))
    scan_base_bio = scan_base_abio.with_updates(resource_laws=(bio(0.05, 100.0),))
    _register(Preset("fig2h", "scan", "coexistence region, biotic", scan_base_bio,
                     {"axes": [("delta", list(np.round(np.linspace(0.0, 2.0, 9), 3))),
                               ("d_intra", list(np.round(np.geomspace(0.01, 0.3, 9), 4)))],
                      "t_end": 2e4}))
    _register(Preset("fig2i", "scan", "transection at mortality difference 1",
                     scan_base_bio.with_updates(D=np.array([0.002, 0.001])),
                     {"axes": [("a_intra", list(np.round(np.geomspace(0.02, 0.4, 9), 4))),
                               ("d_intra", list(np.round(np.geomspace(0.01, 0.3, 9), 4)))],
                      "t_end": 2e4}))
    intra_2j = ModelConfig.build(
        2, 1, a=0.02, d=0.7, k=0.05, w=0.4, D=[0.0160, 0.0171],
        a_intra=0.025, d_intra=0.7, resource_laws=abio(5.5, 2000.0))
    _register(Preset("fig2j", "ssa", "abiotic stochastic coexistence at scale",
                     intra_2j, {"t_end": 1e5, "seeds": list(range(8)),
                                "initial": {"c_free": [50, 50], "r_free": [1000]}}))
    intra_2k = ModelConfig.build(
        2, 1, a=0.06, d=2.0, k=0.22, w=0.32, D=[0.0550, 0.0551],
        a_intra=0.075, d_intra=2.0, resource_laws=bio(0.13, 5000.0))
    _register(Preset("fig2k", "ssa", "biotic stochastic coexistence at scale",
                     intra_2k, {"t_end": 1e5, "seeds": list(range(50)),
                                "initial": {"c_free": [60, 60], "r_free": [200]}}))
    _register(Preset("fig2m", "ibm", "spatial coexistence demonstration",
                     None,
                     {"L": 120.0, "r": 5.0, "v": 1.0, "d": 0.4, "k": 0.1,
                      "d_prime": 0.4, "w": 0.3, "D": [0.0080, 0.0085],
                      "resource_law": {"kind": "biotic", "intrinsic_rate": 0.5,
                                       "carrying_capacity": 200.0},
                      "counts": [40, 40, 120], "t_end": 1e4}))

    # ---------------------------------------------------------------- fig 3
    fig3a = ModelConfig.build(
        5, 3, a=0.05, d=1.05, k=0.16, w=0.45,
        D=[0.062, 0.0615, 0.0639, 0.066, 0.0644],
        a_intra=0.07, d_intra=0.018,
        resource_laws=(bio(0.9, 600.0), bio(0.9, 1000.0), bio(0.95, 800.0)))
    _register(Preset("fig3a", "ode", "five consumers on three biotic resources",
                     fig3a, {"t_end": 1e5,
                             "initial": {"c_free": [1.0] * 5,
                                         "r_free": [300.0, 500.0, 400.0]}}))
    fig3b = ModelConfig.build(
        18, 3, a=0.1, d=0.5, k=0.2, w=0.2,
        D=_ramp_mortality(0.03, 0.005, 18, seed=3),
        a_intra=0.125, d_intra=0.3,
        resource_laws=(bio(0.95, 6000.0), bio(0.85, 4000.0), bio(0.9, 5000.0)))
    _register(Preset("fig3b", "ode", "eighteen consumers on three biotic resources",
                     fig3b, {"t_end": 1e5, "initial": _ode_initial(fig3b, 5.0)},
                     notes="mortalities drawn once from the stated uniform law, seed 3"))
    _register(Preset("fig3c", "ssa", "stochastic counterpart of fig3b", fig3b,
                     {"t_end": 2e4, "seeds": list(range(4)),
                      "initial": _ssa_initial(fig3b, 20)}))
    fig3d = ModelConfig.build(
        5, 1, a=0.1, d=0.3, k=0.5, w=0.35,
        D=[0.0320, 0.0335, 0.0345, 0.0350, 0.0360],
        a_intra=0.125, d_intra=0.05, resource_laws=abio(0.35, 3000.0))
    _register(Preset("fig3d", "ode", "five consumers on one abiotic resource",
                     fig3d, {"t_end": 1e5,
                             "initial": {"c_free": [1.0] * 5, "r_free": [100.0]}}))
    fig3e = ModelConfig.build(
        20, 1, a=0.1, d=0.5, k=0.1, w=0.1,
        D=_ramp_mortality(0.001, 0.001, 20, seed=5),
        a_intra=0.125, d_intra=0.1, resource_laws=abio(5.0, 10000.0))
    _register(Preset("fig3e", "ode", "twenty consumers on one abiotic resource",
                     fig3e, {"t_end": 1e5, "initial": _ode_initial(fig3e, 2.0)},
                     notes="mortalities seeded with 5"))
    _register(Preset("fig3f", "ssa", "stochastic counterpart of fig3e", fig3e,
                     {"t_end": 2e4, "seeds": list(range(4)),
                      "initial": _ssa_initial(fig3e, 10)}))

    # ------------------------------------------------------- response surfaces
    _register(Preset("figS2a", "fr_surface", "chasing-only response, no escape",
                     None, {"family": "chasing_only", "a": 0.25, "k": 0.1, "d": 0.0,
                            "orders": [1, 2, 3], "bd": True,
                            "r_grid": [0.01, 1e4, 41], "c_grid": [0.01, 1e4, 41]}))
    _register(Preset("figS2b", "fr_surface", "chasing-only response, strong escape",
                     None, {"family": "chasing_only", "a": 0.25, "k": 0.1, "d": 1.0,
                            "orders": [1, 2, 3], "bd": True,
                            "r_grid": [0.01, 1e4, 41], "c_grid": [0.01, 1e4, 41]},
                     notes="escape rate unstated in the listing; 10*k exercises "
                           "the large-discrepancy regime"))
    _register(Preset("figS2c", "fr_surface", "chasing-only response, slow search",
                     None, {"family": "chasing_only", "a": 0.025, "k": 0.5, "d": 0.0,
                            "orders": [1, 2, 3], "bd": True,
                            "r_grid": [0.01, 1e4, 41], "c_grid": [0.01, 1e4, 41]},
                     notes="escape rate unstated; matched to the no-escape panel"))
    _register(Preset("figS3", "fr_surface", "same-species interference response",
                     None, {"family": "chasing_intra", "a": 0.1, "k": 0.1, "d": 0.0,
                            "a_intra": 0.12, "d_intra": 0.1,
                            "orders": [1, 2, 3], "bd": True,
                            "r_grid": [0.01, 1e3, 41], "c_grid": [0.01, 1e3, 41]},
                     notes="escape rate unstated; phenomenological match needs 0"))
    _register(Preset("figS4", "fr_surface", "cross-species interference response",
                     None, {"family": "chasing_inter", "a": 0.1, "k": 0.1, "d": 0.0,
                            "gamma": 6.0, "c_other": 5.0,
                            "orders": [2, 3], "bd": True,
                            "r_grid": [0.01, 1e3, 41], "c_grid": [0.01, 1e3, 41]},
                     notes="pair rates 0.6/0.1 entering as their ratio; competitor "
                           "abundance fixed at 5"))

    # ---------------------------------------------------------------- fig S5
    _register(Preset("figS5c", "ode", "exclusion, abiotic resource", chasing_small,
                     {"t_end": 1e5, "initial": {"c_free": [1.0, 1.0], "r_free": [1.0]}}))
    s5d = ModelConfig.build(2, 1, a=0.1, d=0.2, k=0.05, w=0.1, D=[0.005, 0.004],
                            resource_laws=bio(0.05, 100.0))
    _register(Preset("figS5d", "ode", "exclusion, biotic resource", s5d,
                     {"t_end": 1e5, "initial": {"c_free": [1.0, 1.0], "r_free": [10.0]}}))

    # ---------------------------------------------------------------- fig S6
    s6a = ModelConfig.build(2, 1, a=0.05, d=0.05, k=0.02, w=0.08,
                            D=[0.001, 0.0009], a_inter=0.3, d_inter=0.01,
                            resource_laws=abio(0.01, 20.0))
    _register(Preset("figS6a", "stability", "unstable interior point, abiotic",
                     s6a, {}))
    s6b = ModelConfig.build(2, 1, a=0.05, d=0.05, k=0.02, w=0.08,
                            D=[0.001, 0.0008], a_inter=0.3, d_inter=0.1,
                            resource_laws=bio(0.02, 5.0))
    _register(Preset("figS6b", "stability", "unstable interior point, biotic",
                     s6b, {}))
    s6c = ModelConfig.build(2, 1, a=0.04, d=0.2, k=0.1, w=0.3,
                            D=[0.00096, 0.0008], a_inter=0.6, d_inter=0.1,
                            resource_laws=abio(0.2, 10.0))
    _register(Preset("figS6c", "analytic", "closed forms vs refined point, abiotic",
                     s6c, {}, notes="mortality difference set to 0.2 (bar chart "
                                    "leaves it free)"))
    s6d = ModelConfig.build(2, 1, a=0.05, d=0.2, k=0.1, w=0.2,
                            D=[0.006, 0.005], a_inter=0.6, d_inter=0.02,
                            resource_laws=bio(0.02, 10.0))
    _register(Preset("figS6d", "analytic", "closed forms vs refined point, biotic",
                     s6d, {}, notes="mortality difference set to 0.2"))

    # ---------------------------------------------------------------- fig S7
    s7c = ModelConfig.build(2, 1, a=0.05, d=0.1, k=0.1, w=0.05,
                            D=[0.0009, 0.0007], a_inter=0.02, d_inter=0.02,
                            resource_laws=abio(0.2, 10.0))
    _register(Preset("figS7c", "ode", "cross interference, abiotic: extinction",
                     s7c, {"t_end": 1e5, "initial": _ode_initial(s7c)}))
    s7d = s7c.with_updates(resource_laws=(bio(0.05, 10.0),))
    _register(Preset("figS7d", "ode", "cross interference, biotic", s7d,
                     {"t_end": 1e5, "initial": _ode_initial(s7d)}))
    s7e = ModelConfig.build(2, 1, a=0.05, d=0.1, k=0.1, w=0.05,
                            D=[0.0009, 0.0007], a_inter=0.06, d_inter=0.02,
                            resource_laws=bio(0.05, 60.0))
    _register(Preset("figS7e", "ode", "limit-cycle coexistence", s7e,
                     {"t_end": 1e5, "initial": _ode_initial(s7e)}))
    s7f = s7e.with_updates(a_inter=np.array([[0.0, 0.02], [0.02, 0.0]]))
    _register(Preset("figS7f", "ode", "quasi-periodic coexistence", s7f,
                     {"t_end": 1e5, "initial": _ode_initial(s7f)}))
    _register(Preset("figS7i", "lyapunov", "spectrum of the quasi-periodic regime",
                     s7f, {"t_total": 2e4, "renorm_dt": 2.0, "t_transient": 2e4}))
    _register(Preset("figS7j", "poincare", "section of the quasi-periodic regime",
                     s7f, {"t_end": 6e4, "component": "C1", "direction": 1}))
    s7k = inter_2c
    _register(Preset("figS7k", "scan", "deterministic outcome map over the "
                     "cross-pair rates", s7k,
                     {"axes": [("a_inter", list(np.round(np.geomspace(0.005, 0.08, 7), 4))),
                               ("d_inter", list(np.round(np.geomspace(0.005, 0.08, 7), 4)))],
                      "t_end": 2e4}))
    _register(Preset("figS7l", "scan", "stochastic counterpart of figS7k", s7k,
                     {"axes": [("a_inter", list(np.round(np.geomspace(0.005, 0.08, 7), 4))),
                               ("d_inter", list(np.round(np.geomspace(0.005, 0.08, 7), 4)))],
                      "t_end": 2e4, "engine": "ssa", "seeds": [0, 1, 2]}))

    # ---------------------------------------------------------------- fig S8
    s8a = ModelConfig.build(2, 1, a=0.5, d=0.5, k=0.4, w=0.5, D=[0.024, 0.02],
                            a_intra=0.625, d_intra=0.5, resource_laws=abio(0.1, 10.0))
    _register(Preset("figS8a", "stability", "stable interior point, abiotic", s8a, {}))
    s8b = ModelConfig.build(2, 1, a=0.5, d=0.5, k=0.4, w=0.5, D=[0.021, 0.02],
                            a_intra=0.625, d_intra=0.5, resource_laws=bio(0.3, 10.0))
    _register(Preset("figS8b", "stability", "stable interior point, biotic", s8b, {}))
    s8c = ModelConfig.build(2, 1, a=0.1, d=0.5, k=0.12, w=0.3, D=[0.024, 0.02],
                            a_intra=0.12, d_intra=0.05, resource_laws=abio(0.8, 100.0))
    _register(Preset("figS8c", "analytic", "closed forms, abiotic", s8c, {},
                     notes="mortality difference set to 0.2"))
    s8d = ModelConfig.build(2, 1, a=0.05, d=0.8, k=0.12, w=0.2, D=[0.0096, 0.008],
                            a_intra=0.06, d_intra=0.01, resource_laws=bio(0.1, 100.0))
    _register(Preset("figS8d", "analytic", "closed forms, biotic", s8d, {},
                     notes="mortality difference set to 0.2"))
    s8e = ModelConfig.build(2, 1, a=0.5, d=0.8, k=0.2, w=0.2, D=[0.0088, 0.008],
                            a_intra=0.6, d_intra=0.2, resource_laws=abio(0.8, 60.0))
    _register(Preset("figS8e", "scan", "coexistence bound check, abiotic", s8e,
                     {"axes": [("delta", list(np.round(np.linspace(0.1, 3.0, 8), 3)))],
                      "t_end": 2e4, "delta_sup_overlay": True},
                     notes="pair rates 0.6/0.2 picked inside the displayed surface"))
    s8f = ModelConfig.build(2, 1, a=0.5, d=0.8, k=0.1, w=0.2, D=[0.0088, 0.008],
                            a_intra=0.625, d_intra=0.2, resource_laws=bio(0.2, 100.0))
    _register(Preset("figS8f", "scan", "coexistence bound check, biotic", s8f,
                     {"axes": [("delta", list(np.round(np.linspace(0.1, 3.0, 8), 3)))],
                      "t_end": 2e4, "delta_sup_overlay": True},
                     notes="pair rates 0.625/0.2 picked inside the displayed surface"))

    # ---------------------------------------------------------------- fig S9
    _register(Preset("figS9c", "ode", "steady coexistence below threshold",
                     hopf_family, {"t_end": 4e4, "initial": _ode_initial(hopf_family)}))
    _register(Preset("figS9d", "ode", "oscillating coexistence above threshold",
                     hopf_family.with_updates(d_intra=np.array([0.1, 0.1])),
                     {"t_end": 4e4, "initial": _ode_initial(hopf_family)}))
    _register(Preset("figS9e", "hopf", "oscillation threshold scan", hopf_family,
                     {"range": [0.01, 0.2], "resolution": 12}))
    s9g = ModelConfig.build(2, 1, a=0.06, d=2.0, k=0.22, w=0.32, D=[0.055, 0.057],
                            a_intra=0.075, d_intra=2.0, resource_laws=bio(0.13, 500.0))
    _register(Preset("figS9g", "ssa", "stochastic coexistence, second family",
                     s9g, {"t_end": 1e5, "seeds": list(range(8)),
                           "initial": {"c_free": [40, 40], "r_free": [150]}}))

    # ---------------------------------------------------------------- fig S10
    s10f = ModelConfig.build(2, 1, a=0.1, d=0.2, k=0.2, w=0.1, D=[0.0009, 0.0085],
                             a_intra=0.12, d_intra=0.3, a_inter=0.05, d_inter=0.2,
                             resource_laws=abio(0.9, 100.0))
    _register(Preset("figS10f", "ode", "mixed interference, steady coexistence",
                     s10f, {"t_end": 4e4, "initial": _ode_initial(s10f)},
                     notes="mortalities as printed (first species favored)"))
    s10gh = ModelConfig.build(2, 1, a=0.1, d=0.2, k=0.2, w=0.05, D=[0.0009, 0.0085],
                              a_intra=0.14, d_intra=0.3, a_inter=0.05, d_inter=0.2,
                              resource_laws=bio(0.1, 100.0))
    _register(Preset("figS10g", "ode", "mixed interference, biotic, moderate "
                     "cross separation", s10gh,
                     {"t_end": 4e4, "initial": _ode_initial(s10gh)}))
    _register(Preset("figS10h", "ode", "mixed interference, faster cross separation",
                     s10gh.with_updates(d_inter=np.array([[0.0, 0.4], [0.4, 0.0]])),
                     {"t_end": 4e4, "initial": _ode_initial(s10gh)}))
    _register(Preset("figS10c", "scan", "mixed-interference coexistence region",
                     s10f.with_updates(D=np.array([0.0012, 0.001])),
                     {"axes": [("delta", list(np.round(np.linspace(0.0, 1.0, 6), 3))),
                               ("d_inter", list(np.round(np.geomspace(0.05, 0.8, 6), 4)))],
                      "t_end": 2e4},
                     notes="baseline mortality 0.001; sweep follows the displayed axes"))

    # ---------------------------------------------------------------- fig S11
    s11a = ModelConfig.build(2, 1, a=0.05, d=0.5, k=0.1, w=0.2, D=[0.0088, 0.008],
                             a_intra=0.06, d_intra=0.002, a_inter=0.2, d_inter=0.2,
                             resource_laws=abio(0.8, 100.0))
    _register(Preset("figS11a", "analytic", "mixed closed forms, abiotic", s11a,
                     {"t_end": 1e5, "initial": _ode_initial(s11a, 0.5)},
                     notes="mortality difference set to 0.1"))
    s11b = ModelConfig.build(2, 1, a=0.05, d=0.5, k=0.05, w=0.2, D=[0.0066, 0.006],
                             a_intra=0.06, d_intra=0.002, a_inter=0.2, d_inter=0.2,
                             resource_laws=bio(0.2, 100.0))
    _register(Preset("figS11b", "analytic", "mixed closed forms, biotic", s11b,
                     {"t_end": 1e5, "initial": _ode_initial(s11b, 0.5)},
                     notes="mortality difference set to 0.1"))

    # ---------------------------------------------------------------- fig S12
    s12a = ModelConfig.build(2, 1, a=0.1, d=0.3, k=0.1, w=0.15, D=[0.0125, 0.012],
                             a_intra=0.11, d_intra=0.5, a_inter=0.01, d_inter=0.8,
                             resource_laws=abio(0.8, 300.0))
    _register(Preset("figS12a", "ssa", "mixed interference robust to noise, abiotic",
                     s12a, {"t_end": 1e5, "seeds": list(range(8)),
                            "initial": _ssa_initial(s12a, 20)}))
    s12b = ModelConfig.build(2, 1, a=0.1, d=0.3, k=0.1, w=0.2, D=[0.013, 0.0125],
                             a_intra=0.11, d_intra=0.5, a_inter=0.05, d_inter=0.4,
                             resource_laws=bio(0.2, 500.0))
    _register(Preset("figS12b", "ssa", "mixed interference robust to noise, biotic",
                     s12b, {"t_end": 1e5, "seeds": list(range(8)),
                            "initial": _ssa_initial(s12b, 20)}))

    # --------------------------------------------------------------- fig S14+
    s14c = ModelConfig.build(
        5, 1, a=0.04, d=0.6, k=0.15, w=0.45,
        D=[0.0619, 0.0595, 0.057, 0.0584, 0.0603],
        a_intra=0.056, d_intra=0.04, resource_laws=abio(0.9, 400.0))
    _register(Preset("figS14c", "ode", "five consumers, one abiotic resource",
                     s14c, {"t_end": 1e5,
                            "initial": {"c_free": [1.0] * 5, "r_free": [200.0]}}))
    _register(Preset("figS14d", "ode", "five consumers, three biotic resources "
                     "(same family as fig3a)", fig3a,
                     {"t_end": 1e5, "initial": {"c_free": [1.0] * 5,
                                                "r_free": [300.0, 500.0, 400.0]}}))

    s15_base = dict(a=0.1, d=0.5, k=0.1, w=0.1)
    D20 = _ramp_mortality(0.001, 0.001, 20, seed=7)
    s15a = ModelConfig.build(20, 1, **s15_base, D=D20,
                             resource_laws=abio(5.0, 10000.0))
    _register(Preset("figS15a", "ode", "twenty consumers, chasing only: one survivor",
                     s15a, {"t_end": 1e5, "initial": _ode_initial(s15a, 2.0)},
                     notes="mortalities seeded with 7"))
    s15b = ModelConfig.build(20, 1, **s15_base, D=D20, a_intra=0.125, d_intra=0.1,
                             resource_laws=abio(5.0, 10000.0))
    _register(Preset("figS15b", "ode", "twenty consumers with interference: all "
                     "survive", s15b, {"t_end": 1e5, "initial": _ode_initial(s15b, 2.0)}))
    _register(Preset("figS15c", "ssa", "stochastic twin of figS15a", s15a,
                     {"t_end": 2e4, "seeds": [0, 1],
                      "initial": _ssa_initial(s15a, 10)}))
    _register(Preset("figS15d", "ssa", "stochastic twin of figS15b", s15b,
                     {"t_end": 2e4, "seeds": [0, 1],
                      "initial": _ssa_initial(s15b, 10)}))

    D16 = _ramp_mortality(0.004, 0.002, 20, seed=11)
    s16a = ModelConfig.build(20, 1, a=0.1, d=0.3, k=0.1, w=0.1, D=D16,
                             resource_laws=bio(0.95, 300.0))
    _register(Preset("figS16a", "ode", "twenty consumers, biotic, chasing only",
                     s16a, {"t_end": 1e5, "initial": _ode_initial(s16a)}))
    s16b = s16a.with_updates(a_intra=np.full(20, 0.125), d_intra=np.full(20, 0.3),
                             scenario="chasing_intra")
    _register(Preset("figS16b", "ode", "twenty consumers, biotic, with interference",
                     s16b, {"t_end": 1e5, "initial": _ode_initial(s16b)}))

    s17a = ModelConfig.build(100, 1, a=0.1, d=0.3, k=0.1, w=0.3,
                             D=_ramp_mortality(0.002, 0.002, 100, seed=13),
                             a_intra=0.125, d_intra=0.3,
                             resource_laws=abio(50.0, 10000.0))
    _register(Preset("figS17a", "ode", "hundred consumers, abiotic", s17a,
                     {"t_end": 5e4, "initial": _ode_initial(s17a)}))
    s17b = ModelConfig.build(100, 1, a=0.1, d=0.5, k=0.1, w=0.1,
                             D=_ramp_mortality(0.002, 0.005, 100, seed=17),
                             a_intra=0.125, d_intra=0.1,
                             resource_laws=bio(0.95, 1000.0))
    _register(Preset("figS17b", "ode", "hundred consumers, biotic", s17b,
                     {"t_end": 5e4, "initial": _ode_initial(s17b)}))

    s18a = ModelConfig.build(
        18, 3, a=0.1, d=0.5, k=0.2, w=0.2,
        D=_ramp_mortality(0.028, 0.008, 18, seed=19),
        a_intra=0.125, d_intra=0.1,
        resource_laws=(abio(30.0, 8000.0), abio(40.0, 3000.0), abio(25.0, 5000.0)))
    _register(Preset("figS18a", "ode", "eighteen consumers, three abiotic resources",
                     s18a, {"t_end": 5e4, "initial": _ode_initial(s18a, 5.0)}))
    _register(Preset("figS18b", "ode", "eighteen consumers, three biotic resources",
                     fig3b, {"t_end": 1e5, "initial": _ode_initial(fig3b, 5.0)}))

    s19a = ModelConfig.build(
        98, 3, a=0.1, d=0.5, k=0.2, w=0.3,
        D=_ramp_mortality(0.01, 0.005, 98, seed=23),
        a_intra=0.125, d_intra=0.3,
        resource_laws=(abio(30.0, 8000.0), abio(40.0, 3000.0), abio(25.0, 5000.0)))
    _register(Preset("figS19a", "ode", "ninety-eight consumers, abiotic", s19a,
                     {"t_end": 5e4, "initial": _ode_initial(s19a, 2.0)}))
    s19b = ModelConfig.build(
        98, 3, a=0.2, d=0.4, k=0.3, w=0.3,
        D=_ramp_mortality(0.008, 0.01, 98, seed=29),
        a_intra=0.25, d_intra=0.2,
        resource_laws=(bio(0.85, 1800.0), bio(0.95, 1400.0), bio(0.9, 1600.0)))
    _register(Preset("figS19b", "ode", "ninety-eight consumers, biotic", s19b,
                     {"t_end": 5e4, "initial": _ode_initial(s19b, 2.0)}))

    s22 = ModelConfig.build(2, 1, a=0.1, d=0.5, k=0.1, w=0.1, D=[0.0028, 0.0014],
                            a_intra=0.125, d_intra=0.1, resource_laws=abio(5.0, 100.0))
    _register(Preset("figS22", "scan", "coexistence region, second abiotic family",
                     s22, {"axes": [("delta", list(np.round(np.linspace(0.0, 3.0, 7), 3))),
                                    ("d_intra", list(np.round(np.geomspace(0.02, 0.5, 7), 4)))],
                           "t_end": 2e4}))

    s25a = ModelConfig.build(
        20, 1, a=0.2, d=0.3, k=0.15, w=0.5,
        D=0.03 + 5e-4 * np.arange(1, 21),
        a_intra=0.25, d_intra=0.05, resource_laws=abio(0.35, 3000.0))
    _register(Preset("figS25a", "ode", "graded-mortality ladder, abiotic", s25a,
                     {"t_end": 5e4, "initial": _ode_initial(s25a)}))
    s25b = ModelConfig.build(
        20, 1, a=0.008, d=0.6, k=0.15, w=0.45,
        D=0.047 + 2.5e-4 * np.arange(1, 21),
        a_intra=0.0112, d_intra=0.04, resource_laws=bio(0.8, 400.0))
    _register(Preset("figS25b", "ode", "graded-mortality ladder, biotic", s25b,
                     {"t_end": 5e4, "initial": _ode_initial(s25b)}))


_build_all()
