"""Shipped experiment presets, one per reproduced figure family.

Caption-level parameters (antennas, eavesdropper counts, SINR caps, error
radii) are fixed; realization counts default to desk scale and stay
configurable. fig3/fig5 expand into one run per eavesdropper count so every
run's CSV keeps the single documented schema.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .designs import (SCHEME_CONSTRUCTIVE, SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
                      SCHEME_CONVENTIONAL, SCHEME_ROBUST_CONSTRUCTIVE,
                      SCHEME_ROBUST_CONVENTIONAL)
from .experiments import ExperimentConfig

PERFECT_CSI_SCHEMES = (SCHEME_CONVENTIONAL, SCHEME_CONSTRUCTIVE,
                       SCHEME_CONSTRUCTIVE_DESTRUCTIVE)
ROBUST_PROBE_SCHEMES = (SCHEME_ROBUST_CONVENTIONAL, SCHEME_CONVENTIONAL,
                        SCHEME_ROBUST_CONSTRUCTIVE,
                        SCHEME_CONSTRUCTIVE_DESTRUCTIVE)

# caption-level scenario parameters for the four figure families
CAPTION_PARAMS = {
    "fig3": {"n_t": 8, "k_eves": (4, 6), "gamma_e_db": 5.0},
    "fig4": {"n_t": 6, "k_eves": 4, "gamma_d_db": 20.0},
    "fig5": {"n_t": 6, "k_eves": (2, 5), "gamma_e_db": 5.0},
    "fig6": {"n_t": 6, "k_eves": 3, "gamma_e_db": 5.0,
             "eps_d": 0.1, "eps_e": 0.3},
}

GAMMA_D_GRID = (10.0, 15.0, 20.0, 25.0)
GAMMA_E_GRID = (0.0, 2.5, 5.0, 7.5, 10.0)
SER_GAMMA_D_GRID = (0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0)


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str  # power | ser | robust
    runs: tuple[tuple[str, ExperimentConfig], ...]


def make_preset(name: str, realizations: int | None = None,
                slots: int | None = None, seed: int = 0) -> Preset:
    """Instantiate a preset, optionally overriding sampling sizes."""
    if name == "fig3":
        base = ExperimentConfig(
            n_t=8, k_eves=4, gamma_d_db=GAMMA_D_GRID, gamma_e_db=(5.0,),
            schemes=PERFECT_CSI_SCHEMES, realizations=realizations or 200,
            seed=seed)
        runs = tuple((f"k{k}", replace(base, k_eves=k))
                     for k in CAPTION_PARAMS["fig3"]["k_eves"])
        return Preset(name, "power", runs)
    if name == "fig4":
        cfg = ExperimentConfig(
            n_t=6, k_eves=4, gamma_d_db=(20.0,), gamma_e_db=GAMMA_E_GRID,
            schemes=PERFECT_CSI_SCHEMES, realizations=realizations or 200,
            seed=seed)
        return Preset(name, "power", (("k4", cfg),))
    if name == "fig5":
        base = ExperimentConfig(
            n_t=6, k_eves=2, gamma_d_db=SER_GAMMA_D_GRID, gamma_e_db=(5.0,),
            schemes=PERFECT_CSI_SCHEMES, realizations=realizations or 200,
            slots=slots or 1000, seed=seed)
        runs = tuple((f"k{k}", replace(base, k_eves=k))
                     for k in CAPTION_PARAMS["fig5"]["k_eves"])
        return Preset(name, "ser", runs)
    if name == "fig6":
        cfg = ExperimentConfig(
            n_t=6, k_eves=3, gamma_d_db=GAMMA_D_GRID, gamma_e_db=(5.0,),
            eps_d=0.1, eps_e=0.3, schemes=ROBUST_PROBE_SCHEMES,
            realizations=realizations or 100, seed=seed)
        return Preset(name, "robust", (("k3", cfg),))
    raise ValueError(f"unknown preset {name!r}")


PRESET_NAMES = ("fig3", "fig4", "fig5", "fig6")
