"""secprec: artificial-noise secure precoding laboratory for MISO downlinks.

Library layout:

* :mod:`secprec.model` domain types, SINR formulas, interference regions;
* :mod:`secprec.channels` seeded channel sampling and bounded CSI errors;
* :mod:`secprec.conic` conic standard form and the certified solver wrapper;
* :mod:`secprec.designs` the five precoder designs plus verification;
* :mod:`secprec.experiments` Monte-Carlo sweeps and CSV emission;
* :mod:`secprec.presets` shipped figure-level experiment presets;
* :mod:`secprec.cli` the ``secprec`` command.
"""

from .channels import ChannelConfig, channels_from_csv, channels_to_csv, perturb, sample_channels
from .designs import (SCHEMES, SolveOutcome, solve_constructive,
                      solve_constructive_destructive, solve_conventional,
                      solve_robust_constructive, solve_robust_conventional,
                      solve_scheme, verify_solution)
from .experiments import (ExperimentConfig, SweepResult, detect_psk,
                          run_power_sweep, run_robust_probe, run_ser)
from .model import (QPSK, ChannelSet, Constellation, Precoder, PrecoderBundle,
                    Targets, Uncertainty, aggregate_precoder,
                    ci_region_contains, destructive_region_contains,
                    instantaneous_power, real_expand, received_point,
                    statistical_sinr_eve, statistical_sinr_ir)

__version__ = "0.1.0"
