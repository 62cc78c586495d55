# SPDX-License-Identifier: Apache-2.0
"""Multi-satellite multi-stream beamspace precoding simulator."""

from ._core import (
    CSV_HEADER,
    SCHEMA_VERSION,
    MsmsError,
    ScenarioConfig,
    beam_gain,
    cluster,
    dft_codebook,
    log2det_rate,
    run_experiment,
    simulate,
    upa_steering,
)

__all__ = [
    "CSV_HEADER",
    "SCHEMA_VERSION",
    "MsmsError",
    "ScenarioConfig",
    "beam_gain",
    "cluster",
    "dft_codebook",
    "log2det_rate",
    "run_experiment",
    "simulate",
    "upa_steering",
]
