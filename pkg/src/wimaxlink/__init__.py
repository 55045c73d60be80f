"""Link-level simulator for a 512-subcarrier OFDMA downlink.

Monte-Carlo simulation of the fixed broadband-wireless downlink
physical layer: tail-biting convolutional coding with puncturing, block
interleaving, Gray-mapped QAM, 512-point OFDM with a 1/8 cyclic
prefix, and three antenna modes — single antenna, 2x2 Alamouti
space-time coding, and 2x2 spatial multiplexing with MMSE detection —
over block-fading frequency-selective Rayleigh channels.  On top of
the per-mode BER/throughput curves it evaluates adaptive modulation
and coding (six burst profiles from QPSK 1/2 to 64-QAM 3/4) and the
diversity/multiplexing switching point.

The package splits along the signal path: :mod:`~wimaxlink.params`
(numerology and profile registry), :mod:`~wimaxlink.bitsource`,
:mod:`~wimaxlink.fec`, :mod:`~wimaxlink.mapping`,
:mod:`~wimaxlink.mimo`, :mod:`~wimaxlink.ofdm`,
:mod:`~wimaxlink.channel`, :mod:`~wimaxlink.metrics_amc`, and
:mod:`~wimaxlink.harness` (sweep engine and I/O) with a thin
:mod:`~wimaxlink.cli` front end.
"""

from .channel import ChannelConfig, ChannelRealization, exponential_pdp
from .harness import (
    SimConfig,
    analyze_sweep,
    emit_csv,
    emit_plots,
    load_config,
    read_csv,
    run_point,
    run_sweep,
)
from .metrics_amc import (
    AmcEnvelope,
    LinkMetrics,
    SweepResult,
    amc_envelope,
    amc_select,
    ams_switching_point,
    link_throughput,
    normalized_throughput,
)
from .params import (
    BURST_PROFILES,
    MIMO_MODES,
    BurstProfile,
    MimoMode,
    OfdmaParams,
    burst_profile,
    info_bits_per_ofdm_symbol,
    mimo_mode,
)

__version__ = "0.1.0"

__all__ = [
    "AmcEnvelope",
    "BURST_PROFILES",
    "BurstProfile",
    "ChannelConfig",
    "ChannelRealization",
    "LinkMetrics",
    "MIMO_MODES",
    "MimoMode",
    "OfdmaParams",
    "SimConfig",
    "SweepResult",
    "amc_envelope",
    "amc_select",
    "ams_switching_point",
    "analyze_sweep",
    "burst_profile",
    "emit_csv",
    "emit_plots",
    "exponential_pdp",
    "info_bits_per_ofdm_symbol",
    "link_throughput",
    "load_config",
    "mimo_mode",
    "normalized_throughput",
    "read_csv",
    "run_point",
    "run_sweep",
    "__version__",
]
