"""OSNR, regime thresholds and capacity of frequency-comb-driven WDM links."""

from .analysis import (
    FORMATS,
    CapacityMode,
    CapacityResult,
    ModulationFormat,
    TransitionPoint,
    ber_qam,
    capacity_from_snr,
    capacity_vs_distance,
    channel_osnr,
    osnr_from_snr,
    osnr_vs_distance,
    required_osnr,
    snr_from_osnr,
    sweep_line_power,
    sweep_ocnr,
    total_capacity,
    transition_line_power,
    transition_ocnr,
)
from .comb import (
    INFINITE,
    CombLine,
    CombSource,
    SolitonCombParams,
    noise_density,
    read_comb_csv,
    synthesize_flat_comb,
    synthesize_soliton_comb,
    write_comb_csv,
)
from .estimator import CombLinkOSNR
from .link import (
    AmplifierSpec,
    ChannelState,
    EqualizationScheme,
    LinkConfig,
    PlanEntry,
    apply_amplifier,
    apply_attenuation,
    comb_amp_plan,
    load_config,
    osnr_closed_form,
    osnr_of,
    propagate,
)
from .quantities import db_from_linear, dbm_from_watt, linear_from_db, photon_energy, watt_from_dbm

__version__ = "0.1.0"

__all__ = [
    "AmplifierSpec",
    "CapacityMode",
    "CapacityResult",
    "ChannelState",
    "CombLine",
    "CombLinkOSNR",
    "CombSource",
    "EqualizationScheme",
    "FORMATS",
    "INFINITE",
    "LinkConfig",
    "ModulationFormat",
    "PlanEntry",
    "SolitonCombParams",
    "TransitionPoint",
    "apply_amplifier",
    "apply_attenuation",
    "ber_qam",
    "capacity_from_snr",
    "capacity_vs_distance",
    "channel_osnr",
    "comb_amp_plan",
    "db_from_linear",
    "dbm_from_watt",
    "linear_from_db",
    "load_config",
    "noise_density",
    "osnr_closed_form",
    "osnr_from_snr",
    "osnr_of",
    "osnr_vs_distance",
    "photon_energy",
    "propagate",
    "read_comb_csv",
    "required_osnr",
    "snr_from_osnr",
    "sweep_line_power",
    "sweep_ocnr",
    "synthesize_flat_comb",
    "synthesize_soliton_comb",
    "total_capacity",
    "transition_line_power",
    "transition_ocnr",
    "watt_from_dbm",
    "write_comb_csv",
]
