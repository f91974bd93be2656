"""Derived figures of merit: OSNR/SNR conversion, regime transition points,
format OSNR requirements and Shannon capacity, plus the sweep tables behind
each figure reproduction.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .comb import INFINITE
from .link import EqualizationScheme, PlanEntry, comb_amp_plan, osnr_closed_form
from .quantities import db_from_linear, dbm_from_watt, linear_from_db

__all__ = [
    "ModulationFormat",
    "TransitionPoint",
    "CapacityMode",
    "CapacityResult",
    "NonMonotoneError",
    "FORMATS",
    "snr_from_osnr",
    "osnr_from_snr",
    "q_function",
    "ber_qam",
    "required_osnr",
    "line_osnr",
    "transition_line_power",
    "transition_ocnr",
    "channel_osnr",
    "total_capacity",
    "capacity_from_snr",
    "sweep_line_power",
    "sweep_ocnr",
    "osnr_vs_distance",
    "capacity_vs_distance",
]

# solver tolerances, in dB
TRANSITION_XTOL_DB = 1e-3
REQUIRED_SNR_XTOL_DB = 1e-4

# transitions are searched for within this window (dBm / dB)
_POWER_SEARCH_DBM = (-150.0, 60.0)
_OCNR_SEARCH_DB = (-60.0, 150.0)
_MONOTONE_SAMPLES = 400


class NonMonotoneError(ValueError):
    """OSNR is not monotone in the swept input, so no 1-dB point is defined."""


def _check_qam_order(m):
    k = round(math.log(m, 4)) if m > 1 else 0
    if k < 1 or 4**k != m:
        raise ValueError(f"qam_order must be a power of 4 (4, 16, 64, ...), got {m!r}")


@dataclass(frozen=True)
class ModulationFormat:
    """Square QAM with FEC; ``net_rate`` is the post-FEC bit rate in bit/s."""

    qam_order: int
    symbol_rate: float
    fec_overhead: float = 0.11
    ber_threshold: float = 1.2e-2
    polarizations: int = 2

    def __post_init__(self):
        _check_qam_order(self.qam_order)
        if not 0 < self.ber_threshold < 0.5:
            raise ValueError(f"ber_threshold must lie in (0, 0.5), got {self.ber_threshold!r}")
        if self.polarizations not in (1, 2):
            raise ValueError("polarizations must be 1 or 2")
        if not self.symbol_rate > 0 or self.fec_overhead < 0:
            raise ValueError("symbol_rate must be positive and fec_overhead non-negative")

    @property
    def bits_per_symbol(self):
        return int(round(math.log2(self.qam_order)))

    @property
    def net_rate(self):
        return self.symbol_rate * self.bits_per_symbol * self.polarizations / (1.0 + self.fec_overhead)


FORMATS = {
    "16qam-56gbd": ModulationFormat(16, 56e9),
    "64qam-56gbd": ModulationFormat(64, 56e9),
}


@dataclass(frozen=True)
class TransitionPoint:
    limit_osnr: float
    threshold: float
    osnr_at_threshold: float

    @property
    def shortfall_db(self):
        """How far below the limit the OSNR sits at the threshold (about 1 dB)."""
        return db_from_linear(self.limit_osnr) - db_from_linear(self.osnr_at_threshold)


class CapacityMode(enum.Enum):
    PER_CHANNEL_OPTIMAL = "optimal"
    MIN_SNR_UNIFORM = "min-snr"


@dataclass(frozen=True)
class CapacityResult:
    per_channel: tuple
    total: float
    mode: CapacityMode


def snr_from_osnr(osnr, b_sig, b_ref, polarizations=2):
    """SNR in the signal bandwidth from OSNR in the reference bandwidth."""
    return 2.0 * b_ref / (polarizations * b_sig) * osnr


def osnr_from_snr(snr, b_sig, b_ref, polarizations=2):
    return polarizations * b_sig / (2.0 * b_ref) * snr


def q_function(x):
    """Gaussian tail probability ``P(N(0,1) > x)``."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def ber_qam(snr_per_symbol, qam_order):
    """Gray-coded square M-QAM bit error ratio on an AWGN channel.

    Nearest-neighbour approximation
    ``4/log2(M) * (1 - 1/sqrt(M)) * Q(sqrt(3 snr / (M - 1)))``.
    """
    _check_qam_order(qam_order)
    m = qam_order
    if snr_per_symbol < 0:
        raise ValueError("snr must be non-negative")
    coeff = 4.0 / math.log2(m) * (1.0 - 1.0 / math.sqrt(m))
    return coeff * q_function(math.sqrt(3.0 * snr_per_symbol / (m - 1)))


def required_osnr(fmt, b_ref=12.5e9):
    """Minimum OSNR (linear, in ``b_ref``) to reach ``fmt.ber_threshold``."""

    def excess(snr_db):
        return ber_qam(linear_from_db(snr_db), fmt.qam_order) - fmt.ber_threshold

    lo, hi = -20.0, 60.0
    if excess(lo) * excess(hi) > 0:
        raise ValueError(f"BER threshold {fmt.ber_threshold} is not bracketed for {fmt.qam_order}-QAM")
    snr_db = bisect(excess, lo, hi, xtol=REQUIRED_SNR_XTOL_DB)
    return osnr_from_snr(linear_from_db(snr_db), fmt.symbol_rate, b_ref, fmt.polarizations)


def line_osnr(p_line, ocnr, config):
    """OSNR of a line of a flat comb whose gain is sized to launch at the target power."""
    comb_gain = config.launch_power / (np.asarray(p_line, dtype=float) * config.mod_transmission * config.post_amp.gain)
    return osnr_closed_form(p_line, ocnr, config, PlanEntry(comb_gain))


def _check_monotone(f, lo, hi):
    xs = np.linspace(lo, hi, _MONOTONE_SAMPLES)
    ys = np.array([f(x) for x in xs])
    if np.any(np.diff(ys) < -1e-9 * np.abs(ys[:-1])):
        raise NonMonotoneError("OSNR is not monotone over the search window; check the configuration")


def _one_db_point(f, limit_db, lo, hi):
    """Bisect ``f(x) = limit_db - 1`` for a non-decreasing ``f`` (all in dB)."""
    _check_monotone(f, lo, hi)

    def excess(x):
        return f(x) - (limit_db - 1.0)

    if excess(lo) > 0 or excess(hi) < 0:
        raise NonMonotoneError("1-dB point not bracketed by the search window")
    return bisect(excess, lo, hi, xtol=TRANSITION_XTOL_DB)


def transition_line_power(config, span_count=None):
    """Line power at which OSNR is 1 dB below its high-power limit.

    Noiseless comb lines (infinite OCNR). The limit is reached exactly once the
    comb amplifier gain drops to unity, after which only link amplifiers add
    noise. ``threshold`` is in W.
    """
    if span_count is not None:
        config = config.with_spans(span_count)
    # comb amplifier gain falls to 1 here; above it OSNR is flat
    p_unity = config.launch_power / (config.mod_transmission * config.post_amp.gain)
    limit = line_osnr(p_unity, INFINITE, config)

    def osnr_db(p_dbm):
        return db_from_linear(line_osnr(linear_from_db(p_dbm) * 1e-3, INFINITE, config))

    hi = float(dbm_from_watt(p_unity))
    p_dbm = _one_db_point(osnr_db, db_from_linear(limit), _POWER_SEARCH_DBM[0], hi)
    p = linear_from_db(p_dbm) * 1e-3
    return TransitionPoint(float(limit), p, float(line_osnr(p, INFINITE, config)))


def transition_ocnr(config, span_count=None, p_line=None):
    """Comb OCNR at which OSNR is 1 dB below its noiseless-source limit.

    ``p_line`` (W) defaults to the line-power transition point for the same
    span count. ``threshold`` is a linear OCNR.
    """
    if span_count is not None:
        config = config.with_spans(span_count)
    if p_line is None:
        p_line = transition_line_power(config).threshold
    if not p_line > 0:
        raise ValueError("p_line must be positive")
    limit = line_osnr(p_line, INFINITE, config)

    def osnr_db(ocnr_db):
        return db_from_linear(line_osnr(p_line, linear_from_db(ocnr_db), config))

    ocnr_db = _one_db_point(osnr_db, db_from_linear(limit), *_OCNR_SEARCH_DB)
    ocnr = linear_from_db(ocnr_db)
    return TransitionPoint(float(limit), ocnr, float(line_osnr(p_line, ocnr, config)))


def channel_osnr(comb, config, scheme):
    """Per-line receiver OSNR (linear array) under an equalization scheme."""
    plan = comb_amp_plan(comb, config, scheme)
    gains = np.array([e.comb_gain for e in plan])
    atten = np.array([e.mod_attenuation for e in plan])
    return osnr_closed_form(comb.powers, comb.ocnrs, config, PlanEntry(gains, atten))


def total_capacity(comb, config, scheme, mode, pol_factor=None):
    """Shannon capacity of the comb-fed link in bit/s.

    SNR per channel uses the line spacing as the signal bandwidth and dual
    polarization. ``pol_factor`` (default ``config.capacity_pol_factor``)
    multiplies the result; 1 gives the plain per-line sum.
    """
    if comb.spacing is None:
        raise ValueError("capacity needs a comb spacing")
    if pol_factor is None:
        pol_factor = config.capacity_pol_factor
    snr = snr_from_osnr(np.atleast_1d(channel_osnr(comb, config, scheme)), comb.spacing, config.b_ref, 2)
    return capacity_from_snr(snr, comb.spacing, mode, pol_factor)


def capacity_from_snr(snr, spacing, mode, pol_factor=1):
    """Capacity of channels with linear SNRs ``snr`` on a grid of ``spacing`` Hz.

    PER_CHANNEL_OPTIMAL sums ``spacing * log2(1 + snr)`` over channels;
    MIN_SNR_UNIFORM gives every channel the rate of the worst one.
    """
    mode = CapacityMode(mode)
    snr = np.atleast_1d(np.asarray(snr, dtype=float))
    if mode is CapacityMode.PER_CHANNEL_OPTIMAL:
        per_channel = pol_factor * spacing * np.log2(1.0 + snr)
        total = float(per_channel.sum())
    else:
        rate = pol_factor * spacing * np.log2(1.0 + snr.min())
        per_channel = np.full(len(snr), rate)
        total = float(len(snr) * rate)
    return CapacityResult(tuple(float(c) for c in per_channel), total, mode)


def _db(x):
    return math.inf if math.isinf(x) else float(db_from_linear(x))


def sweep_line_power(config, span_counts, p_grid_dbm, ocnr=INFINITE):
    """OSNR versus comb line power for each span count.

    Returns one dict per (span count, grid power) with keys
    ``p_line_dbm, spans, osnr_db``.
    """
    rows = []
    for m in span_counts:
        cfg = config.with_spans(m)
        osnr = np.atleast_1d(line_osnr(linear_from_db(np.asarray(p_grid_dbm, dtype=float)) * 1e-3, ocnr, cfg))
        rows.extend({"p_line_dbm": float(p), "spans": m, "osnr_db": _db(o)} for p, o in zip(p_grid_dbm, osnr))
    return rows


def sweep_ocnr(config, span_counts, ocnr_grid_db, p_line_by_span=None):
    """OSNR versus comb OCNR with the line power at each span count's transition.

    ``p_line_by_span`` maps span count -> line power (W) to override the
    transition power.
    """
    rows = []
    for m in span_counts:
        cfg = config.with_spans(m)
        if p_line_by_span and m in p_line_by_span:
            p = p_line_by_span[m]
        else:
            p = transition_line_power(cfg).threshold
        osnr = np.atleast_1d(line_osnr(p, linear_from_db(np.asarray(ocnr_grid_db, dtype=float)), cfg))
        rows.extend(
            {"ocnr_db": float(o_db), "spans": m, "p_line_dbm": float(dbm_from_watt(p)), "osnr_db": _db(o)}
            for o_db, o in zip(ocnr_grid_db, osnr)
        )
    return rows


def osnr_vs_distance(comb, config, scheme, span_counts):
    """Per-line OSNR map over distance: one row per (span count, line)."""
    scheme = EqualizationScheme(scheme)
    rows = []
    for m in span_counts:
        cfg = config.with_spans(m)
        osnr = np.atleast_1d(channel_osnr(comb, cfg, scheme))
        rows.extend(
            {
                "index": ln.index,
                "frequency_hz": ln.frequency,
                "spans": m,
                "distance_km": cfg.distance_km,
                "scheme": scheme.value,
                "osnr_db": _db(o),
            }
            for ln, o in zip(comb, osnr)
        )
    return rows


def capacity_vs_distance(comb, config, schemes, modes, span_counts, pol_factor=None):
    """Total capacity for every (span count, scheme, mode) combination."""
    rows = []
    for m in span_counts:
        cfg = config.with_spans(m)
        for scheme in schemes:
            scheme = EqualizationScheme(scheme)
            for mode in modes:
                res = total_capacity(comb, cfg, scheme, mode, pol_factor)
                rows.append(
                    {
                        "spans": m,
                        "distance_km": cfg.distance_km,
                        "scheme": scheme.value,
                        "mode": res.mode.value,
                        "capacity_bps": res.total,
                    }
                )
    return rows

