"""Per-channel signal and ASE noise propagation through a comb-fed WDM link.

Chain: comb source -> comb amplifier -> WDM modulator -> post-amplifier ->
M fibre spans (M - 1 in-line amplifiers between them) -> receiver
pre-amplifier. All noise powers are copolarized and measured in the
reference bandwidth ``b_ref``; OSNR is referred to the pre-amplifier output.

Two independent routes give the receiver OSNR: :func:`propagate` walks the
chain one stage at a time, :func:`osnr_closed_form` evaluates the collapsed
expression directly. They must agree to rounding.
"""

import enum
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .comb import INFINITE, noise_density
from .quantities import db_from_linear, dbm_from_watt, linear_from_db, photon_energy, watt_from_dbm

__all__ = [
    "AmplifierSpec",
    "LinkConfig",
    "ChannelState",
    "EqualizationScheme",
    "PlanEntry",
    "ConfigError",
    "apply_amplifier",
    "apply_attenuation",
    "comb_amp_plan",
    "propagate",
    "osnr_of",
    "osnr_closed_form",
    "load_config",
    "CONFIG_KEYS",
]

# G*g = 1 must hold for the in-line amplifiers to within this
_GAIN_LOSS_RTOL = 1e-9


class ConfigError(ValueError):
    """Invalid or unreadable link configuration."""


@dataclass(frozen=True)
class AmplifierSpec:
    gain: float
    noise_figure: float

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError(f"amplifier gain must be positive, got {self.gain!r}")
        if not self.noise_figure >= 1:
            raise ValueError(f"noise figure must be >= 1 (linear), got {self.noise_figure!r}")

    @classmethod
    def from_db(cls, gain_db, nf_db):
        return cls(linear_from_db(gain_db), linear_from_db(nf_db))


def _default_amp():
    return AmplifierSpec.from_db(15.0, 5.0)


@dataclass(frozen=True)
class LinkConfig:
    """Link parameters in linear SI units.

    Defaults are the reference system: 12.5 GHz reference bandwidth, 0 dBm
    per channel at every span input, 25 dB modulator loss, 15 dB spans
    compensated by 15 dB amplifiers, 5 dB noise figures throughout.
    ``inline_amp.gain * span_loss`` must equal 1.
    """

    b_ref: float = 12.5e9
    launch_power: float = 1e-3
    mod_transmission: float = linear_from_db(-25.0)
    comb_amp_nf: float = linear_from_db(5.0)
    post_amp: AmplifierSpec = field(default_factory=_default_amp)
    span_loss: float = linear_from_db(-15.0)
    span_count: int = 1
    inline_amp: AmplifierSpec = field(default_factory=_default_amp)
    rx_amp: AmplifierSpec = field(default_factory=_default_amp)
    center_wavelength: float = 1.55e-6
    capacity_pol_factor: int = 1

    def __post_init__(self):
        if not self.b_ref > 0 or not self.launch_power > 0:
            raise ValueError("b_ref and launch_power must be positive")
        if not 0 < self.mod_transmission <= 1:
            raise ValueError(f"mod_transmission must lie in (0, 1], got {self.mod_transmission!r}")
        if not 0 < self.span_loss <= 1:
            raise ValueError(f"span_loss must lie in (0, 1], got {self.span_loss!r}")
        if not self.comb_amp_nf >= 1:
            raise ValueError(f"comb_amp_nf must be >= 1, got {self.comb_amp_nf!r}")
        if int(self.span_count) != self.span_count or self.span_count < 1:
            raise ValueError(f"span_count must be an integer >= 1, got {self.span_count!r}")
        if abs(self.inline_amp.gain * self.span_loss - 1.0) > _GAIN_LOSS_RTOL:
            raise ValueError("in-line amplifier gain must exactly compensate the span loss")
        if not self.center_wavelength > 0:
            raise ValueError("center_wavelength must be positive")
        if self.capacity_pol_factor not in (1, 2):
            raise ValueError("capacity_pol_factor must be 1 or 2")
        object.__setattr__(self, "span_count", int(self.span_count))

    @property
    def photon_energy(self):
        return photon_energy(self.center_wavelength)

    @property
    def distance_km(self):
        return 75.0 * self.span_count

    def with_spans(self, span_count):
        return replace(self, span_count=span_count)

    def to_dict(self):
        """Flat document keyed like the JSON configuration file."""
        return {
            "b_ref_hz": self.b_ref,
            "launch_power_dbm": float(dbm_from_watt(self.launch_power)),
            "mod_loss_db": float(-db_from_linear(self.mod_transmission)),
            "comb_amp_nf_db": float(db_from_linear(self.comb_amp_nf)),
            "post_amp_gain_db": float(db_from_linear(self.post_amp.gain)),
            "post_amp_nf_db": float(db_from_linear(self.post_amp.noise_figure)),
            "span_loss_db": float(-db_from_linear(self.span_loss)),
            "span_count": self.span_count,
            "inline_nf_db": float(db_from_linear(self.inline_amp.noise_figure)),
            "rx_gain_db": float(db_from_linear(self.rx_amp.gain)),
            "rx_nf_db": float(db_from_linear(self.rx_amp.noise_figure)),
            "center_wavelength_m": self.center_wavelength,
            "capacity_pol_factor": self.capacity_pol_factor,
        }

    @classmethod
    def from_dict(cls, doc):
        """Build a config from a flat dB-valued mapping; missing keys keep defaults.

        Losses are given as positive dB numbers (``span_loss_db: 15``). The
        in-line amplifier gain is not a key: it is always the inverse of the
        span loss.
        """
        unknown = set(doc) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        d = {**cls().to_dict(), **doc}
        try:
            for key, value in d.items():
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"configuration key {key!r} must be a number, got {value!r}")
            span_loss = linear_from_db(-d["span_loss_db"])
            return cls(
                b_ref=float(d["b_ref_hz"]),
                launch_power=watt_from_dbm(d["launch_power_dbm"]),
                mod_transmission=linear_from_db(-d["mod_loss_db"]),
                comb_amp_nf=linear_from_db(d["comb_amp_nf_db"]),
                post_amp=AmplifierSpec.from_db(d["post_amp_gain_db"], d["post_amp_nf_db"]),
                span_loss=span_loss,
                span_count=d["span_count"],
                inline_amp=AmplifierSpec(1.0 / span_loss, linear_from_db(d["inline_nf_db"])),
                rx_amp=AmplifierSpec.from_db(d["rx_gain_db"], d["rx_nf_db"]),
                center_wavelength=float(d["center_wavelength_m"]),
                capacity_pol_factor=d["capacity_pol_factor"],
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


CONFIG_KEYS = (
    "b_ref_hz",
    "launch_power_dbm",
    "mod_loss_db",
    "comb_amp_nf_db",
    "post_amp_gain_db",
    "post_amp_nf_db",
    "span_loss_db",
    "span_count",
    "inline_nf_db",
    "rx_gain_db",
    "rx_nf_db",
    "center_wavelength_m",
    "capacity_pol_factor",
)


def load_config(path):
    """Read a JSON link configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    try:
        return LinkConfig.from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class ChannelState:
    signal: float
    noise: float

    def __post_init__(self):
        if not self.signal > 0:
            raise ValueError(f"signal power must be positive, got {self.signal!r}")
        if not self.noise >= 0:
            raise ValueError(f"noise power must be non-negative, got {self.noise!r}")


class EqualizationScheme(enum.Enum):
    NO_EQ = "no-eq"
    GAIN_EQ = "gain-eq"
    POWER_EQ = "power-eq"


@dataclass(frozen=True)
class PlanEntry:
    """Comb amplifier gain and extra modulator attenuation for one line."""

    comb_gain: float
    mod_attenuation: float = 1.0


def apply_amplifier(state, amp, hf, b_ref):
    """Amplify signal and noise and add the amplifier's own ASE.

    A gain below one adds no ASE; such a stage acts as a lossless-noise
    attenuator.
    """
    ase = amp.noise_figure * hf * max(amp.gain - 1.0, 0.0) * b_ref
    return ChannelState(amp.gain * state.signal, amp.gain * state.noise + ase)


def apply_attenuation(state, g):
    if not 0 < g <= 1:
        raise ValueError(f"attenuation factor must lie in (0, 1], got {g!r}")
    return ChannelState(g * state.signal, g * state.noise)


def comb_amp_plan(comb, config, scheme):
    """Per-line comb amplifier gain and modulator attenuation.

    GAIN_EQ
        each line gets its own gain so every channel launches at
        ``config.launch_power``.
    NO_EQ
        one common gain sized so the strongest line launches at
        ``config.launch_power``; weaker lines launch lower.
    POWER_EQ
        the NO_EQ gain, plus attenuation ``p_min / p_line`` in the modulator
        so every channel launches at ``(p_min / p_max) * launch_power``.

    Returns
    -------
    list of PlanEntry
        One entry per comb line, in comb order.
    """
    scheme = EqualizationScheme(scheme)
    powers = comb.powers
    pre_launch = config.mod_transmission * config.post_amp.gain
    if scheme is EqualizationScheme.GAIN_EQ:
        return [PlanEntry(float(config.launch_power / (p * pre_launch)), 1.0) for p in powers]
    common = float(config.launch_power / (powers.max() * pre_launch))
    if scheme is EqualizationScheme.NO_EQ:
        return [PlanEntry(common, 1.0) for _ in powers]
    p_min = powers.min()
    return [PlanEntry(common, float(p_min / p)) for p in powers]


def propagate(line, config, plan):
    """Walk one comb line through every stage of the link.

    Returns the :class:`ChannelState` at the receiver pre-amplifier output.
    """
    hf = config.photon_energy
    b_ref = config.b_ref
    state = ChannelState(line.power, noise_density(line, b_ref) * b_ref)
    state = apply_amplifier(state, AmplifierSpec(plan.comb_gain, config.comb_amp_nf), hf, b_ref)
    state = apply_attenuation(state, config.mod_transmission * plan.mod_attenuation)
    state = apply_amplifier(state, config.post_amp, hf, b_ref)
    state = apply_attenuation(state, config.span_loss)
    for _ in range(config.span_count - 1):
        state = apply_amplifier(state, config.inline_amp, hf, b_ref)
        state = apply_attenuation(state, config.span_loss)
    return apply_amplifier(state, config.rx_amp, hf, b_ref)


def osnr_of(state):
    """Signal over noise in ``b_ref``; INFINITE for a noiseless state."""
    if state.noise == 0:
        return INFINITE
    return state.signal / state.noise


def osnr_closed_form(p_line, ocnr, config, plan):
    """Receiver OSNR from the collapsed link expression.

    Vectorised over ``p_line``, ``ocnr`` and the plan fields (pass arrays of
    comb gains / attenuations through a PlanEntry). ``ocnr`` may be INFINITE.
    """
    p_line = np.asarray(p_line, dtype=float)
    ocnr = np.asarray(ocnr, dtype=float)
    g0 = config.mod_transmission * np.asarray(plan.mod_attenuation, dtype=float)
    G0 = np.asarray(plan.comb_gain, dtype=float)
    g1 = config.span_loss
    G1, F1 = config.post_amp.gain, config.post_amp.noise_figure
    G, F = config.inline_amp.gain, config.inline_amp.noise_figure
    G_rx, F_rx = config.rx_amp.gain, config.rx_amp.noise_figure
    M = config.span_count

    signal = g1 * G1 * g0 * G0 * p_line
    with np.errstate(divide="ignore"):
        source_noise = np.where(np.isinf(ocnr), 0.0, signal / ocnr)
    amp_noise = (
        g1 * G1 * g0 * np.maximum(G0 - 1.0, 0.0) * config.comb_amp_nf
        + g1 * max(G1 - 1.0, 0.0) * F1
        + g1 * (M - 1) * max(G - 1.0, 0.0) * F
        + max(G_rx - 1.0, 0.0) / G_rx * F_rx
    )
    noise = source_noise + config.photon_energy * config.b_ref * amp_noise
    with np.errstate(divide="ignore"):
        out = np.where(noise > 0, signal / np.where(noise > 0, noise, 1.0), INFINITE)
    return float(out) if out.ndim == 0 else out
