"""scikit-learn style front end to the link model.

:class:`CombLinkOSNR` takes comb spectra as arrays, one row per comb line,
with columns ``[power_dbm, ocnr_db]`` (``ocnr_db = inf`` for a noiseless
line) or ``[frequency_hz, power_dbm, ocnr_db]``. ``fit`` sizes the comb
amplifier for the chosen equalization scheme; ``predict`` returns the
receiver OSNR per line in dB. Hyperparameters use the same names as the
JSON configuration keys, so ``get_params()`` doubles as a config document.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import capacity_from_snr, snr_from_osnr
from .comb import CombLine, CombSource
from .link import EqualizationScheme, LinkConfig, PlanEntry, osnr_closed_form, propagate
from .quantities import db_from_linear, dbm_from_watt, linear_from_db, watt_from_dbm

__all__ = ["CombLinkOSNR", "check_comb_array", "comb_to_array"]

_CONFIG_PARAMS = tuple(LinkConfig().to_dict())


def comb_to_array(comb):
    """``CombSource`` -> ``(n_lines, 3)`` array of frequency, dBm, dB."""
    ocnr_db = np.array([np.inf if np.isinf(o) else db_from_linear(o) for o in comb.ocnrs])
    return np.column_stack([comb.frequencies, dbm_from_watt(comb.powers), ocnr_db])


def check_comb_array(X):
    """Validate a comb array and return ``(powers_w, ocnrs_linear)``.

    Accepts a ``CombSource`` as well. Powers must be finite; OCNR may be
    ``+inf`` but not NaN or ``-inf``.
    """
    if isinstance(X, CombSource):
        return X.powers, X.ocnrs
    X = check_array(X, dtype=float, ensure_all_finite=False, ensure_min_samples=1)
    if X.shape[1] not in (2, 3):
        raise ValueError(f"expected 2 or 3 columns (optional frequency, power_dbm, ocnr_db), got {X.shape[1]}")
    power_dbm, ocnr_db = X[:, -2], X[:, -1]
    if not np.all(np.isfinite(power_dbm)):
        raise ValueError("line powers must be finite")
    if np.any(np.isnan(ocnr_db)) or np.any(ocnr_db == -np.inf):
        raise ValueError("OCNR must be a number or +inf")
    if X.shape[1] == 3 and not np.all(X[:, 0] > 0):
        raise ValueError("frequencies must be positive")
    ocnr = np.where(np.isinf(ocnr_db), np.inf, linear_from_db(np.where(np.isinf(ocnr_db), 0.0, ocnr_db)))
    return watt_from_dbm(power_dbm), ocnr


class CombLinkOSNR(BaseEstimator):
    """Receiver OSNR of each comb line after the WDM link.

    Parameters
    ----------
    b_ref_hz, launch_power_dbm, mod_loss_db, comb_amp_nf_db, post_amp_gain_db,
    post_amp_nf_db, span_loss_db, span_count, inline_nf_db, rx_gain_db,
    rx_nf_db, center_wavelength_m, capacity_pol_factor
        Link description, as in the JSON configuration file.
    scheme : {"no-eq", "gain-eq", "power-eq"}
        Comb equalization strategy.

    Attributes
    ----------
    config_ : LinkConfig
    max_line_power_, min_line_power_ : float
        Strongest / weakest line power seen in ``fit`` (W). They set the
        common comb gain and the modulator attenuation of the non-gain
        schemes.
    n_features_in_ : int
    """

    def __init__(
        self,
        b_ref_hz=12.5e9,
        launch_power_dbm=0.0,
        mod_loss_db=25.0,
        comb_amp_nf_db=5.0,
        post_amp_gain_db=15.0,
        post_amp_nf_db=5.0,
        span_loss_db=15.0,
        span_count=1,
        inline_nf_db=5.0,
        rx_gain_db=15.0,
        rx_nf_db=5.0,
        center_wavelength_m=1.55e-6,
        capacity_pol_factor=1,
        scheme="gain-eq",
    ):
        self.b_ref_hz = b_ref_hz
        self.launch_power_dbm = launch_power_dbm
        self.mod_loss_db = mod_loss_db
        self.comb_amp_nf_db = comb_amp_nf_db
        self.post_amp_gain_db = post_amp_gain_db
        self.post_amp_nf_db = post_amp_nf_db
        self.span_loss_db = span_loss_db
        self.span_count = span_count
        self.inline_nf_db = inline_nf_db
        self.rx_gain_db = rx_gain_db
        self.rx_nf_db = rx_nf_db
        self.center_wavelength_m = center_wavelength_m
        self.capacity_pol_factor = capacity_pol_factor
        self.scheme = scheme

    def fit(self, X, y=None):
        powers, _ = check_comb_array(X)
        self.scheme_ = EqualizationScheme(self.scheme)
        params = self.get_params()
        self.config_ = LinkConfig.from_dict({k: params[k] for k in _CONFIG_PARAMS})
        self.max_line_power_ = float(powers.max())
        self.min_line_power_ = float(powers.min())
        self.n_features_in_ = 3 if isinstance(X, CombSource) else np.shape(X)[1]
        return self

    def plan(self, X):
        """Comb gain and modulator attenuation for each row of ``X``."""
        check_is_fitted(self, "config_")
        powers, _ = check_comb_array(X)
        cfg = self.config_
        pre_launch = cfg.mod_transmission * cfg.post_amp.gain
        if self.scheme_ is EqualizationScheme.GAIN_EQ:
            gain = cfg.launch_power / (powers * pre_launch)
            atten = np.ones_like(powers)
        else:
            gain = np.full_like(powers, cfg.launch_power / (self.max_line_power_ * pre_launch))
            if self.scheme_ is EqualizationScheme.POWER_EQ:
                atten = np.minimum(self.min_line_power_ / powers, 1.0)
            else:
                atten = np.ones_like(powers)
        return PlanEntry(gain, atten)

    def predict(self, X):
        """Receiver OSNR per line, in dB."""
        check_is_fitted(self, "config_")
        powers, ocnrs = check_comb_array(X)
        osnr = np.atleast_1d(osnr_closed_form(powers, ocnrs, self.config_, self.plan(X)))
        return np.where(np.isinf(osnr), np.inf, 10.0 * np.log10(np.where(np.isinf(osnr), 1.0, osnr)))

    def transform(self, X):
        """Signal and noise power (W) per line at the receiver, by stage-wise propagation."""
        check_is_fitted(self, "config_")
        powers, ocnrs = check_comb_array(X)
        plan = self.plan(X)
        out = np.empty((len(powers), 2))
        for i, (p, o) in enumerate(zip(powers, ocnrs)):
            line = CombLine(i, 1.0, float(p), float(o))
            state = propagate(line, self.config_, PlanEntry(plan.comb_gain[i], plan.mod_attenuation[i]))
            out[i] = state.signal, state.noise
        return out

    def fit_predict(self, X, y=None):
        return self.fit(X).predict(X)

    def capacity(self, X, spacing_hz, mode="optimal"):
        """Total Shannon capacity (bit/s) of the lines in ``X`` at line spacing ``spacing_hz``."""
        osnr = linear_from_db(self.predict(X))
        snr = snr_from_osnr(osnr, spacing_hz, self.config_.b_ref, 2)
        return capacity_from_snr(snr, spacing_hz, mode, self.config_.capacity_pol_factor).total
