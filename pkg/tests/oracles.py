"""Independent reference computations used to freeze expected values."""

import math

# photon energy at 1.55 um from the exact SI h and c, evaluated by hand
HF_1550 = 6.62607015e-34 * 299792458 / 1.55e-6


def lin(db):
    return 10 ** (db / 10)


def chain_osnr_db(p_line, ocnr_db, spans):
    """Hand-rolled stage walk for the default link, written independently of the package."""
    B = 12.5e9
    amp = lambda s, n, g, f: (g * s, g * n + f * HF_1550 * max(g - 1, 0) * B)
    comb_gain = 1e-3 / (p_line * lin(-25) * lin(15))
    s, n = p_line, 0.0 if ocnr_db is None else p_line / lin(ocnr_db)
    s, n = amp(s, n, comb_gain, lin(5))
    s, n = s * lin(-25), n * lin(-25)
    s, n = amp(s, n, lin(15), lin(5))
    s, n = s * lin(-15), n * lin(-15)
    for _ in range(spans - 1):
        s, n = amp(s, n, lin(15), lin(5))
        s, n = s * lin(-15), n * lin(-15)
    s, n = amp(s, n, lin(15), lin(5))
    return 10 * math.log10(s / n)


def analytic_power_threshold_dbm(spans):
    """1-dB line power from rearranging the collapsed expression (source term = (10^0.1 - 1) * link term)."""
    g, G, F = lin(-15), lin(15), lin(5)
    link = g * (G - 1) * F + g * (spans - 1) * (G - 1) * F + (G - 1) / G * F
    p = 1e-3 / ((10**0.1 - 1) * link / (g * F) + G * lin(-25))
    return 10 * math.log10(p / 1e-3)


def analytic_ocnr_threshold_db(spans, p_line):
    g, G, F = lin(-15), lin(15), lin(5)
    link = g * (G - 1) * F + g * (spans - 1) * (G - 1) * F + (G - 1) / G * F
    source = g * F * max(1e-3 / p_line - G * lin(-25), 0.0)
    ocnr = g * 1e-3 / ((10**0.1 - 1) * HF_1550 * 12.5e9 * (link + source))
    return 10 * math.log10(ocnr)
