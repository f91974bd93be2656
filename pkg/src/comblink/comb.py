"""Frequency comb source model.

A comb is an ordered, equidistant grid of optical carriers. Each line carries
a power (W) and an optical carrier-to-noise ratio (OCNR) measured in the
reference bandwidth. ``INFINITE`` marks a noiseless line.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .quantities import db_from_linear, dbm_from_watt, linear_from_db, watt_from_dbm

__all__ = [
    "INFINITE",
    "CombLine",
    "CombSource",
    "SolitonCombParams",
    "CombFileError",
    "noise_density",
    "synthesize_flat_comb",
    "synthesize_soliton_comb",
    "soliton_envelope_width",
    "read_comb_csv",
    "write_comb_csv",
    "CSV_HEADER",
]

INFINITE = math.inf

CSV_HEADER = ("index", "frequency_hz", "power_dbm", "ocnr_db")

# relative tolerance on the line spacing of a comb grid
_SPACING_RTOL = 1e-9


class CombFileError(ValueError):
    """Raised for malformed comb spectrum files."""


@dataclass(frozen=True)
class CombLine:
    index: int
    frequency: float
    power: float
    ocnr: float = INFINITE

    def __post_init__(self):
        if not self.power > 0 or not math.isfinite(self.power):
            raise ValueError(f"line {self.index}: power must be positive and finite, got {self.power!r}")
        if not self.ocnr > 0:
            raise ValueError(f"line {self.index}: OCNR must be positive or INFINITE, got {self.ocnr!r}")
        if not self.frequency > 0 or not math.isfinite(self.frequency):
            raise ValueError(f"line {self.index}: frequency must be positive, got {self.frequency!r}")


@dataclass(frozen=True)
class CombSource:
    """Immutable comb: lines sorted by strictly increasing frequency.

    ``spacing`` may be omitted for multi-line combs, in which case it is
    taken from the first pair of lines. Single-line combs need no spacing.
    """

    lines: tuple
    spacing: float = None

    def __post_init__(self):
        lines = tuple(self.lines)
        if not lines:
            raise ValueError("a comb needs at least one line")
        object.__setattr__(self, "lines", lines)
        freqs = np.array([ln.frequency for ln in lines])
        if len(lines) == 1:
            return
        steps = np.diff(freqs)
        if np.any(steps <= 0):
            raise ValueError("comb line frequencies must be strictly increasing")
        spacing = steps[0] if self.spacing is None else float(self.spacing)
        if not spacing > 0:
            raise ValueError(f"spacing must be positive, got {spacing!r}")
        if np.any(np.abs(steps - spacing) > _SPACING_RTOL * spacing):
            raise ValueError("comb lines are not equidistant at the given spacing")
        object.__setattr__(self, "spacing", float(spacing))

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    @property
    def frequencies(self):
        return np.array([ln.frequency for ln in self.lines])

    @property
    def powers(self):
        return np.array([ln.power for ln in self.lines])

    @property
    def ocnrs(self):
        return np.array([ln.ocnr for ln in self.lines])

    @property
    def indices(self):
        return np.array([ln.index for ln in self.lines])


@dataclass(frozen=True)
class SolitonCombParams:
    """Parameters of a synthetic single-soliton comb spectrum.

    Defaults describe a 110-line, 100 GHz comb in the C and L bands with
    -11 dBm at the centre falling to -20 dBm at the edge and OCNR going
    from 48 dB to 40 dB.
    """

    line_count: int = 110
    center_frequency: float = 193.4e12
    spacing: float = 100e9
    peak_power: float = watt_from_dbm(-11.0)
    edge_power: float = watt_from_dbm(-20.0)
    center_ocnr: float = linear_from_db(48.0)
    edge_ocnr: float = linear_from_db(40.0)

    def __post_init__(self):
        if int(self.line_count) != self.line_count or self.line_count < 1:
            raise ValueError(f"line_count must be a positive integer, got {self.line_count!r}")
        if not self.spacing > 0 or not self.center_frequency > 0:
            raise ValueError("spacing and center_frequency must be positive")
        if not self.peak_power >= self.edge_power > 0:
            raise ValueError("need peak_power >= edge_power > 0")
        if not self.center_ocnr >= self.edge_ocnr > 0:
            raise ValueError("need center_ocnr >= edge_ocnr > 0")


def noise_density(line, b_ref):
    """Copolarized noise power spectral density (W/Hz) of one comb line."""
    if math.isinf(line.ocnr):
        return 0.0
    return line.power / (line.ocnr * b_ref)


def _grid_offsets(line_count):
    # 110 lines -> -55 ... 54, 1 line -> 0
    first = -(line_count // 2)
    return np.arange(first, first + line_count)


def synthesize_flat_comb(line_count, center_frequency, spacing, power, ocnr=INFINITE):
    """Comb of ``line_count`` identical lines on ``center + l * spacing``."""
    if int(line_count) != line_count or line_count < 1:
        raise ValueError(f"line_count must be a positive integer, got {line_count!r}")
    if not spacing > 0 or not power > 0 or not center_frequency > 0:
        raise ValueError("center_frequency, spacing and power must be positive")
    offsets = _grid_offsets(int(line_count))
    lines = tuple(
        CombLine(int(k), center_frequency + k * spacing, float(power), float(ocnr)) for k in offsets
    )
    return CombSource(lines, spacing)


def soliton_envelope_width(params):
    """Width ``w`` of the ``sech(df / w)**2`` envelope, in Hz.

    Chosen so that the outermost grid line sits exactly at ``edge_power``.
    Returns ``inf`` for a flat envelope (peak == edge or a single line).
    """
    max_offset = np.abs(_grid_offsets(params.line_count)).max() * params.spacing
    ratio = params.peak_power / params.edge_power
    if max_offset == 0 or ratio == 1.0:
        return math.inf
    return max_offset / math.acosh(math.sqrt(ratio))


def synthesize_soliton_comb(params=None):
    """Comb with a sech^2 power envelope and OCNR linear in dB vs |offset|.

    Parameters
    ----------
    params : SolitonCombParams, optional
        Envelope description; the default reproduces a typical DKS comb.

    Returns
    -------
    CombSource
    """
    if params is None:
        params = SolitonCombParams()
    offsets = _grid_offsets(params.line_count)
    df = offsets * params.spacing
    width = soliton_envelope_width(params)
    if math.isinf(width):
        powers = np.full(len(offsets), params.peak_power)
    else:
        powers = params.peak_power / np.cosh(df / width) ** 2

    max_offset = np.abs(df).max()
    center_db = db_from_linear(params.center_ocnr)
    edge_db = db_from_linear(params.edge_ocnr)
    frac = np.abs(df) / max_offset if max_offset > 0 else np.zeros(len(df))
    ocnrs = linear_from_db(center_db + (edge_db - center_db) * frac)

    lines = tuple(
        CombLine(int(k), params.center_frequency + f, float(p), float(o))
        for k, f, p, o in zip(offsets, df, powers, np.atleast_1d(ocnrs))
    )
    return CombSource(lines, params.spacing)


def _parse_float(text, path, row, field):
    try:
        value = float(text)
    except ValueError:
        raise CombFileError(f"{path}: row {row}: field {field!r} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise CombFileError(f"{path}: row {row}: field {field!r} must be finite, got {text!r}")
    return value


def read_comb_csv(path):
    """Load a comb spectrum from CSV.

    The header ``index,frequency_hz,power_dbm,ocnr_db`` is required. Lines
    starting with ``#`` are ignored and an empty ``ocnr_db`` means INFINITE.
    Row numbers in error messages are 1-based physical line numbers.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        numbered = [(n, raw) for n, raw in enumerate(fh, start=1) if raw.strip() and not raw.lstrip().startswith("#")]
    if not numbered:
        raise CombFileError(f"{path}: no header found")

    header_row, header_text = numbered[0]
    header = tuple(h.strip() for h in next(csv.reader([header_text])))
    if header != CSV_HEADER:
        raise CombFileError(f"{path}: row {header_row}: expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")

    lines = []
    for row, text in numbered[1:]:
        fields = [f.strip() for f in next(csv.reader([text]))]
        if len(fields) != len(CSV_HEADER):
            raise CombFileError(f"{path}: row {row}: expected {len(CSV_HEADER)} fields, got {len(fields)}")
        idx_text, freq_text, power_text, ocnr_text = fields
        try:
            index = int(idx_text)
        except ValueError:
            raise CombFileError(f"{path}: row {row}: field 'index' is not an integer: {idx_text!r}") from None
        freq = _parse_float(freq_text, path, row, "frequency_hz")
        power = watt_from_dbm(_parse_float(power_text, path, row, "power_dbm"))
        ocnr = INFINITE if ocnr_text == "" else linear_from_db(_parse_float(ocnr_text, path, row, "ocnr_db"))
        try:
            lines.append(CombLine(index, freq, power, ocnr))
        except ValueError as exc:
            raise CombFileError(f"{path}: row {row}: {exc}") from None
        if len(lines) > 1 and lines[-1].frequency <= lines[-2].frequency:
            raise CombFileError(f"{path}: row {row}: frequencies must be strictly increasing")

    if not lines:
        raise CombFileError(f"{path}: no comb lines")
    try:
        return CombSource(tuple(lines))
    except ValueError as exc:
        raise CombFileError(f"{path}: {exc}") from None


def write_comb_csv(comb, path):
    """Write ``comb`` in the format read by :func:`read_comb_csv`.

    Floats are written with ``repr`` so a write/read cycle is lossless up to
    the dB conversion round-off.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for ln in comb:
            ocnr = "" if math.isinf(ln.ocnr) else repr(float(db_from_linear(ln.ocnr)))
            writer.writerow([ln.index, repr(float(ln.frequency)), repr(float(dbm_from_watt(ln.power))), ocnr])
