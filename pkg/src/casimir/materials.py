"""Material response models evaluated on the imaginary frequency axis.

Dispersive models (Drude, plasma) are closed forms in the imaginary
frequency xi; tabulated optical data is carried to the imaginary axis
with a Kramers-Kronig transform over the measured absorption eps''(w),
extended below and above the data range by analytic tails.

Electronvolts appear only at ingestion and reporting boundaries; every
internal frequency is in rad/s.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.constants import c, e as _ELEMENTARY_CHARGE, hbar

from .quadrature import _GL15_W, _GL7_W, _NODES, QuadratureError, adaptive_integral

_EV = _ELEMENTARY_CHARGE / hbar  # rad/s per eV

# eps'' values of exactly zero are floored here before log-log
# interpolation; the floored segments integrate to ~1e-300, i.e. zero.
_LOG_FLOOR = 1e-300


class ZeroFrequencyError(ValueError):
    """A diverging permittivity model was evaluated at xi = 0."""


class DataFileError(ValueError):
    """An optical data file could not be parsed or failed validation."""


def ev_to_radps(energy_ev):
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    return energy_ev * _EV


def radps_to_ev(omega):
    """Convert an angular frequency in rad/s to a photon energy in eV."""
    return omega / _EV


def eps2_from_nk(n, k):
    """Imaginary permittivity from refractive index data: eps'' = 2 n k."""
    return 2.0 * np.asarray(n, dtype=float) * np.asarray(k, dtype=float)


# ---------------------------------------------------------------------------
# permittivity models
#
# Each model provides
#   eps_imag_axis(xi) -> eps(i*xi), real and >= 1 for passive media, and
#   zero_limit() -> (order, coeff) with eps(i*xi) ~ coeff * xi**(-order)
#                   as xi -> 0+ (order 0 means a finite static value).


@dataclass(frozen=True)
class Vacuum:
    """Unit permittivity."""

    def eps_imag_axis(self, xi):
        return 1.0

    def zero_limit(self):
        return 0, 1.0


@dataclass(frozen=True)
class Constant:
    """Frequency-independent permittivity."""

    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise ValueError(f"constant permittivity must be positive, got {self.value}")

    def eps_imag_axis(self, xi):
        return self.value

    def zero_limit(self):
        return 0, self.value


@dataclass(frozen=True)
class Drude:
    """Drude metal: eps(i*xi) = 1 + omega_p**2 / (xi * (xi + gamma)).

    omega_p and gamma are in rad/s.
    """

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not self.omega_p > 0.0:
            raise ValueError("Drude omega_p must be positive")
        if self.gamma < 0.0:
            raise ValueError("Drude gamma must be non-negative")

    def eps_imag_axis(self, xi):
        if xi <= 0.0:
            raise ZeroFrequencyError(
                "Drude permittivity diverges at xi = 0; the zero-frequency "
                "term must come from a zero-mode prescription")
        return 1.0 + self.omega_p ** 2 / (xi * (xi + self.gamma))

    def zero_limit(self):
        if self.gamma > 0.0:
            return 1, self.omega_p ** 2 / self.gamma
        return 2, self.omega_p ** 2


@dataclass(frozen=True)
class Plasma:
    """Dissipationless metal: eps(i*xi) = 1 + omega_p**2 / xi**2."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0.0:
            raise ValueError("plasma omega_p must be positive")

    def eps_imag_axis(self, xi):
        if xi <= 0.0:
            raise ZeroFrequencyError(
                "plasma permittivity diverges at xi = 0; the zero-frequency "
                "term must come from a zero-mode prescription")
        return 1.0 + (self.omega_p / xi) ** 2

    def zero_limit(self):
        return 2, self.omega_p ** 2


@dataclass(frozen=True)
class Permeability:
    """Frequency-independent relative permeability."""

    value: float = 1.0

    def __post_init__(self):
        if not self.value > 0.0:
            raise ValueError(f"permeability must be positive, got {self.value}")

    def mu_imag_axis(self, xi):
        return self.value


# ---------------------------------------------------------------------------
# tabulated optical data


class OpticalDataTable:
    """Measured absorption spectrum sampled at increasing photon energies.

    Parameters
    ----------
    energies_ev : array_like
        Strictly increasing photon energies in eV, at least two samples.
    eps1, eps2 : array_like
        Real and imaginary permittivity on the real frequency axis.
        eps2 must be non-negative (passivity).
    source_label : str
        Free-form provenance tag copied into report metadata.
    """

    def __init__(self, energies_ev, eps1, eps2, source_label=""):
        e = np.asarray(energies_ev, dtype=float)
        e1 = np.asarray(eps1, dtype=float)
        e2 = np.asarray(eps2, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise DataFileError("optical data needs at least two samples")
        if e1.shape != e.shape or e2.shape != e.shape:
            raise DataFileError("energy and permittivity columns differ in length")
        steps = np.diff(e)
        if np.any(steps <= 0.0):
            i = int(np.argmax(steps <= 0.0))
            raise DataFileError(
                f"energies must be strictly increasing; violation at sample {i + 1} "
                f"({e[i]:g} -> {e[i + 1]:g} eV)")
        if np.any(e2 < 0.0):
            i = int(np.argmax(e2 < 0.0))
            raise DataFileError(f"eps2 must be non-negative; sample {i} is {e2[i]:g}")
        if not e[0] > 0.0:
            raise DataFileError("photon energies must be positive")
        self.energies_ev = e
        self.eps1 = e1
        self.eps2 = e2
        self.source_label = source_label
        self.omegas = e * _EV  # rad/s

    @property
    def e_min_ev(self):
        return float(self.energies_ev[0])

    @property
    def e_max_ev(self):
        return float(self.energies_ev[-1])

    def __eq__(self, other):
        if not isinstance(other, OpticalDataTable):
            return NotImplemented
        return (np.array_equal(self.energies_ev, other.energies_ev)
                and np.array_equal(self.eps1, other.eps1)
                and np.array_equal(self.eps2, other.eps2))

    def __repr__(self):
        return (f"OpticalDataTable({self.energies_ev.size} samples, "
                f"{self.e_min_ev:g}-{self.e_max_ev:g} eV, "
                f"label={self.source_label!r})")

    def replace_below(self, other, cutoff_ev):
        """Merge two tables: ``other`` supplies all samples below the cutoff.

        Rows of this table at or above ``cutoff_ev`` are kept unchanged.
        """
        keep = self.energies_ev >= cutoff_ev
        take = other.energies_ev < cutoff_ev
        if not np.any(take):
            raise DataFileError(f"replacement table has no samples below {cutoff_ev:g} eV")
        label = f"{other.source_label}<{cutoff_ev:g}eV<{self.source_label}"
        return OpticalDataTable(
            np.concatenate([other.energies_ev[take], self.energies_ev[keep]]),
            np.concatenate([other.eps1[take], self.eps1[keep]]),
            np.concatenate([other.eps2[take], self.eps2[keep]]),
            source_label=label)


def load_optical_data(path, source_label=None):
    """Read an optical data table from a CSV file.

    The first non-comment row is a header naming either
    ``energy_ev,eps1,eps2`` or ``energy_ev,n,k`` (case-insensitive);
    ``#`` starts a comment. n,k files are converted with eps1 = n**2 - k**2
    and eps2 = 2 n k. Parse failures report the offending line number.
    """
    if not os.path.exists(path):
        raise DataFileError(f"data file not found: {path}")
    header = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [t.strip() for t in line.split(",")]
            if header is None:
                header = [t.lower() for t in fields]
                if header not in (["energy_ev", "eps1", "eps2"], ["energy_ev", "n", "k"]):
                    raise DataFileError(
                        f"{path}: line {lineno}: header must be "
                        f"'energy_ev,eps1,eps2' or 'energy_ev,n,k', got {line!r}")
                continue
            if len(fields) != 3:
                raise DataFileError(f"{path}: line {lineno}: expected 3 columns, got {len(fields)}")
            try:
                rows.append([float(t) for t in fields])
            except ValueError:
                raise DataFileError(f"{path}: line {lineno}: could not parse {line!r}") from None
    if header is None:
        raise DataFileError(f"{path}: no header row found")
    if len(rows) < 2:
        raise DataFileError(f"{path}: need at least two data rows, got {len(rows)}")
    data = np.asarray(rows, dtype=float)
    label = source_label if source_label is not None else str(path)
    if header[1] == "n":
        n, k = data[:, 1], data[:, 2]
        return OpticalDataTable(data[:, 0], n ** 2 - k ** 2, eps2_from_nk(n, k),
                                source_label=label)
    return OpticalDataTable(data[:, 0], data[:, 1], data[:, 2], source_label=label)


@dataclass(frozen=True)
class DrudeTail:
    """Analytic eps'' extension below the lowest tabulated energy.

    eps''(w) = omega_p**2 * gamma / (w * (w**2 + gamma**2)) for w below
    the join energy. omega_p and gamma are in rad/s; the join energy is
    in eV (normally the lowest tabulated energy).
    """

    omega_p: float
    gamma: float
    join_energy_ev: float

    def __post_init__(self):
        if not self.omega_p > 0.0:
            raise ValueError("DrudeTail omega_p must be positive")
        if self.gamma < 0.0:
            raise ValueError("DrudeTail gamma must be non-negative")
        if not self.join_energy_ev > 0.0:
            raise ValueError("DrudeTail join energy must be positive")


@dataclass(frozen=True)
class PowerTail:
    """Power-law eps'' extension above the highest tabulated energy.

    eps''(w) = amplitude * (w_max / w)**exponent with exponent > 1 so the
    transform kernel stays integrable.
    """

    amplitude: float
    exponent: float

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ValueError("PowerTail amplitude must be non-negative")
        if self.amplitude > 0.0 and not self.exponent > 1.0:
            raise ValueError("PowerTail exponent must exceed 1 for an integrable tail")


def fit_power_tail(table):
    """Least-squares power-law fit of eps2 over the table's top decade."""
    w = table.omegas
    mask = (w >= w[-1] / 10.0) & (table.eps2 > 0.0)
    if int(mask.sum()) < 2:
        if table.eps2[-1] > 0.0:
            return PowerTail(float(table.eps2[-1]), 3.0)
        return PowerTail(0.0, 3.0)
    x = np.log(w[-1] / w[mask])
    y = np.log(table.eps2[mask])
    slope, intercept = np.polyfit(x, y, 1)
    return PowerTail(float(math.exp(intercept)), float(slope))


def drude_synthetic_table(omega_p_ev, gamma_ev, e_min_ev, e_max_ev,
                          per_decade=100, source_label="synthetic-drude"):
    """Sample the analytic Drude spectrum onto a log-spaced table.

    Useful for validating the Kramers-Kronig path against the closed-form
    imaginary-axis result, and as a stand-in where measured data is absent.
    """
    n = max(2, int(round(per_decade * math.log10(e_max_ev / e_min_ev))) + 1)
    e = np.geomspace(e_min_ev, e_max_ev, n)
    eps2 = omega_p_ev ** 2 * gamma_ev / (e * (e ** 2 + gamma_ev ** 2))
    eps1 = 1.0 - omega_p_ev ** 2 / (e ** 2 + gamma_ev ** 2)
    return OpticalDataTable(e, eps1, eps2, source_label=source_label)


# ---------------------------------------------------------------------------
# Kramers-Kronig transform to the imaginary axis


def _drude_tail_integral(omega_p, gamma, w_hi, xi):
    """Closed form of int_0^w_hi w*eps''_drude(w) / (w**2 + xi**2) dw."""
    if gamma == 0.0:
        return 0.0
    a = omega_p ** 2 * gamma
    if abs(xi - gamma) > 1e-6 * (xi + gamma):
        return (a / (xi ** 2 - gamma ** 2)
                * (math.atan(w_hi / gamma) / gamma - math.atan(w_hi / xi) / xi))
    # Degenerate xi ~ gamma: both the numerator and xi**2 - gamma**2 vanish;
    # evaluate the equal-parameter form at the midpoint instead.
    g = 0.5 * (xi + gamma)
    return a * (w_hi / (2.0 * g ** 2 * (w_hi ** 2 + g ** 2))
                + math.atan(w_hi / g) / (2.0 * g ** 3))


def _power_tail_integral(tail, w_max, xi, rel_tol, max_panels):
    """int_{w_max}^inf w*eps''_tail(w) / (w**2 + xi**2) dw via t = w_max/w."""
    if tail is None or tail.amplitude == 0.0:
        return 0.0
    amp, p = tail.amplitude, tail.exponent

    def f(t):
        t = np.asarray(t, dtype=float)
        return amp * w_max ** 2 * t ** (p - 1.0) / (w_max ** 2 + (xi * t) ** 2)

    return adaptive_integral(f, 0.0, 1.0, rel_tol=rel_tol, max_panels=max_panels)


def _data_band_integral(table, xi, rel_tol, max_rounds=24):
    """int over the tabulated range of w*eps''(w) / (w**2 + xi**2) dw.

    eps'' is interpolated log-log between samples, so each sample segment
    carries an analytic power law; segments are integrated with paired
    15/7-point Gauss rules, bisecting (with the segment's own power law)
    until the summed error estimate meets the tolerance.
    """
    w = table.omegas
    e2 = np.maximum(table.eps2, _LOG_FLOOR)
    slopes = np.diff(np.log(e2)) / np.diff(np.log(w))

    # panel arrays: bounds plus the anchor (w_ref, e2_ref, slope) of the
    # sample segment each panel lives on
    a = w[:-1].copy()
    b = w[1:].copy()
    w_ref = w[:-1].copy()
    e_ref = e2[:-1].copy()
    s = slopes.copy()

    for _ in range(max_rounds):
        half = 0.5 * (b - a)
        x = 0.5 * (a + b)[:, None] + half[:, None] * _NODES[None, :]
        y = e_ref[:, None] * (x / w_ref[:, None]) ** s[:, None] * x / (x ** 2 + xi ** 2)
        i15 = half * (y[:, :15] @ _GL15_W)
        i7 = half * (y[:, 15:] @ _GL7_W)
        err = np.abs(i15 - i7)
        total = float(np.sum(i15))
        tol = rel_tol * max(abs(total), _LOG_FLOOR)
        if float(np.sum(err)) <= tol:
            return total
        # bisect every panel whose error exceeds its share of the budget
        split = err > tol / max(err.size, 1)
        keep = ~split
        mid = 0.5 * (a[split] + b[split])
        a = np.concatenate([a[keep], a[split], mid])
        b = np.concatenate([b[keep], mid, b[split]])
        w_ref = np.concatenate([w_ref[keep], w_ref[split], w_ref[split]])
        e_ref = np.concatenate([e_ref[keep], e_ref[split], e_ref[split]])
        s = np.concatenate([s[keep], s[split], s[split]])
    raise QuadratureError(
        f"Kramers-Kronig data-band integral did not converge to rel_tol={rel_tol:g}")


def kk_transform(table, low_tail, high_tail, xi, rel_tol=1e-6, max_panels=512):
    """Permittivity on the imaginary axis from tabulated absorption data.

    eps(i*xi) = 1 + (2/pi) * int_0^inf w * eps''(w) / (w**2 + xi**2) dw,
    with eps'' given by ``low_tail`` below the join energy, log-log
    interpolation of the table inside the data range and ``high_tail``
    above it. Either tail may be None (treated as zero absorption).
    """
    if xi < 0.0:
        raise ValueError("xi must be non-negative")
    if xi == 0.0 and low_tail is not None:
        raise ZeroFrequencyError(
            "tabulated permittivity with a Drude low-frequency tail diverges "
            "at xi = 0; the zero-frequency term must come from a zero-mode "
            "prescription")
    total = 0.0
    lo = table.omegas[0]
    if low_tail is not None:
        lo = min(lo, ev_to_radps(low_tail.join_energy_ev))
        total += _drude_tail_integral(low_tail.omega_p, low_tail.gamma, lo, xi)
    total += _data_band_integral(table, xi, rel_tol)
    total += _power_tail_integral(high_tail, table.omegas[-1], xi, rel_tol, max_panels)
    return 1.0 + (2.0 / math.pi) * total


class Tabulated:
    """Permittivity model backed by measured data via the transform above.

    Evaluations are cached per xi value, so Matsubara sweeps touching the
    same frequency grid pay the transform cost once per material.
    """

    def __init__(self, table, low_tail=None, high_tail=None,
                 rel_tol=1e-6, max_panels=512):
        self.table = table
        self.low_tail = low_tail
        self.high_tail = high_tail
        self.rel_tol = rel_tol
        self.max_panels = max_panels
        self._cache = {}

    def eps_imag_axis(self, xi):
        xi = float(xi)
        hit = self._cache.get(xi)
        if hit is None:
            hit = kk_transform(self.table, self.low_tail, self.high_tail, xi,
                               rel_tol=self.rel_tol, max_panels=self.max_panels)
            self._cache[xi] = hit
        return hit

    def zero_limit(self):
        if self.low_tail is not None and self.low_tail.gamma > 0.0:
            return 1, self.low_tail.omega_p ** 2 / self.low_tail.gamma
        return 0, kk_transform(self.table, None, self.high_tail, 0.0,
                               rel_tol=self.rel_tol, max_panels=self.max_panels)

    def __eq__(self, other):
        if not isinstance(other, Tabulated):
            return NotImplemented
        return (self.table == other.table and self.low_tail == other.low_tail
                and self.high_tail == other.high_tail)

    def __repr__(self):
        return f"Tabulated({self.table!r}, {self.low_tail!r}, {self.high_tail!r})"


def plasma_frequency_of(model):
    """Plasma frequency in rad/s implied by a permittivity model, or None."""
    if isinstance(model, (Drude, Plasma)):
        return model.omega_p
    if isinstance(model, Tabulated) and model.low_tail is not None:
        return model.low_tail.omega_p
    return None
