"""Zero-point energies and normal pressures of five-layer stacks.

At finite temperature the interaction free energy per unit area is a sum
over discrete imaginary frequencies xi_n = 2*pi*n*kB*T/hbar with the n = 0
term at half weight; at T = 0 the sum becomes an integral over xi. Every
frequency term is a semi-infinite integral over the transverse wavenumber
of k * sum_pol ln G.

Sign convention: attractive configurations have negative energy per area
and negative normal pressure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import Boltzmann as k_B, c, hbar

from .quadrature import QuadratureError, semi_infinite_integral
from .stack import (FromModel, Polarization, g_full_thickness_derivative,
                    ln_g_full)


def matsubara_xi(n, temperature):
    """n-th Matsubara frequency 2*pi*n*kB*T/hbar in rad/s.

    Written as n times the first frequency so linearity is exact in
    floating point.
    """
    return n * (2.0 * math.pi * k_B * temperature / hbar)


@dataclass(frozen=True)
class MatsubaraConfig:
    """Finite-temperature summation settings.

    temperature is in kelvin; the sum runs over n = 0 .. n_max with the
    n = 0 term at half weight, evaluated under ``zero_mode``.
    """

    temperature: float
    n_max: int = 500
    zero_mode: object = field(default_factory=FromModel)

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise ValueError("temperature must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the wavenumber (and T = 0 frequency) integrals.

    Integrands are rescaled to a dimensionless semi-infinite axis set by
    the smallest decay length of the system before panel subdivision.
    """

    rel_tol: float = 1e-9
    max_panels: int = 512

    def __post_init__(self):
        if not 0.0 < self.rel_tol <= 1e-3:
            raise ValueError("rel_tol must lie in (0, 1e-3]")
        if self.max_panels < 8:
            raise ValueError("max_panels must be at least 8")


@dataclass
class EnergyPerArea:
    """Energy per unit area in J/m^2 with its per-n breakdown.

    ``terms[n]`` is the full contribution of Matsubara index n including
    prefactor and the half weight at n = 0; ``value`` is their compensated
    (ascending-n) sum, so partial sums are reproducible regardless of how
    the terms were computed.
    """

    value: float
    terms: list

    def partial_sums(self):
        out = []
        acc = []
        for t in self.terms:
            acc.append(t)
            out.append(math.fsum(acc))
        return out


def k_integral(f, quad, scale=1.0):
    """Semi-infinite integral of a vectorized integrand over k in [0, inf).

    ``f`` must include the k Jacobian itself and decay at least
    exponentially on the given k-scale.
    """
    return semi_infinite_integral(f, scale=scale, rel_tol=quad.rel_tol,
                                  max_panels=quad.max_panels)


def _tagged(err, n):
    tagged = QuadratureError(
        f"{err} (while integrating Matsubara index n={n})",
        last_estimate=err.last_estimate,
        previous_estimate=err.previous_estimate)
    tagged.matsubara_n = n
    return tagged


def matsubara_energy(ln_g_sum, ln_g_sum_zero, mats, quad, k_scale):
    """Finite-temperature free energy per area of a generic mode function.

    ``ln_g_sum(k, xi)`` and ``ln_g_sum_zero(k)`` return
    sum_pol ln G(k, i*xi) for xi > 0 and for the zero mode. Terms are
    accumulated in ascending n and summed with compensation, so the result
    is bitwise stable for a fixed panel decomposition.
    """
    pref = k_B * mats.temperature / (2.0 * math.pi)
    terms = []
    try:
        i0 = k_integral(lambda k: k * ln_g_sum_zero(k), quad, scale=k_scale)
    except QuadratureError as err:
        raise _tagged(err, 0) from err
    terms.append(0.5 * pref * i0)
    largest = abs(terms[0])
    dead = 0
    for n in range(1, mats.n_max + 1):
        xi = matsubara_xi(n, mats.temperature)
        try:
            i_n = k_integral(lambda k: k * ln_g_sum(k, xi), quad, scale=k_scale)
        except QuadratureError as err:
            raise _tagged(err, n) from err
        terms.append(pref * i_n)
        largest = max(largest, abs(terms[-1]))
        # terms decay exponentially in n; once several in a row are below
        # double precision relative to the largest, the rest are padding
        dead = dead + 1 if abs(terms[-1]) <= 1e-15 * largest else 0
        if dead >= 3:
            terms.extend([0.0] * (mats.n_max - n))
            break
    return EnergyPerArea(math.fsum(terms), terms)


def _stack_ln_g(stack):
    def ln_g_sum(k, xi):
        total = 0.0
        for pol in Polarization:
            total = total + ln_g_full(pol, stack, k, xi)
        return total
    return ln_g_sum


def _stack_ln_g_zero(stack, zero_mode):
    def ln_g_sum_zero(k):
        total = 0.0
        for pol in Polarization:
            total = total + ln_g_full(pol, stack, k, 0.0, zero_mode=zero_mode)
        return total
    return ln_g_sum_zero


def _stack_k_scale(stack):
    # Rescaling by the largest thickness keeps structure from every layer
    # visible: the slowest decay sits at u ~ 1 and faster ones at larger u,
    # which the geometrically growing blocks always reach. The reverse
    # choice would bury large-layer structure inside the first panel.
    return 1.0 / (2.0 * max(stack.inner_thicknesses))


def energy_per_area_T(stack, mats, quad=QuadratureConfig()):
    """Finite-temperature interaction free energy per unit area in J/m^2."""
    return matsubara_energy(_stack_ln_g(stack),
                            _stack_ln_g_zero(stack, mats.zero_mode),
                            mats, quad, _stack_k_scale(stack))


def energy_per_area_T0(stack, quad=QuadratureConfig()):
    """Zero-temperature energy per unit area: integral over xi instead of a sum."""
    ln_g = _stack_ln_g(stack)
    k_scale = _stack_k_scale(stack)
    xi_scale = c * k_scale

    def outer(xis):
        vals = [k_integral(lambda k: k * ln_g(k, float(xi)), quad, scale=k_scale)
                for xi in np.atleast_1d(xis)]
        return np.asarray(vals)

    integral = semi_infinite_integral(outer, scale=xi_scale,
                                      rel_tol=quad.rel_tol,
                                      max_panels=quad.max_panels)
    return hbar / (4.0 * math.pi ** 2) * integral


def normal_pressure(stack, which, mats, quad=QuadratureConfig()):
    """Normal pressure (N/m^2) conjugate to one inner thickness.

    Computed from the analytic thickness derivative of ln G, not finite
    differences: P = -d(E/A)/dd_which. Negative values mean attraction.
    """
    zero_mode = mats.zero_mode

    def integrand(k, xi):
        total = 0.0
        for pol in Polarization:
            g, dg = g_full_thickness_derivative(pol, stack, which, k, xi)
            total = total + dg / g
        return total

    def integrand_zero(k):
        total = 0.0
        for pol in Polarization:
            g, dg = g_full_thickness_derivative(pol, stack, which, k, 0.0,
                                                zero_mode=zero_mode)
            total = total + dg / g
        return total

    energy_like = matsubara_energy(integrand, integrand_zero, mats, quad,
                                   _stack_k_scale(stack))
    return -energy_like.value


@dataclass(frozen=True)
class TruncationRow:
    n: int
    value: float
    rel_delta: float | None


def truncation_report(stack, mats, quad, checkpoints):
    """Partial free energies at increasing n_max cutoffs from a single pass.

    Returns one row per checkpoint with the partial sum through that index
    and its relative change against the previous checkpoint.
    """
    checkpoints = [int(n) for n in checkpoints]
    if not checkpoints or sorted(checkpoints) != checkpoints:
        raise ValueError("checkpoints must be a non-empty ascending list")
    if checkpoints[0] < 0 or checkpoints[-1] > mats.n_max:
        raise ValueError(f"checkpoints must lie within [0, n_max={mats.n_max}]")
    run = MatsubaraConfig(mats.temperature, n_max=max(checkpoints[-1], 1),
                          zero_mode=mats.zero_mode)
    energy = energy_per_area_T(stack, run, quad)
    rows = []
    previous = None
    for n in checkpoints:
        value = math.fsum(energy.terms[:n + 1])
        if previous is None or value == 0.0:
            rel = None
        else:
            rel = abs(value - previous) / abs(value)
        rows.append(TruncationRow(n, value, rel))
        previous = value
    return rows
