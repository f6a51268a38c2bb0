"""Pointwise physics of velocity-selective hole burning in a warm vapor.

Closed-form pieces only: the Maxwell velocity distribution, unit-peak
Lorentzian weights, per-beam saturation, the steady-state population
difference, and the kinematic maps between detuning, velocity class and
momentum.  Frequencies are plain Hz unless a name says angular; velocities
are m/s.  Every function is pure and accepts scalars or numpy arrays for the
velocity/detuning argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .objects_io import IntensityGrid

K_B = 1.380649e-23  # Boltzmann constant, J/K (exact)

# Warm Rb-87 cell on the 780 nm cycling transition.
DEFAULT_ATOM_MASS = 1.443e-25       # kg
DEFAULT_WAVELENGTH = 780e-9         # m
DEFAULT_LINEWIDTH_FWHM = 5.75e6     # Hz
DEFAULT_TEMPERATURE = 298.15        # K
DEFAULT_DEPTH_SCALE = 120.0         # n*sigma_o*L, gives unsaturated resonant OD ~ 2
DEFAULT_CELL_LENGTH = 0.10          # m
DEFAULT_PEAK_S = 2.0                # object-beam intensity in saturation units

_GAS_FIELDS = (
    "atom_mass",
    "wavelength",
    "natural_linewidth_fwhm",
    "temperature",
    "depth_scale",
    "cell_length",
)


@dataclass(frozen=True)
class GasParams:
    """Atomic species and cell parameters.

    natural_linewidth_fwhm is the FWHM in Hz; formulas use the angular
    linewidth 2*pi*fwhm.  depth_scale is the dimensionless n*sigma_o*L:
    density, cross section and length never appear separately.
    """

    atom_mass: float = DEFAULT_ATOM_MASS
    wavelength: float = DEFAULT_WAVELENGTH
    natural_linewidth_fwhm: float = DEFAULT_LINEWIDTH_FWHM
    temperature: float = DEFAULT_TEMPERATURE
    depth_scale: float = DEFAULT_DEPTH_SCALE
    cell_length: float = DEFAULT_CELL_LENGTH

    def __post_init__(self):
        for name in _GAS_FIELDS:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"GasParams.{name} must be finite and > 0, got {value!r}")

    @property
    def wavenumber(self) -> float:
        """k = 2 pi / lambda, rad/m."""
        return 2.0 * math.pi / self.wavelength

    @property
    def gamma_angular(self) -> float:
        """Natural linewidth as an angular frequency, rad/s."""
        return 2.0 * math.pi * self.natural_linewidth_fwhm

    @property
    def sigma_v(self) -> float:
        """1D thermal velocity spread sqrt(kB T / m), m/s."""
        return math.sqrt(K_B * self.temperature / self.atom_mass)


@dataclass(frozen=True)
class ObjectBeam:
    """A saturating object beam: detuning from the stationary-atom resonance
    plus its transverse intensity grid in saturation units (s = I/I_s)."""

    detuning: float
    intensity: IntensityGrid

    def __post_init__(self):
        if not math.isfinite(self.detuning):
            raise ValueError(f"beam detuning must be finite, got {self.detuning!r}")


def maxwell_pdf(v_z, gas: GasParams):
    """Maxwell velocity density f(v_z) in s/m, normalized over v_z."""
    sig2 = K_B * gas.temperature / gas.atom_mass
    return np.exp(-np.square(v_z) / (2.0 * sig2)) / math.sqrt(2.0 * math.pi * sig2)


def lorentzian_weight(angular_detuning, gamma_angular: float):
    """Unit-peak Lorentzian (G^2/4) / (x^2 + G^2/4); 1 at x = 0, 1/2 at x = G/2."""
    if not gamma_angular > 0:
        raise ValueError(f"gamma_angular must be > 0, got {gamma_angular!r}")
    q = 0.25 * gamma_angular * gamma_angular
    return q / (np.square(angular_detuning) + q)


def saturation_factor(s_pixel, beam_detuning: float, v_z, gas: GasParams):
    """Saturation s * L(2 pi d + k v_z) seen by one velocity class from one beam.

    The beam co-propagates with +k v_z in its Doppler shift, so resonance sits
    at v_z = -lambda * d.
    """
    if np.any(np.asarray(s_pixel) < 0):
        raise ValueError(f"s_pixel must be >= 0, got {s_pixel!r}")
    arg = 2.0 * math.pi * beam_detuning + gas.wavenumber * np.asarray(v_z, dtype=float)
    return s_pixel * lorentzian_weight(arg, gas.gamma_angular)


def population_difference(v_z, beams: Iterable[tuple], gas: GasParams):
    """Steady-state (n1 - n2) as a fraction of density: f(v_z) / (1 + sum_j s_j L_j).

    beams is an iterable of (s_pixel, detuning) pairs.  Several beams combine
    by summing their saturation terms in the denominator; velocity classes
    separated by much more than the linewidth barely couple.
    """
    denom = 1.0
    for s_pixel, detuning in beams:
        denom = denom + saturation_factor(s_pixel, detuning, v_z, gas)
    return maxwell_pdf(v_z, gas) / denom


def velocity_of_object_detuning(beam_detuning, gas: GasParams):
    """Velocity class resonant with an object beam: v_r = -lambda * detuning."""
    return -gas.wavelength * beam_detuning


def probe_resonant_velocity(probe_detuning, gas: GasParams):
    """Velocity class the counter-propagating probe addresses: v = +lambda * detuning.

    The sign is opposite to velocity_of_object_detuning, which is why a hole
    burned at +d shows up in the probe scan at -d.
    """
    return gas.wavelength * probe_detuning


def momentum_of_detuning(probe_detuning, gas: GasParams):
    """Momentum coordinate of the tomographic section, p_z = m * lambda * detuning."""
    # evaluated as m * (lambda*d) so p == m * probe_resonant_velocity(d) bit-exactly
    return gas.atom_mass * probe_resonant_velocity(probe_detuning, gas)


def doppler_sigma(gas: GasParams) -> float:
    """1D thermal velocity spread, m/s."""
    return gas.sigma_v
