"""Probe-beam detection chain: transmitted frames, delta-OD reconstruction,
tomograms, detuning scans and the whole-beam transmittance curve.

Sign convention: delta OD = OD_off - OD_on = ln(I_on / I_off).  Saturation
only ever bleaches absorption, so a positive value means an object beam was
there.  Tomograms are computed directly in OD space; the probe profile
cancels from the ratio analytically, and computing the difference of OD maps
keeps that cancellation exact in floating point as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .medium import absorption_coefficient, build_velocity_grid, od_map, ODMap
from .objects_io import IntensityGrid
from .physics import momentum_of_detuning, probe_resonant_velocity


@dataclass(frozen=True)
class Tomogram:
    """One tomographic section: delta-OD grid tagged with its phase-space address."""

    delta_od: np.ndarray
    valid_mask: np.ndarray
    probe_detuning: float
    resonant_velocity: float
    momentum: float
    pixel_pitch: float

    def __post_init__(self):
        delta = np.array(self.delta_od, dtype=float)
        valid = np.array(self.valid_mask, dtype=bool)
        if delta.ndim != 2 or delta.shape != valid.shape:
            raise ValueError("delta_od and valid_mask must be matching 2D arrays")
        if not np.all(np.isfinite(delta[valid])):
            raise ValueError("delta_od must be finite on valid pixels")
        delta.flags.writeable = False
        valid.flags.writeable = False
        object.__setattr__(self, "delta_od", delta)
        object.__setattr__(self, "valid_mask", valid)

    @property
    def shape(self) -> tuple[int, int]:
        return self.delta_od.shape


@dataclass(frozen=True)
class TomogramStack:
    """Tomograms ordered by strictly increasing probe detuning."""

    tomograms: tuple[Tomogram, ...]

    def __post_init__(self):
        object.__setattr__(self, "tomograms", tuple(self.tomograms))
        dets = [t.probe_detuning for t in self.tomograms]
        if any(b <= a for a, b in zip(dets, dets[1:])):
            raise ValueError("stack detunings must be strictly increasing")
        if self.tomograms:
            shape = self.tomograms[0].shape
            pitch = self.tomograms[0].pixel_pitch
            for t in self.tomograms[1:]:
                if t.shape != shape or t.pixel_pitch != pitch:
                    raise ValueError("all tomograms in a stack must share shape and pitch")

    def __len__(self) -> int:
        return len(self.tomograms)

    def __iter__(self):
        return iter(self.tomograms)

    def __getitem__(self, index):
        return self.tomograms[index]

    def detunings(self) -> np.ndarray:
        return np.array([t.probe_detuning for t in self.tomograms])

    def momenta(self) -> np.ndarray:
        return np.array([t.momentum for t in self.tomograms])


def transmit(probe_profile: IntensityGrid, od: ODMap) -> IntensityGrid:
    """Attenuate an incident probe frame through the cell: I * exp(-OD)."""
    if probe_profile.shape != od.grid.shape:
        raise ValueError(
            f"dimension mismatch: probe {probe_profile.shape} vs OD {od.grid.shape}"
        )
    return IntensityGrid(probe_profile.values * np.exp(-od.grid), probe_profile.pixel_pitch)


def delta_od(i_on: IntensityGrid, i_off: IntensityGrid, floor: float):
    """Reconstruct delta OD = ln(I_on / I_off) from a beams-on / beams-off frame pair.

    Pixels where either frame falls below the intensity floor are marked
    invalid and carry 0 instead of an infinity or NaN.  Returns
    (delta, valid) arrays.
    """
    if not (isinstance(floor, (int, float)) and math.isfinite(floor) and floor > 0):
        raise ValueError(f"floor must be finite and > 0, got {floor!r}")
    if i_on.shape != i_off.shape:
        raise ValueError(f"dimension mismatch: {i_on.shape} vs {i_off.shape}")
    on = i_on.values
    off = i_off.values
    valid = (on >= floor) & (off >= floor)
    delta = np.zeros(on.shape)
    delta[valid] = np.log(on[valid] / off[valid])
    return delta, valid


def tomogram(scenario, probe_detuning: float) -> Tomogram:
    """Simulate one on/off frame pair and reconstruct the tomographic section.

    Works in OD space: OD_off is the unsaturated optical density (a single
    scalar, the gas is transversely uniform without object beams) and OD_on
    comes from the per-pixel map.  Both run through the same quadrature on
    the same velocity grid, which keeps delta OD exactly non-negative and
    exactly zero wherever no beam hits.
    """
    gas = scenario.gas
    beams = scenario.beams
    detunings = [b.detuning for b in beams]
    shape = (scenario.canvas.height, scenario.canvas.width)

    vgrid = build_velocity_grid(gas, detunings, probe_detuning)
    od_off = absorption_coefficient(
        np.zeros(len(beams)), detunings, probe_detuning, gas, vgrid
    )
    if beams:
        od_on = od_map(beams, probe_detuning, gas, vgrid=vgrid).grid
    else:
        od_on = np.full(shape, od_off)
    delta = od_off - od_on

    probe_vals = scenario.probe_profile().values
    valid = probe_vals >= scenario.probe_floor()
    return Tomogram(
        delta_od=delta,
        valid_mask=valid,
        probe_detuning=probe_detuning,
        resonant_velocity=probe_resonant_velocity(probe_detuning, gas),
        momentum=momentum_of_detuning(probe_detuning, gas),
        pixel_pitch=scenario.canvas.pitch,
    )


def scan(scenario, detunings) -> TomogramStack:
    """One tomogram per probe detuning; detunings must be strictly increasing."""
    dets = [float(d) for d in detunings]
    if any(b <= a for a, b in zip(dets, dets[1:])):
        raise ValueError("scan detunings must be strictly increasing (no duplicates)")
    return TomogramStack(tuple(tomogram(scenario, d) for d in dets))


def transmittance_curve(scenario, detunings) -> list[tuple[float, float]]:
    """Whole-beam cell transmittance versus probe detuning.

    For each detuning, the transmitted-over-incident intensity ratio
    exp(-OD_on) is averaged over the valid probe pixels; with object beams on
    and no masks this is the hole-burning spectrum on the Doppler profile.
    """
    dets = [float(d) for d in detunings]
    if not dets:
        raise ValueError("transmittance_curve needs at least one detuning")
    if any(b <= a for a, b in zip(dets, dets[1:])):
        raise ValueError("curve detunings must be strictly increasing (no duplicates)")

    gas = scenario.gas
    beams = scenario.beams
    beam_detunings = [b.detuning for b in beams]
    probe_vals = scenario.probe_profile().values
    valid = probe_vals >= scenario.probe_floor()

    points = []
    for det in dets:
        vgrid = build_velocity_grid(gas, beam_detunings, det)
        if beams:
            od_grid = od_map(beams, det, gas, vgrid=vgrid).grid
        else:
            value = absorption_coefficient([], [], det, gas, vgrid)
            od_grid = np.full(probe_vals.shape, value)
        transmittance = float(np.mean(np.exp(-od_grid[valid])))
        points.append((det, transmittance))
    return points


def mirror_transform(grid) -> np.ndarray:
    """Horizontal flip (camera-side reflection); applying it twice is the identity."""
    values = np.asarray(getattr(grid, "values", grid))
    if values.ndim != 2:
        raise ValueError("mirror_transform expects a 2D array")
    return values[:, ::-1].copy()
