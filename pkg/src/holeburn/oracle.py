"""Brute-force reference integrator and the numerical self-check report.

The reference deliberately uses a different rule (uniform midpoint) and
different node placement than the production composite trapezoid, so
agreement between the two is evidence rather than a tautology.  It trades
speed for simplicity: one flat grid at a small fraction of the natural
linewidth across the whole Doppler span.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .medium import absorption_coefficient, build_velocity_grid
from .physics import GasParams, lorentzian_weight, maxwell_pdf

SAMPLE_SEED = 173              # fixed seed for the randomized comparison sample
SAMPLE_COUNT = 200
QUADRATURE_RTOL = 1e-6
MAXWELL_ATOL = 1e-9
MIRROR_TOL_HZ = 1e6

_SAMPLE_BEAM_DET_HZ = 100e6    # beam detunings drawn from +-this
_SAMPLE_PROBE_DET_HZ = 150e6   # probe detunings drawn from +-this
_SAMPLE_S_MAX = 8.0


def midpoint_nodes(lo: float, hi: float, step: float):
    """Uniform midpoint nodes covering [lo, hi]; returns (nodes, actual_step)."""
    if not hi > lo:
        raise ValueError("need hi > lo")
    n = int(math.ceil((hi - lo) / step))
    h = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * h, h


def brute_force_alpha(pixel_s: Sequence[float], beam_detunings: Sequence[float],
                      probe_detuning: float, gas: GasParams,
                      step: float | None = None, span: float = 8.0) -> float:
    """alpha*L by uniform Riemann midpoint sum over [-span, +span] sigma_v.

    The default step is Gamma/(50 k); anything coarser than Gamma/(10 k) is
    rejected because it would undersample the Lorentzian cores.
    """
    s = np.atleast_1d(np.asarray(pixel_s, dtype=float))
    if s.size != len(beam_detunings):
        raise ValueError(
            f"got {s.size} saturation values for {len(beam_detunings)} beam detunings"
        )
    if np.any(s < 0):
        raise ValueError("saturation values must be >= 0")
    if span < 8.0:
        raise ValueError(f"span must be >= 8 sigma_v, got {span!r}")
    k = gas.wavenumber
    gamma = gas.gamma_angular
    max_step = gamma / (10.0 * k)
    if step is None:
        step = gamma / (50.0 * k)
    if not 0 < step <= max_step:
        raise ValueError(f"step must be in (0, Gamma/(10 k)] = (0, {max_step:.4g}], got {step!r}")

    v, h = midpoint_nodes(-span * gas.sigma_v, span * gas.sigma_v, step)
    denom = np.ones_like(v)
    for s_j, d_j in zip(s, beam_detunings):
        denom = denom + s_j * lorentzian_weight(2.0 * math.pi * d_j + k * v, gamma)
    integrand = (
        maxwell_pdf(v, gas)
        / denom
        * lorentzian_weight(2.0 * math.pi * probe_detuning - k * v, gamma)
    )
    return float(gas.depth_scale * np.sum(integrand) * h)


def maxwell_normalization_residual(gas: GasParams, span: float = 8.0,
                                   points: int = 20001) -> float:
    """|trapezoid integral of f(v) over +-span sigma_v  -  1|."""
    v = np.linspace(-span * gas.sigma_v, span * gas.sigma_v, points)
    return float(abs(np.trapezoid(maxwell_pdf(v, gas), v) - 1.0))


def mirror_check(gas: GasParams, beam_detuning: float, s: float,
                 scan_step_hz: float = 0.5e6, window_hz: float = 20e6,
                 spacing_scale: float = 1.0):
    """Locate the transmittance peak left by one unmasked beam.

    Scans the production OD around the mirrored detuning -beam_detuning and
    returns (offset_hz, passed): the distance of the OD minimum from the
    mirror point and whether it is within MIRROR_TOL_HZ.
    """
    center = -beam_detuning
    n = int(round(window_hz / scan_step_hz))
    detunings = center + scan_step_hz * np.arange(-n, n + 1)
    od = np.empty(detunings.size)
    for i, det in enumerate(detunings):
        vgrid = build_velocity_grid(gas, [beam_detuning], det,
                                    spacing_scale=spacing_scale)
        od[i] = absorption_coefficient([s], [beam_detuning], det, gas, vgrid)
    offset = float(detunings[int(np.argmin(od))] - center)
    return offset, abs(offset) <= MIRROR_TOL_HZ


def quadrature_sample_errors(gas: GasParams, n_beams: int, samples: int = SAMPLE_COUNT,
                             seed: int = SAMPLE_SEED,
                             spacing_scale: float = 1.0) -> np.ndarray:
    """Relative production-vs-reference errors on the fixed randomized sample."""
    rng = np.random.default_rng(seed)
    errors = np.empty(samples)
    for i in range(samples):
        dets = rng.uniform(-_SAMPLE_BEAM_DET_HZ, _SAMPLE_BEAM_DET_HZ, n_beams)
        svals = rng.uniform(0.0, _SAMPLE_S_MAX, n_beams)
        probe = rng.uniform(-_SAMPLE_PROBE_DET_HZ, _SAMPLE_PROBE_DET_HZ)
        vgrid = build_velocity_grid(gas, dets, probe, spacing_scale=spacing_scale)
        production = absorption_coefficient(svals, dets, probe, gas, vgrid)
        reference = brute_force_alpha(svals, dets, probe, gas)
        errors[i] = abs(production - reference) / abs(reference)
    return errors


def validate_report(scenario, samples: int = SAMPLE_COUNT, seed: int = SAMPLE_SEED,
                    spacing_scale: float = 1.0) -> dict:
    """Cross-check the production quadrature against the brute-force reference.

    Covers: max relative error over the fixed-seed randomized parameter
    sample, the Maxwell normalization residual, and the counter-propagation
    mirror property (skipped when the scenario has no beams).  spacing_scale
    coarsens the production grid and exists as a negative-control hook.
    """
    gas = scenario.gas
    beams = scenario.beams
    errors = quadrature_sample_errors(gas, len(beams), samples=samples, seed=seed,
                                      spacing_scale=spacing_scale)
    max_error = float(errors.max())
    residual = maxwell_normalization_residual(gas)

    report = {
        "sample_count": int(samples),
        "sample_seed": int(seed),
        "max_relative_quadrature_error": max_error,
        "quadrature_tolerance": QUADRATURE_RTOL,
        "quadrature_passed": max_error < QUADRATURE_RTOL,
        "maxwell_residual": residual,
        "maxwell_tolerance": MAXWELL_ATOL,
        "maxwell_passed": residual < MAXWELL_ATOL,
    }
    if beams:
        offset, ok = mirror_check(gas, beams[0].detuning,
                                  float(beams[0].intensity.values.max()),
                                  spacing_scale=spacing_scale)
        report["mirror_offset_hz"] = offset
        report["mirror_tolerance_hz"] = MIRROR_TOL_HZ
        report["mirror_passed"] = ok
    else:
        report["mirror_offset_hz"] = None
        report["mirror_tolerance_hz"] = MIRROR_TOL_HZ
        report["mirror_passed"] = True

    report["passed"] = bool(
        report["quadrature_passed"] and report["maxwell_passed"] and report["mirror_passed"]
    )
    return report
