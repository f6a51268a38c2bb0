"""Deterministic simulator of velocity-selective hole burning in a warm
atomic vapor: object patterns imprinted into velocity classes and read back
as delta-OD tomograms with a counter-propagating probe."""

__version__ = "0.1.0"

from .imaging import (
    Tomogram,
    TomogramStack,
    delta_od,
    mirror_transform,
    scan,
    tomogram,
    transmit,
    transmittance_curve,
)
from .letters import letter_mask
from .medium import (
    ODMap,
    VelocityGrid,
    absorption_coefficient,
    build_velocity_grid,
    od_map,
)
from .objects_io import (
    IntensityGrid,
    NDLayout,
    Rect,
    apply_mask,
    export_grid,
    gaussian_profile,
    load_grid_csv,
    load_mask,
    nd_composite,
    uniform_profile,
)
from .oracle import brute_force_alpha, validate_report
from .physics import (
    GasParams,
    ObjectBeam,
    doppler_sigma,
    lorentzian_weight,
    maxwell_pdf,
    momentum_of_detuning,
    population_difference,
    probe_resonant_velocity,
    saturation_factor,
    velocity_of_object_detuning,
)
from .scenario import Scenario, ScenarioError, parse_scenario

__all__ = [
    "GasParams",
    "IntensityGrid",
    "NDLayout",
    "ODMap",
    "ObjectBeam",
    "Rect",
    "Scenario",
    "ScenarioError",
    "Tomogram",
    "TomogramStack",
    "VelocityGrid",
    "absorption_coefficient",
    "apply_mask",
    "brute_force_alpha",
    "build_velocity_grid",
    "delta_od",
    "doppler_sigma",
    "export_grid",
    "gaussian_profile",
    "letter_mask",
    "load_grid_csv",
    "load_mask",
    "lorentzian_weight",
    "maxwell_pdf",
    "mirror_transform",
    "momentum_of_detuning",
    "nd_composite",
    "od_map",
    "parse_scenario",
    "population_difference",
    "probe_resonant_velocity",
    "saturation_factor",
    "scan",
    "tomogram",
    "transmit",
    "transmittance_curve",
    "uniform_profile",
    "validate_report",
    "velocity_of_object_detuning",
]
