"""Scenario files: the experiment description consumed by the CLI.

A scenario is a flat INI-style text file with sections [gas], [canvas],
[probe], [outputs], [options] and one [beam ...] section per object beam.
Keys carry explicit unit suffixes (detuning_mhz, pitch_um, ...) so magnitudes
cannot be misread.  Parsing applies documented defaults, validates every
invariant it can see, and the fully resolved parameter set is echoed into
output manifests for exact reproduction.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import objects_io
from .objects_io import DEFAULT_CANVAS, DEFAULT_PIXEL_PITCH, IntensityGrid
from .physics import DEFAULT_PEAK_S, GasParams, ObjectBeam

DEFAULT_FLOOR_REL = 1e-6
DEFAULT_FORMATS = ("csv", "pgm16")
MIN_SEPARATION_LINEWIDTHS = 3.0


class ScenarioError(ValueError):
    """A scenario file failed to parse or violated an invariant."""


@dataclass(frozen=True)
class Canvas:
    width: int
    height: int
    pitch: float

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ScenarioError(f"canvas must be at least 1x1, got {self.width}x{self.height}")
        if not (math.isfinite(self.pitch) and self.pitch > 0):
            raise ScenarioError(f"canvas pitch must be finite and > 0, got {self.pitch!r}")


@dataclass(frozen=True)
class BeamSpec:
    name: str
    detuning: float          # Hz
    peak_s: float
    mask_path: str | None
    envelope_waist: float | None   # m


@dataclass(frozen=True)
class ProbeSpec:
    profile: str             # "uniform" or "gaussian"
    waist: float | None      # m, gaussian only
    floor_rel: float


@dataclass(frozen=True)
class OutputSpec:
    directory: str
    formats: tuple[str, ...]
    mirror: bool


@dataclass(frozen=True)
class Scenario:
    gas: GasParams
    canvas: Canvas
    beam_specs: tuple[BeamSpec, ...]
    beams: tuple[ObjectBeam, ...]
    probe: ProbeSpec
    outputs: OutputSpec
    allow_close_detunings: bool
    source: str

    def probe_profile(self) -> IntensityGrid:
        if self.probe.profile == "gaussian":
            return objects_io.gaussian_profile(
                self.canvas.width, self.canvas.height, self.canvas.pitch,
                self.probe.waist, 1.0,
            )
        return objects_io.uniform_profile(
            self.canvas.width, self.canvas.height, self.canvas.pitch, 1.0
        )

    def probe_floor(self) -> float:
        return self.probe.floor_rel * float(self.probe_profile().values.max())

    def resolved(self) -> dict:
        """Full parameter set with all defaults applied, for manifests."""
        return {
            "gas": {
                "mass_kg": self.gas.atom_mass,
                "wavelength_nm": self.gas.wavelength * 1e9,
                "linewidth_mhz": self.gas.natural_linewidth_fwhm / 1e6,
                "temperature_k": self.gas.temperature,
                "depth_scale": self.gas.depth_scale,
                "cell_length_m": self.gas.cell_length,
            },
            "canvas": {
                "width_px": self.canvas.width,
                "height_px": self.canvas.height,
                "pitch_um": self.canvas.pitch * 1e6,
            },
            "beams": [
                {
                    "name": b.name,
                    "detuning_mhz": b.detuning / 1e6,
                    "peak_s": b.peak_s,
                    "mask": b.mask_path,
                    "envelope_waist_um": None if b.envelope_waist is None
                    else b.envelope_waist * 1e6,
                }
                for b in self.beam_specs
            ],
            "probe": {
                "profile": self.probe.profile,
                "waist_um": None if self.probe.waist is None else self.probe.waist * 1e6,
                "floor_rel": self.probe.floor_rel,
            },
            "outputs": {
                "directory": self.outputs.directory,
                "formats": list(self.outputs.formats),
                "mirror": self.outputs.mirror,
            },
            "options": {"allow_close_detunings": self.allow_close_detunings},
        }


_KNOWN_KEYS = {
    "gas": {"mass_kg", "wavelength_nm", "linewidth_mhz", "temperature_k",
            "depth_scale", "cell_length_m"},
    "canvas": {"width_px", "height_px", "pitch_um"},
    "probe": {"profile", "waist_um", "floor_rel"},
    "outputs": {"directory", "formats", "mirror"},
    "options": {"allow_close_detunings"},
    "beam": {"detuning_mhz", "peak_s", "mask", "envelope_waist_um"},
}


def _get_number(section, key, default, *, where, integer=False):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return int(raw) if integer else float(raw)
    except ValueError:
        kind = "an integer" if integer else "a number"
        raise ScenarioError(f"[{where}] {key} = {raw!r} is not {kind}") from None


def _get_bool(section, key, default, *, where):
    raw = section.get(key)
    if raw is None:
        return default
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ScenarioError(f"[{where}] {key} = {raw!r} is not a boolean")


def parse_scenario(path) -> Scenario:
    """Read, validate and fully resolve a scenario file."""
    path = Path(path)
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ScenarioError(f"scenario parse error: {exc}") from exc

    beam_sections = []
    for name in parser.sections():
        base = "beam" if name == "beam" or name.startswith(("beam:", "beam ", "beam.")) else name
        if base == "beam":
            beam_sections.append(name)
        elif base not in _KNOWN_KEYS:
            raise ScenarioError(f"unknown section [{name}]")
        for key in parser[name]:
            if key not in _KNOWN_KEYS[base]:
                raise ScenarioError(f"unknown key {key!r} in section [{name}]")

    gas_sec = parser["gas"] if parser.has_section("gas") else {}
    try:
        gas = GasParams(
            atom_mass=_get_number(gas_sec, "mass_kg", GasParams().atom_mass, where="gas"),
            wavelength=_get_number(gas_sec, "wavelength_nm",
                                   GasParams().wavelength * 1e9, where="gas") * 1e-9,
            natural_linewidth_fwhm=_get_number(
                gas_sec, "linewidth_mhz",
                GasParams().natural_linewidth_fwhm / 1e6, where="gas") * 1e6,
            temperature=_get_number(gas_sec, "temperature_k",
                                    GasParams().temperature, where="gas"),
            depth_scale=_get_number(gas_sec, "depth_scale",
                                    GasParams().depth_scale, where="gas"),
            cell_length=_get_number(gas_sec, "cell_length_m",
                                    GasParams().cell_length, where="gas"),
        )
    except ValueError as exc:
        raise ScenarioError(f"[gas] {exc}") from exc

    canvas_sec = parser["canvas"] if parser.has_section("canvas") else {}
    canvas = Canvas(
        width=_get_number(canvas_sec, "width_px", DEFAULT_CANVAS, where="canvas", integer=True),
        height=_get_number(canvas_sec, "height_px", DEFAULT_CANVAS, where="canvas", integer=True),
        pitch=_get_number(canvas_sec, "pitch_um", DEFAULT_PIXEL_PITCH * 1e6,
                          where="canvas") * 1e-6,
    )

    probe_sec = parser["probe"] if parser.has_section("probe") else {}
    profile = (probe_sec.get("profile") or "uniform").strip().lower()
    if profile not in ("uniform", "gaussian"):
        raise ScenarioError(f"[probe] profile must be 'uniform' or 'gaussian', got {profile!r}")
    waist_um = _get_number(probe_sec, "waist_um", None, where="probe")
    if profile == "gaussian" and waist_um is None:
        raise ScenarioError("[probe] gaussian profile needs waist_um")
    floor_rel = _get_number(probe_sec, "floor_rel", DEFAULT_FLOOR_REL, where="probe")
    if not (math.isfinite(floor_rel) and floor_rel > 0):
        raise ScenarioError(f"[probe] floor_rel must be finite and > 0, got {floor_rel!r}")
    probe = ProbeSpec(profile=profile,
                      waist=None if waist_um is None else waist_um * 1e-6,
                      floor_rel=floor_rel)

    out_sec = parser["outputs"] if parser.has_section("outputs") else {}
    formats_raw = out_sec.get("formats")
    if formats_raw is None:
        formats = DEFAULT_FORMATS
    else:
        formats = tuple(tok.strip() for tok in formats_raw.split(",") if tok.strip())
        bad = [f for f in formats if f not in ("csv", "pgm16")]
        if bad or not formats:
            raise ScenarioError(f"[outputs] formats must list csv and/or pgm16, got {formats_raw!r}")
    outputs = OutputSpec(
        directory=out_sec.get("directory") or "out",
        formats=formats,
        mirror=_get_bool(out_sec, "mirror", False, where="outputs"),
    )

    opt_sec = parser["options"] if parser.has_section("options") else {}
    allow_close = _get_bool(opt_sec, "allow_close_detunings", False, where="options")

    beam_specs = []
    for name in beam_sections:
        sec = parser[name]
        det = _get_number(sec, "detuning_mhz", None, where=name)
        if det is None:
            raise ScenarioError(f"[{name}] is missing detuning_mhz")
        peak_s = _get_number(sec, "peak_s", DEFAULT_PEAK_S, where=name)
        if not (math.isfinite(peak_s) and peak_s >= 0):
            raise ScenarioError(f"[{name}] peak_s must be finite and >= 0, got {peak_s!r}")
        waist = _get_number(sec, "envelope_waist_um", None, where=name)
        mask_rel = sec.get("mask")
        mask_path = None
        if mask_rel is not None:
            mask_path = str((path.parent / mask_rel).resolve())
            if not Path(mask_path).is_file():
                raise ScenarioError(f"[{name}] mask file does not exist: {mask_path}")
        beam_specs.append(BeamSpec(
            name=name,
            detuning=det * 1e6,
            peak_s=peak_s,
            mask_path=mask_path,
            envelope_waist=None if waist is None else waist * 1e-6,
        ))

    if not allow_close:
        min_sep = MIN_SEPARATION_LINEWIDTHS * gas.natural_linewidth_fwhm
        for i, a in enumerate(beam_specs):
            for b in beam_specs[i + 1:]:
                if abs(a.detuning - b.detuning) < min_sep:
                    raise ScenarioError(
                        f"beam detunings {a.detuning / 1e6:g} and {b.detuning / 1e6:g} MHz "
                        f"are closer than {MIN_SEPARATION_LINEWIDTHS:g} linewidths "
                        f"({min_sep / 1e6:g} MHz); set [options] allow_close_detunings "
                        f"to override"
                    )

    beams = tuple(_build_beam(spec, canvas) for spec in beam_specs)
    return Scenario(
        gas=gas,
        canvas=canvas,
        beam_specs=tuple(beam_specs),
        beams=beams,
        probe=probe,
        outputs=outputs,
        allow_close_detunings=allow_close,
        source=str(path),
    )


def _build_beam(spec: BeamSpec, canvas: Canvas) -> ObjectBeam:
    if spec.envelope_waist is not None:
        base = objects_io.gaussian_profile(
            canvas.width, canvas.height, canvas.pitch, spec.envelope_waist, spec.peak_s
        )
    else:
        base = objects_io.uniform_profile(
            canvas.width, canvas.height, canvas.pitch, spec.peak_s
        )
    if spec.mask_path is not None:
        mask = objects_io.load_mask(spec.mask_path, pixel_pitch=canvas.pitch)
        if mask.shape != base.shape:
            raise ScenarioError(
                f"[{spec.name}] mask {Path(spec.mask_path).name} is "
                f"{mask.shape[1]}x{mask.shape[0]} px but the canvas is "
                f"{canvas.width}x{canvas.height}"
            )
        base = objects_io.apply_mask(base, mask)
    return ObjectBeam(detuning=spec.detuning, intensity=base)
