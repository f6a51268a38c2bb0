import numpy as np
import pytest

from holeburn import GasParams, letter_mask


@pytest.fixture(scope="session")
def gas():
    return GasParams()


def write_pgm8(path, values01):
    """Write a [0,1] array as an 8-bit binary PGM."""
    arr = np.round(np.asarray(values01) * 255).astype("u1")
    h, w = arr.shape
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode() + arr.tobytes())


def write_letter_masks(directory, size):
    for name in "CAT":
        write_pgm8(directory / f"{name.lower()}.pgm", letter_mask(name, size).values)


def cat_scenario_text(size, peak_s=2.0, probe="uniform", extra=""):
    return f"""
[gas]

[canvas]
width_px = {size}
height_px = {size}
pitch_um = 50

[beam:C]
detuning_mhz = 40
peak_s = {peak_s}
mask = c.pgm

[beam:A]
detuning_mhz = 0
peak_s = {peak_s}
mask = a.pgm

[beam:T]
detuning_mhz = -40
peak_s = {peak_s}
mask = t.pgm

[probe]
profile = {probe}
{extra}
"""


@pytest.fixture
def cat_scenario(tmp_path):
    """Parsed C/A/T scenario on a small canvas."""
    from holeburn import parse_scenario

    size = 48
    write_letter_masks(tmp_path, size)
    path = tmp_path / "cat.ini"
    path.write_text(cat_scenario_text(size))
    return parse_scenario(path)


def unmasked_scenario_text(size=8, detunings_mhz=(40, 0, -40), peak_s=2.0):
    beams = "\n".join(
        f"[beam:{i}]\ndetuning_mhz = {d}\npeak_s = {peak_s}\n"
        for i, d in enumerate(detunings_mhz, start=1)
    )
    return f"""
[canvas]
width_px = {size}
height_px = {size}

{beams}
"""


@pytest.fixture
def unmasked_scenario(tmp_path):
    from holeburn import parse_scenario

    path = tmp_path / "unmasked.ini"
    path.write_text(unmasked_scenario_text())
    return parse_scenario(path)


@pytest.fixture
def nobeam_scenario(tmp_path):
    from holeburn import parse_scenario

    path = tmp_path / "nobeam.ini"
    path.write_text("[canvas]\nwidth_px = 6\nheight_px = 6\n")
    return parse_scenario(path)


def normalized_cross_correlation(a, b):
    a = a - a.mean()
    b = b - b.mean()
    return float((a * b).sum() / np.sqrt((a * a).sum() * (b * b).sum()))
