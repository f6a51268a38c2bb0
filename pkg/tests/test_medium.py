import numpy as np
import pytest

from holeburn import (
    GasParams,
    IntensityGrid,
    ObjectBeam,
    VelocityGrid,
    absorption_coefficient,
    brute_force_alpha,
    build_velocity_grid,
    maxwell_pdf,
    od_map,
)
from holeburn.medium import FINE_STEPS_PER_LINEWIDTH, HOLE_SPAN_HALFWIDTHS, SPAN_SIGMAS

OD_RESONANT_UNSATURATED = 1.97588130618  # defaults, D0 = 120 (high-precision quadrature)


def spacing_near(grid, center, window):
    sel = (grid.nodes >= center - window) & (grid.nodes <= center + window)
    return np.diff(grid.nodes[sel]).max()


class TestVelocityGridType:
    def test_rejects_unsorted_nodes(self):
        with pytest.raises(ValueError):
            VelocityGrid(nodes=[0.0, 2.0, 1.0], weights=[1.0, 1.0, 1.0])

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            VelocityGrid(nodes=[0.0, 1.0, 2.0], weights=[1.0, 0.0, 1.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            VelocityGrid(nodes=[0.0, 1.0], weights=[1.0])


class TestBuildVelocityGrid:
    def test_grid_satisfies_spacing_and_span_contract(self, gas):
        beam_detunings = [40e6, 0.0, -40e6]
        probe = -40e6
        grid = build_velocity_grid(gas, beam_detunings, probe)
        halfwidth = gas.gamma_angular / (2 * gas.wavenumber)
        fine_limit = 2 * halfwidth / FINE_STEPS_PER_LINEWIDTH

        centers = [-gas.wavelength * d for d in beam_detunings] + [gas.wavelength * probe]
        for center in centers:
            assert spacing_near(grid, center, 10 * halfwidth) <= fine_limit * (1 + 1e-12)
            assert grid.nodes.min() <= center - HOLE_SPAN_HALFWIDTHS * halfwidth
            assert grid.nodes.max() >= center + HOLE_SPAN_HALFWIDTHS * halfwidth
        assert grid.nodes.min() <= -SPAN_SIGMAS * gas.sigma_v
        assert grid.nodes.max() >= SPAN_SIGMAS * gas.sigma_v

    def test_refines_near_probe_without_beams(self, gas):
        grid = build_velocity_grid(gas, [], 0.0)
        halfwidth = gas.gamma_angular / (2 * gas.wavenumber)
        assert spacing_near(grid, 0.0, 5 * halfwidth) <= 2 * halfwidth / FINE_STEPS_PER_LINEWIDTH

    def test_bands_land_on_mirrored_velocities(self, gas):
        grid = build_velocity_grid(gas, [-40e6, 0.0, 40e6], 0.0)
        halfwidth = gas.gamma_angular / (2 * gas.wavenumber)
        fine_limit = 2 * halfwidth / FINE_STEPS_PER_LINEWIDTH
        for center in (31.2, 0.0, -31.2):
            assert spacing_near(grid, center, 5 * halfwidth) <= fine_limit * (1 + 1e-12)

    def test_deterministic(self, gas):
        a = build_velocity_grid(gas, [10e6], -5e6)
        b = build_velocity_grid(gas, [10e6], -5e6)
        assert np.array_equal(a.nodes, b.nodes)
        assert np.array_equal(a.weights, b.weights)

    def test_doubling_density_changes_alpha_below_1e6(self, gas):
        cases = [
            ([], [], 0.0),
            ([2.0], [40e6], -40e6),
            ([2.0, 1.0, 4.0], [40e6, 0.0, -40e6], 15e6),
        ]
        for svals, dets, probe in cases:
            base = absorption_coefficient(
                svals, dets, probe, gas, build_velocity_grid(gas, dets, probe))
            fine = absorption_coefficient(
                svals, dets, probe, gas,
                build_velocity_grid(gas, dets, probe, spacing_scale=0.5))
            assert abs(base - fine) / fine < 1e-6

    def test_rejects_bad_scale(self, gas):
        with pytest.raises(ValueError):
            build_velocity_grid(gas, [], 0.0, spacing_scale=0.0)


class TestAbsorptionCoefficient:
    def test_unsaturated_resonant_od(self, gas):
        grid = build_velocity_grid(gas, [], 0.0)
        od = absorption_coefficient([], [], 0.0, gas, grid)
        assert od == pytest.approx(OD_RESONANT_UNSATURATED, rel=1e-6)
        # Doppler-limit closed form D0 f(0) lambda Gamma/4 is ~1% above the
        # true Voigt value (the Lorentzian wings push weight outward)
        doppler_limit = gas.depth_scale * maxwell_pdf(0.0, gas) * gas.wavelength \
            * gas.gamma_angular / 4
        assert od == pytest.approx(doppler_limit, rel=0.012)
        assert abs(od / doppler_limit - 1) > 0.008

    def test_unsaturated_profile_tracks_maxwell(self, gas):
        grid0 = build_velocity_grid(gas, [], 0.0)
        od0 = absorption_coefficient([], [], 0.0, gas, grid0)
        for detuning in (10e6, 40e6, 75e6, 100e6, -60e6):
            grid = build_velocity_grid(gas, [], detuning)
            od = absorption_coefficient([], [], detuning, gas, grid)
            gauss = maxwell_pdf(gas.wavelength * detuning, gas) / maxwell_pdf(0.0, gas)
            assert od / od0 == pytest.approx(gauss, rel=0.01)

    def test_hole_appears_at_mirrored_probe_detuning(self, gas):
        dets = [40e6]
        svals = [2.0]

        def od_at(probe, s):
            grid = build_velocity_grid(gas, dets, probe)
            return absorption_coefficient(s, dets, probe, gas, grid)

        dip_mirrored = od_at(-40e6, [0.0]) - od_at(-40e6, svals)
        dip_same_side = od_at(40e6, [0.0]) - od_at(40e6, svals)
        assert dip_mirrored > 0.5
        # the same-side response is only the Lorentzian tail of the hole,
        # about 1e-2 of the mirrored dip (computed: 9.55e-3)
        assert dip_same_side / dip_mirrored == pytest.approx(9.55e-3, rel=0.05)
        assert dip_same_side / dip_mirrored < 1.5e-2

    def test_saturation_monotonicity(self, gas):
        dets = [25e6, -40e6]
        grid = build_velocity_grid(gas, dets, -25e6)
        rng = np.random.default_rng(5)
        for _ in range(20):
            s = rng.uniform(0, 4, 2)
            bump = rng.uniform(0.1, 2)
            which = rng.integers(0, 2)
            grown = s.copy()
            grown[which] += bump
            lo = absorption_coefficient(grown, dets, -25e6, gas, grid)
            hi = absorption_coefficient(s, dets, -25e6, gas, grid)
            assert lo < hi

    def test_mirror_argmin_within_one_mhz(self, gas):
        beam = 25e6
        step = 0.5e6
        probes = -beam + step * np.arange(-30, 31)
        od = []
        for p in probes:
            grid = build_velocity_grid(gas, [beam], p)
            od.append(absorption_coefficient([2.0], [beam], p, gas, grid))
        best = probes[int(np.argmin(od))]
        assert abs(best - (-beam)) <= 1e6

    def test_unsaturated_profile_symmetric(self, gas):
        for detuning in (10e6, 55e6, 120e6):
            plus = absorption_coefficient(
                [], [], detuning, gas, build_velocity_grid(gas, [], detuning))
            minus = absorption_coefficient(
                [], [], -detuning, gas, build_velocity_grid(gas, [], -detuning))
            assert plus == pytest.approx(minus, rel=1e-9)

    def test_agrees_with_brute_force_reference(self, gas):
        rng = np.random.default_rng(99)
        for _ in range(40):
            n = int(rng.integers(0, 4))
            dets = rng.uniform(-100e6, 100e6, n)
            svals = rng.uniform(0, 8, n)
            probe = float(rng.uniform(-150e6, 150e6))
            grid = build_velocity_grid(gas, dets, probe)
            fast = absorption_coefficient(svals, dets, probe, gas, grid)
            slow = brute_force_alpha(svals, dets, probe, gas)
            assert abs(fast - slow) / abs(slow) < 1e-6

    def test_rejects_mismatched_beam_lists(self, gas):
        grid = build_velocity_grid(gas, [40e6], 0.0)
        with pytest.raises(ValueError):
            absorption_coefficient([1.0, 2.0], [40e6], 0.0, gas, grid)

    def test_rejects_negative_s(self, gas):
        grid = build_velocity_grid(gas, [40e6], 0.0)
        with pytest.raises(ValueError):
            absorption_coefficient([-1.0], [40e6], 0.0, gas, grid)


class TestOdMap:
    def test_zero_intensity_beams_give_uniform_map(self, gas):
        zero = IntensityGrid(np.zeros((4, 5)), 50e-6)
        beams = [ObjectBeam(40e6, zero), ObjectBeam(-40e6, zero)]
        result = od_map(beams, 0.0, gas)
        grid = build_velocity_grid(gas, [40e6, -40e6], 0.0)
        expected = absorption_coefficient([0.0, 0.0], [40e6, -40e6], 0.0, gas, grid)
        assert np.all(result.grid == expected)

    def test_half_plane_mask_bleaches_only_left(self, gas):
        values = np.zeros((4, 6))
        values[:, :3] = 2.0
        beam = ObjectBeam(40e6, IntensityGrid(values, 50e-6))
        result = od_map([beam], -40e6, gas)
        left = result.grid[:, :3]
        right = result.grid[:, 3:]
        assert np.all(left < right.min())
        assert np.all(right == right[0, 0])

    def test_pixel_order_irrelevant(self, gas):
        rng = np.random.default_rng(3)
        values = rng.choice([0.0, 0.7, 2.0], size=(5, 7))
        beam = ObjectBeam(10e6, IntensityGrid(values, 50e-6))
        straight = od_map([beam], -10e6, gas).grid

        perm = rng.permutation(5 * 7)
        shuffled = values.ravel()[perm].reshape(5, 7)
        shuffled_map = od_map([ObjectBeam(10e6, IntensityGrid(shuffled, 50e-6))], -10e6, gas).grid
        unshuffled = np.empty(5 * 7)
        unshuffled[perm] = shuffled_map.ravel()
        assert np.array_equal(straight, unshuffled.reshape(5, 7))

    def test_rejects_dimension_mismatch(self, gas):
        a = ObjectBeam(40e6, IntensityGrid(np.zeros((4, 4)), 50e-6))
        b = ObjectBeam(-40e6, IntensityGrid(np.zeros((4, 5)), 50e-6))
        with pytest.raises(ValueError, match="mismatch"):
            od_map([a, b], 0.0, gas)

    def test_rejects_empty_beam_list(self, gas):
        with pytest.raises(ValueError):
            od_map([], 0.0, gas)
