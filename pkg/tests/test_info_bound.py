import math
import tempfile
import unittest
from pathlib import Path

import helpers  # noqa: F401
from helpers import FS, ir

import numpy as np
import pandas as pd
from scipy import integrate

from bounds.info_bound import (
    DensityEstimate,
    InfoQuantities,
    estimate_densities,
    histogram_entropy,
    info_bound_db,
    kde_pdf,
    mutual_information,
    path_energy,
)
from core.errors import ArgumentError
from core.signals import Waveform
from schemas import KdeConfig

N = 100_000


def gaussian_pair(rho: float, n: int = N, seed: int = 0) -> tuple[Waveform, Waveform]:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = rho * a + math.sqrt(1.0 - rho * rho) * rng.standard_normal(n)
    return Waveform(a, FS), Waveform(b, FS)


def analytic_mi(rho: float) -> float:
    return -0.5 * math.log(1.0 - rho * rho)


def info(alpha: float) -> InfoQuantities:
    return InfoQuantities(h_d=1.0, h_y=1.0, h_joint=1.0, mi=alpha, alpha=alpha,
                          h_d_differential=1.0, power_d=1.0, n_frames=1)


class TestKde(unittest.TestCase):

    def test_repeated_value_concentrates_mass(self):
        grid = np.linspace(0.0, 4.0, 401)
        with self.assertLogs("bounds.info_bound", level="WARNING"):
            dens = kde_pdf([np.full(200, 2.0)], grid, 0.1)
        self.assertLess(dens.normalization_residual, 1e-6)
        near = np.abs(grid - 2.0) <= 0.3
        mass_near = integrate.trapezoid(dens.pdf[near], grid[near])
        self.assertGreater(mass_near, 0.99)

    def test_standard_normal_peak(self):
        x = np.random.default_rng(1).standard_normal(N)
        grid = np.linspace(-5.0, 5.0, 257)
        dens = kde_pdf(np.array_split(x, 24), grid, 10.0 / 128)
        self.assertGreaterEqual(np.interp(0.0, grid, dens.pdf), 0.37)
        self.assertLessEqual(np.interp(0.0, grid, dens.pdf), 0.43)

    def test_joint_of_independent_normals_factorizes(self):
        rng = np.random.default_rng(2)
        a, b = rng.standard_normal(N), rng.standard_normal(N)
        grid = np.linspace(-5.0, 5.0, 64)
        h = 0.2
        joint = kde_pdf([(a, b)], (grid, grid), (h, h))
        pa = kde_pdf([a], grid, h)
        pb = kde_pdf([b], grid, h)
        self.assertLess(joint.normalization_residual, 1e-6)
        self.assertLess(np.max(np.abs(joint.pdf - np.outer(pa.pdf, pb.pdf))), 0.02)

    def test_rejects_bad_input(self):
        with self.assertRaises(ArgumentError):
            kde_pdf([], np.linspace(0, 1, 16), 0.1)
        with self.assertRaises(ArgumentError):
            kde_pdf([np.zeros(4)], np.linspace(0, 1, 16), 0.0)
        with self.assertRaises(ArgumentError):
            kde_pdf([np.array([])], np.linspace(0, 1, 16), 0.1)

    def test_density_csv_export(self):
        grid = np.linspace(-1.0, 1.0, 16)
        dens = kde_pdf([np.zeros(8)], grid, 0.2)
        with tempfile.TemporaryDirectory() as tmp:
            df = pd.read_csv(dens.to_csv(Path(tmp) / "p.csv"))
        self.assertEqual(list(df.columns), ["grid", "pdf"])
        self.assertEqual(len(df), 16)


class TestHistogramEntropy(unittest.TestCase):

    def test_uniform_mass(self):
        m = 64
        grid = np.linspace(0.0, 1.0, m)
        dens = DensityEstimate((grid,), np.full(m, 1.0), 0.0)
        self.assertAlmostEqual(histogram_entropy(dens), math.log(m), places=12)

    def test_single_bin(self):
        grid = np.linspace(0.0, 1.0, 32)
        pdf = np.zeros(32)
        pdf[10] = 31.0
        self.assertEqual(histogram_entropy(DensityEstimate((grid,), pdf, 0.0)), 0.0)

    def test_standard_normal_grid(self):
        grid = np.linspace(-5.0, 5.0, 128)
        pdf = np.exp(-0.5 * grid ** 2) / math.sqrt(2.0 * math.pi)
        delta = grid[1] - grid[0]
        expected = 0.5 * math.log(2.0 * math.pi * math.e) - math.log(delta)
        got = histogram_entropy(DensityEstimate((grid,), pdf, 0.0))
        self.assertLess(abs(got - expected) / expected, 0.05)


class TestMutualInformation(unittest.TestCase):

    def test_independent_signals(self):
        d, y = gaussian_pair(0.0, seed=3)
        q = mutual_information(d, y)
        self.assertLessEqual(q.mi, 0.05)
        self.assertLess(q.alpha, 0.02)

    def test_identical_signals_clamp(self):
        d, _ = gaussian_pair(0.0, n=20000, seed=4)
        q = mutual_information(d, d)
        self.assertAlmostEqual(q.alpha, 1.0 - 1e-6, places=12)
        bound = info_bound_db(q, ir([1.0]))
        self.assertTrue(bound.floored)
        self.assertEqual(bound.value, -80.0)

    def test_correlated_gaussian(self):
        for rho in (0.5, 0.9):
            d, y = gaussian_pair(rho, seed=5)
            expected = analytic_mi(rho)
            tol = max(0.05, 0.15 * expected)
            self.assertAlmostEqual(mutual_information(d, y).mi, expected, delta=tol, msg=f"rho={rho}")

    def test_symmetry(self):
        d, y = gaussian_pair(0.6, n=40000, seed=6)
        self.assertEqual(mutual_information(d, y).mi, mutual_information(y, d).mi)

    def test_alpha_nondecreasing_in_mixing(self):
        rng = np.random.default_rng(7)
        d = rng.standard_normal(48000)
        noise = rng.standard_normal(48000)
        alphas = []
        for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
            y = Waveform(lam * d + (1.0 - lam) * noise, FS)
            alphas.append(mutual_information(Waveform(d, FS), y).alpha)
        for lo, hi in zip(alphas, alphas[1:]):
            self.assertGreaterEqual(hi, lo)

    def test_grid_refinement_is_stable(self):
        d, y = gaussian_pair(0.9, seed=8)
        coarse = mutual_information(d, y, KdeConfig(bin_count=128))
        fine = mutual_information(d, y, KdeConfig(bin_count=256))
        self.assertLess(abs(fine.mi - coarse.mi) / coarse.mi, 0.10)

    def test_zero_signal_is_degenerate(self):
        d, _ = gaussian_pair(0.0, n=8192, seed=9)
        with self.assertLogs("bounds.info_bound", level="WARNING"):
            q = mutual_information(d, Waveform(np.zeros(8192), FS))
        self.assertEqual(q.degenerate, ("y",))
        self.assertAlmostEqual(q.mi, 0.0, places=9)
        self.assertAlmostEqual(q.alpha, 0.0, places=9)

    def test_short_signals(self):
        d, y = gaussian_pair(0.5, n=1000)
        with self.assertRaises(ArgumentError):
            mutual_information(d, y)

    def test_length_mismatch(self):
        with self.assertRaises(ArgumentError):
            mutual_information(Waveform(np.zeros(5000), FS), Waveform(np.zeros(4096), FS))

    def test_densities_share_grids(self):
        d, y = gaussian_pair(0.5, n=20000, seed=10)
        dens = estimate_densities(d, y)
        self.assertEqual(dens.n_frames, 4)
        grid_d, grid_y = dens.p_dy.grid
        np.testing.assert_array_equal(grid_d, dens.p_d.grid[0])
        np.testing.assert_array_equal(grid_y, dens.p_y.grid[0])
        for dens_i in (dens.p_d, dens.p_y, dens.p_dy):
            self.assertLess(dens_i.normalization_residual, 1e-6)


class TestInfoBound(unittest.TestCase):

    def test_no_information_unit_path(self):
        self.assertAlmostEqual(info_bound_db(info(0.0), ir([1.0])).value, 0.0, places=12)

    def test_ninety_percent_information(self):
        self.assertAlmostEqual(info_bound_db(info(0.9), ir([1.0])).value, -10.0, places=9)

    def test_path_energy_term(self):
        expected = 10 * math.log10(0.5) + 10 * math.log10(0.25)
        got = info_bound_db(info(0.5), ir([0.5])).value
        self.assertAlmostEqual(got, expected, places=9)
        self.assertAlmostEqual(got, -9.03, places=2)

    def test_path_energy_modes(self):
        p = ir([0.0, 0.1, 0.0, 1.0, 0.2, 0.0, 0.0, 0.0, 0.3])
        self.assertAlmostEqual(path_energy(p, "full"), 0.01 + 1.0 + 0.04 + 0.09)
        self.assertAlmostEqual(path_energy(p, "direct"), 0.01 + 1.0 + 0.04)
        with self.assertRaises(ArgumentError):
            path_energy(p, "tail")

    def test_unknown_variant(self):
        with self.assertRaises(ArgumentError):
            info_bound_db(info(0.1), ir([1.0]), variant="cubic")

    def test_exponential_variant_near_zero_for_independent_gaussian(self):
        d, y = gaussian_pair(0.0, seed=11)
        q = mutual_information(d, y)
        self.assertLess(abs(info_bound_db(q, ir([1.0]), "exponential").value), 0.5)

    def test_exponential_variant_without_information_stays_at_or_below_zero(self):
        d = Waveform(np.random.default_rng(13).standard_normal(48000), FS)
        with self.assertLogs("bounds.info_bound", level="WARNING"):
            q = mutual_information(d, Waveform(np.zeros(48000), FS))
        frame_len = KdeConfig().frame_len
        covered = d.samples[: (48000 // frame_len) * frame_len]
        gaussian = 0.5 * math.log(2.0 * math.pi * math.e * np.var(covered))
        self.assertAlmostEqual(q.h_d_differential, gaussian, delta=0.01)
        bound = info_bound_db(q, ir([1.0]), "exponential").value
        self.assertLessEqual(bound, 0.005)
        self.assertGreater(bound, -0.2)

    def test_exponential_variant_is_scale_invariant(self):
        d, y = gaussian_pair(0.7, n=40000, seed=12)
        base = info_bound_db(mutual_information(d, y), ir([1.0]), "exponential").value
        scaled = info_bound_db(mutual_information(Waveform(0.1 * d.samples, FS), y), ir([1.0]), "exponential").value
        self.assertAlmostEqual(base, scaled, delta=0.05)


if __name__ == "__main__":
    unittest.main()
