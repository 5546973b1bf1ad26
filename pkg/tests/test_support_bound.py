import tempfile
import unittest
from pathlib import Path

import helpers  # noqa: F401
from helpers import FS, ideal_band_ir, ir, white

import numpy as np
from numpy.testing import assert_array_equal

from acoustics.room import PathPair
from bounds.support_bound import (
    save_support_masks,
    spectral_support,
    support_bound_db,
    support_ratio,
)
from core.dsp import welch_psd
from core.errors import ArgumentError, UndefinedRatioError
from core.signals import ImpulseResponse
from experiments.sweep import scenario_paths
from schemas import ExperimentConfig

NFFT = 1024


def random_ir(seed: int = 0, n: int = 256) -> ImpulseResponse:
    rng = np.random.default_rng(seed)
    return ir(rng.standard_normal(n) * np.exp(-np.arange(n) / 40.0))


class TestSpectralSupport(unittest.TestCase):

    def test_unit_impulse_covers_every_bin(self):
        sup = spectral_support(ir([1.0]), NFFT, 45.0)
        self.assertEqual(sup.count, NFFT // 2 + 1)
        self.assertEqual(sup.freqs_hz[-1], FS / 2)

    def test_two_tap_average(self):
        sup = spectral_support(ir([0.5, 0.5]), NFFT, 45.0)
        self.assertTrue(sup.mask[0])
        self.assertFalse(sup.mask[-1])

    def test_tiny_threshold_keeps_only_the_peak(self):
        sup = spectral_support(ir([0.5, 0.5]), NFFT, 1e-9)
        self.assertEqual(sup.count, 1)
        self.assertTrue(sup.mask[0])

    def test_fft_smaller_than_ir(self):
        with self.assertRaises(ArgumentError):
            spectral_support(random_ir(n=2048), NFFT, 45.0)

    def test_non_positive_threshold(self):
        with self.assertRaises(ArgumentError):
            spectral_support(ir([1.0]), NFFT, 0.0)

    def test_zero_fft_size(self):
        with self.assertRaises(ArgumentError):
            spectral_support(ir([1.0]), 0, 45.0)

    def test_gain_invariance(self):
        p = random_ir(1)
        base = spectral_support(p, NFFT, 45.0)
        for gain in (1e-3, 10.0, -2.0):
            assert_array_equal(spectral_support(p.scaled(gain), NFFT, 45.0).mask, base.mask)

    def test_threshold_monotonic(self):
        p = random_ir(2)
        counts = [spectral_support(p, NFFT, t).count for t in (3.0, 10.0, 20.0, 45.0, 80.0)]
        for lo, hi in zip(counts, counts[1:]):
            self.assertLessEqual(lo, hi)

    def test_absolute_reference(self):
        # |H| = 0.01 everywhere: -40 dB below unit gain
        self.assertEqual(spectral_support(ir([0.01]), NFFT, 45.0, reference="absolute").count, NFFT // 2 + 1)
        self.assertEqual(spectral_support(ir([0.01]), NFFT, 30.0, reference="absolute").count, 0)


class TestSupportRatio(unittest.TestCase):

    def test_half_band_secondary(self):
        primary = ImpulseResponse.unit(FS, NFFT)
        secondary = ideal_band_ir(NFFT, low=True)
        x_psd = welch_psd(white(2 ** 18, seed=21), window_len=NFFT)
        result = support_bound_db(PathPair(primary, secondary), x_psd, NFFT, 45.0)
        self.assertAlmostEqual(result.bound_db_bincount.value, -3.01, delta=0.1)
        self.assertAlmostEqual(result.bound_db_weighted.value, -3.01, delta=0.1)
        self.assertTrue(result.psd_weighted)

    def test_identical_paths_floor(self):
        p = random_ir(3)
        result = support_bound_db(PathPair(p, p), welch_psd(white(16000, seed=1)), NFFT, 45.0)
        self.assertEqual(result.uncancelable_bins, 0)
        self.assertTrue(result.bound_db_weighted.floored)
        self.assertTrue(result.bound_db_bincount.floored)
        self.assertEqual(result.bound("weighted").value, -80.0)

    def test_disjoint_supports_are_fully_uncancelable(self):
        p_sup = spectral_support(ideal_band_ir(NFFT, low=True), NFFT, 45.0)
        s_sup = spectral_support(ideal_band_ir(NFFT, low=False), NFFT, 45.0)
        with self.assertLogs("bounds.support_bound", level="WARNING"):
            result = support_ratio(p_sup, s_sup)
        self.assertFalse(result.psd_weighted)
        self.assertAlmostEqual(result.bound_db_bincount.value, 0.0, places=12)
        self.assertAlmostEqual(result.bound_db_weighted.value, 0.0, places=12)

    def test_empty_primary_support(self):
        p_sup = spectral_support(ir([0.0, 0.0, 0.0]), NFFT, 45.0)
        s_sup = spectral_support(ir([1.0, 0.0, 0.0]), NFFT, 45.0)
        self.assertEqual(p_sup.count, 0)
        with self.assertRaises(UndefinedRatioError):
            support_ratio(p_sup, s_sup)

    def test_fft_size_mismatch(self):
        with self.assertRaises(ArgumentError):
            support_ratio(spectral_support(ir([1.0]), 512), spectral_support(ir([1.0]), 1024))

    def test_unknown_variant(self):
        p = random_ir(4)
        result = support_bound_db(PathPair(p, p), welch_psd(white(16000)), NFFT, 45.0)
        with self.assertRaises(ArgumentError):
            result.bound("median")

    def test_deterministic(self):
        paths = PathPair(random_ir(5), random_ir(6))
        x_psd = welch_psd(white(32000, seed=2))
        a = support_bound_db(paths, x_psd, NFFT, 45.0)
        b = support_bound_db(paths, x_psd, NFFT, 45.0)
        self.assertEqual(a, b)


class TestSimulatedPathGain(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.paths = scenario_paths(ExperimentConfig(), 0.2)
        cls.x_psd = welch_psd(white(48000, seed=3))
        cls.base = support_bound_db(cls.paths, cls.x_psd, NFFT, 45.0)

    def assertSameRatios(self, result):
        for name in ("ratio_weighted", "ratio_bincount"):
            expected = getattr(self.base, name)
            self.assertAlmostEqual(getattr(result, name), expected, delta=1e-9 * max(expected, 1e-12), msg=name)
        self.assertEqual(result.uncancelable_bins, self.base.uncancelable_bins)

    def test_primary_gain(self):
        paths = PathPair(self.paths.primary.scaled(10.0), self.paths.secondary)
        self.assertSameRatios(support_bound_db(paths, self.x_psd, NFFT, 45.0))

    def test_secondary_gain(self):
        paths = PathPair(self.paths.primary, self.paths.secondary.scaled(-3.0))
        self.assertSameRatios(support_bound_db(paths, self.x_psd, NFFT, 45.0))

    def test_bound_stays_at_or_below_zero(self):
        self.assertLessEqual(self.base.bound_db_weighted.value, 0.0)
        self.assertLessEqual(self.base.bound_db_bincount.value, 0.0)
        self.assertGreater(self.base.support_bins, 0)


class TestMaskExport(unittest.TestCase):

    def test_csv_layout(self):
        p_sup = spectral_support(ideal_band_ir(NFFT, low=True), NFFT, 45.0)
        s_sup = spectral_support(ideal_band_ir(NFFT, low=False), NFFT, 45.0)
        with tempfile.TemporaryDirectory() as tmp:
            lines = save_support_masks(p_sup, s_sup, Path(tmp) / "masks.csv").read_text().splitlines()
        self.assertEqual(lines[0], "freq_hz,in_supp_P,in_supp_S,uncancelable")
        self.assertEqual(len(lines), NFFT // 2 + 2)
        self.assertEqual(lines[1].split(",")[1:], ["true", "false", "true"])
        self.assertEqual(lines[-1].split(",")[1:], ["false", "true", "false"])


if __name__ == "__main__":
    unittest.main()
