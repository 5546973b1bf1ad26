import json
import tempfile
import unittest
from pathlib import Path

import helpers  # noqa: F401
from helpers import FS, ir, white

import numpy as np
import soundfile as sf
from numpy.testing import assert_allclose, assert_array_equal

from acoustics.room import PathPair
from control.cancellers import ExternalCanceller, FxlmsCanceller, NullCanceller, OracleCanceller, build_canceller
from control.export import load_run, save_run
from control.fxlms import FxlmsConfig, FxlmsFilter, run_fxlms
from control.ingest import ingest_external_y
from control.pipeline import run_pipeline
from core.dsp import fft_convolve, signal_power
from core.errors import ConfigurationError, DivergenceError, IngestionError, InternalError
from core.signals import Waveform
from experiments.metrics import nmse_db, tail_nmse_db
from schemas import CancellerSpec, FxlmsParams

# toy plant: pure delay of 2 samples at half gain, perfect secondary path
TOY_P = ir([0.0, 0.0, 0.5])
TOY_S = ir([1.0, 0.0, 0.0])
TOY_PATHS = PathPair(TOY_P, TOY_S)


def toy_config(**kw) -> FxlmsConfig:
    params = dict(filter_len=8, step_size=0.1, normalize=True)
    params.update(kw)
    return FxlmsConfig(**params)


class _ShortCanceller(NullCanceller):
    name = "short"

    def generate(self, x, d, secondary):
        return Waveform(np.zeros(len(x) - 1), x.sample_rate_hz)


class TestFxlms(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.x = white(48000, seed=11)
        cls.d = fft_convolve(cls.x, TOY_P)
        cls.trace = FxlmsFilter(toy_config()).run(cls.x, cls.d, TOY_S)

    def test_zero_step_keeps_output_silent(self):
        y = run_fxlms(self.x, self.d, toy_config(step_size=0.0), TOY_S)
        self.assertTrue(np.all(y.samples == 0.0))

    def test_converges_to_wiener_solution(self):
        expected = np.zeros(8)
        expected[2] = 0.5
        assert_allclose(self.trace.weights, expected, atol=0.02)

    def test_final_quartile_nmse(self):
        self.assertLessEqual(tail_nmse_db(self.trace.e, self.d, 0.25).value, -20.0)

    def test_error_power_below_disturbance(self):
        self.assertLessEqual(signal_power(self.trace.e), signal_power(self.d))

    def test_inverted_secondary_estimate_diverges(self):
        cfg = toy_config(secondary_estimate=TOY_S.scaled(-1.0))
        with self.assertRaises(DivergenceError) as ctx:
            run_fxlms(self.x, self.d, cfg, TOY_S)
        self.assertEqual(ctx.exception.step_size, 0.1)
        self.assertIn("0.1", str(ctx.exception))

    def test_estimate_gain_builds_mismatched_estimate(self):
        cfg = FxlmsConfig.from_params(FxlmsParams(filter_len=8, step_size=0.1, estimate_gain=-1.0), TOY_S)
        assert_array_equal(cfg.secondary_estimate.taps, -TOY_S.taps)
        self.assertIsNone(FxlmsConfig.from_params(FxlmsParams(), TOY_S).secondary_estimate)

    def test_leak_shrinks_weights(self):
        leaky = FxlmsFilter(toy_config(leak=0.5)).run(self.x, self.d, TOY_S)
        self.assertLess(np.linalg.norm(leaky.weights), np.linalg.norm(self.trace.weights))

    def test_causality(self):
        n = 20000
        x_cut = Waveform(self.x.samples[:n], FS)
        d_cut = Waveform(self.d.samples[:n], FS)
        y_cut = run_fxlms(x_cut, d_cut, toy_config(), TOY_S)
        assert_array_equal(y_cut.samples, self.trace.y.samples[:n])

    def test_deterministic(self):
        again = FxlmsFilter(toy_config()).run(self.x, self.d, TOY_S)
        assert_array_equal(again.y.samples, self.trace.y.samples)

    def test_rate_mismatch(self):
        with self.assertRaises(ConfigurationError):
            run_fxlms(self.x, self.d, toy_config(), ir([1.0, 0.0, 0.0], fs=8000))


class TestPipeline(unittest.TestCase):

    def setUp(self):
        self.x = white(16000, seed=12)

    def test_null_canceller(self):
        run = run_pipeline(self.x, TOY_PATHS, NullCanceller())
        assert_array_equal(run.e.samples, run.d.samples)
        self.assertEqual(nmse_db(run.e, run.d).value, 0.0)

    def test_oracle_with_unit_secondary(self):
        run = run_pipeline(self.x, TOY_PATHS, OracleCanceller())
        assert_allclose(run.e.samples, 0.0, atol=1e-12)
        self.assertTrue(nmse_db(run.e, run.d).floored)

    def test_signal_chain_invariants(self):
        run = run_pipeline(self.x, TOY_PATHS, FxlmsCanceller(config=toy_config()))
        assert_allclose(run.e.samples, run.d.samples - run.a.samples, atol=1e-12)
        direct = np.convolve(run.y.samples, TOY_S.taps)[: len(run.y)]
        self.assertLess(np.sqrt(np.mean((run.a.samples - direct) ** 2)), 1e-9)
        self.assertEqual({len(s) for s in run.signals().values()}, {len(self.x)})

    def test_fxlms_on_toy_setup(self):
        x = white(48000, seed=13)
        run = run_pipeline(x, TOY_PATHS, FxlmsCanceller(config=toy_config()))
        self.assertLessEqual(tail_nmse_db(run.e, run.d, 0.25).value, -20.0)

    def test_null_canceller_is_causal(self):
        full = run_pipeline(self.x, TOY_PATHS, NullCanceller())
        cut = run_pipeline(Waveform(self.x.samples[:5000], FS), TOY_PATHS, NullCanceller())
        assert_array_equal(cut.y.samples, full.y.samples[:5000])

    def test_deterministic_run(self):
        a = run_pipeline(self.x, TOY_PATHS, FxlmsCanceller(config=toy_config()))
        b = run_pipeline(self.x, TOY_PATHS, FxlmsCanceller(config=toy_config()))
        for name, wave in a.signals().items():
            assert_array_equal(wave.samples, b.signals()[name].samples)

    def test_length_mismatch_is_internal_error(self):
        with self.assertRaises(InternalError):
            run_pipeline(self.x, TOY_PATHS, _ShortCanceller())

    def test_rate_mismatch(self):
        with self.assertRaises(ConfigurationError):
            run_pipeline(white(1000, fs=8000), TOY_PATHS, NullCanceller())


class TestExternalIngestion(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _write(self, name: str, data: np.ndarray, rate: int) -> Path:
        path = self.tmp / name
        sf.write(str(path), data.astype(np.float32), rate, subtype="FLOAT")
        return path

    def test_well_formed_file_unchanged(self):
        data = 0.1 * np.random.default_rng(0).standard_normal(48000)
        got = ingest_external_y(self._write("y.wav", data, FS), FS, 48000)
        self.assertEqual(got.provenance, ())
        assert_array_equal(got.waveform.samples, data.astype(np.float32).astype(np.float64))

    def test_low_rate_file_is_resampled(self):
        data = 0.1 * np.random.default_rng(1).standard_normal(24000)
        got = ingest_external_y(self._write("y8k.wav", data, 8000), FS, 48000)
        self.assertIn("resampled", got.provenance)
        self.assertEqual(len(got.waveform), 48000)
        self.assertEqual(got.waveform.sample_rate_hz, FS)

    def test_stereo_keeps_channel_zero(self):
        rng = np.random.default_rng(2)
        data = 0.1 * rng.standard_normal((48000, 2))
        path = self._write("stereo.wav", data, FS)
        with self.assertLogs("core.wav_io", level="WARNING"):
            got = ingest_external_y(path, FS, 48000)
        self.assertIn("downmixed", got.provenance)
        assert_array_equal(got.waveform.samples, data[:, 0].astype(np.float32).astype(np.float64))

    def test_length_mismatch_rejected(self):
        path = self._write("short.wav", np.zeros(30000), FS)
        with self.assertRaises(IngestionError) as ctx:
            ingest_external_y(path, FS, 48000)
        self.assertIn("30000", str(ctx.exception))

    def test_unreadable_file(self):
        bad = self.tmp / "not_audio.wav"
        bad.write_text("nope")
        with self.assertRaises(IngestionError):
            ingest_external_y(bad, FS, 48000)

    def test_external_canceller_from_spec(self):
        data = 0.05 * np.random.default_rng(3).standard_normal(16000)
        spec = CancellerSpec(kind="external", path=str(self._write("ext.wav", data, FS)))
        canceller = build_canceller(spec, FS, 16000)
        self.assertIsInstance(canceller, ExternalCanceller)
        run = run_pipeline(white(16000, seed=4), TOY_PATHS, canceller)
        self.assertEqual(run.canceller, "external")

    def test_run_export_round_trip(self):
        run = run_pipeline(white(4000, seed=5), TOY_PATHS, FxlmsCanceller(config=toy_config()))
        manifest_path = save_run(run, self.tmp / "run", {"note": "toy"}, seed=5, config_hash="abc")
        manifest = json.loads(manifest_path.read_text())
        self.assertEqual(set(manifest["signal_sha256"]), {"x", "d", "y", "a", "e"})
        back, _ = load_run(self.tmp / "run")
        self.assertEqual(back.canceller, "fxlms")
        assert_allclose(back.d.samples, run.d.samples, atol=1e-6)


if __name__ == "__main__":
    unittest.main()
