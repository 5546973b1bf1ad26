"""
FxLMS Adaptive Filter

Filtered-x least mean squares for feedforward ANC:

    x'(n)   = S_hat * x(n)
    y(n)    = W(n)^T x_vec(n)
    e(n)    = d(n) - (S * y)(n)
    W(n+1)  = (1 - mu*leak) W(n) + mu_n e(n) x'_vec(n)

with mu_n = mu / (eps + ||x'_vec(n)||^2) when normalized. The true secondary path is
applied in-loop so e(n) is the residual the controller actually observes.
"""

import logging
from dataclasses import dataclass

import numpy as np

from config.settings_loader import get_setting
from core.errors import ArgumentError, ConfigurationError, DivergenceError
from core.signals import ImpulseResponse, Waveform
from schemas import FxlmsParams

logger = logging.getLogger(__name__)

_NLMS_EPS = 1e-10


@dataclass(frozen=True)
class FxlmsConfig:
    filter_len: int
    step_size: float
    leak: float = 0.0
    # None means the controller is given the true secondary path
    secondary_estimate: ImpulseResponse | None = None
    normalize: bool = True

    def __post_init__(self):
        if self.filter_len < 1:
            raise ArgumentError(f"filter_len must be >= 1, got {self.filter_len}")
        if self.step_size < 0:
            raise ArgumentError(f"step_size must be nonnegative, got {self.step_size}")
        if not 0.0 <= self.leak < 1.0:
            raise ArgumentError(f"leak must lie in [0, 1), got {self.leak}")

    @classmethod
    def from_params(cls, params: FxlmsParams, secondary_true: ImpulseResponse) -> "FxlmsConfig":
        estimate = None if params.estimate_gain == 1.0 else secondary_true.scaled(params.estimate_gain)
        return cls(
            filter_len=params.filter_len,
            step_size=params.step_size,
            leak=params.leak,
            secondary_estimate=estimate,
            normalize=params.normalize,
        )


@dataclass(frozen=True)
class FxlmsTrace:
    y: Waveform
    e: Waveform
    weights: np.ndarray


class FxlmsFilter:
    """Single sequential pass of FxLMS over an aligned (x, d) pair. W starts at zero."""

    def __init__(self, config: FxlmsConfig):
        self.config = config
        self.divergence_factor = float(get_setting("fxlms", "divergence_factor"))
        self.rms_window = int(get_setting("fxlms", "rms_window"))

    def run(self, x: Waveform, d: Waveform, secondary_true: ImpulseResponse) -> FxlmsTrace:
        if len(x) != len(d):
            raise ArgumentError(f"x and d must be aligned ({len(x)} vs {len(d)} samples)")
        rates = {x.sample_rate_hz, d.sample_rate_hz, secondary_true.sample_rate_hz}
        estimate = self.config.secondary_estimate or secondary_true
        rates.add(estimate.sample_rate_hz)
        if len(rates) != 1:
            raise ConfigurationError(f"Sample-rate mismatch between x, d and secondary paths: {sorted(rates)}")

        cfg = self.config
        n, L = len(x), cfg.filter_len
        s_hat = estimate.taps[::-1]
        s_true = secondary_true.taps[::-1]
        m_hat, m_true = s_hat.size, s_true.size

        xs = np.concatenate([np.zeros(m_hat - 1), x.samples])
        xl = np.concatenate([np.zeros(L - 1), x.samples])
        xf = np.zeros(L - 1 + n)
        y_hist = np.zeros(m_true - 1 + n)
        dv = d.samples
        # weights stored time-reversed so that y = w_rev . xl[i:i+L]
        w_rev = np.zeros(L)
        e_out = np.zeros(n)

        limit = self.divergence_factor * max(float(np.sqrt(np.mean(dv ** 2))) if n else 0.0, 1e-12)
        smooth = 1.0 / self.rms_window
        running_ms = 0.0
        decay = 1.0 - cfg.step_size * cfg.leak

        for i in range(n):
            xf[L - 1 + i] = s_hat @ xs[i:i + m_hat]
            y_i = w_rev @ xl[i:i + L]
            y_hist[m_true - 1 + i] = y_i
            e_i = dv[i] - s_true @ y_hist[i:i + m_true]
            e_out[i] = e_i

            running_ms += smooth * (e_i * e_i - running_ms)
            if not np.isfinite(e_i) or running_ms > limit * limit:
                raise DivergenceError(
                    cfg.step_size,
                    f"FxLMS diverged at sample {i} with step_size={cfg.step_size}: "
                    f"running error RMS exceeded {self.divergence_factor:g} x RMS(d)",
                )

            xf_vec = xf[i:i + L]
            mu = cfg.step_size / (_NLMS_EPS + xf_vec @ xf_vec) if cfg.normalize else cfg.step_size
            if decay != 1.0:
                w_rev *= decay
            w_rev += (mu * e_i) * xf_vec

        rate = x.sample_rate_hz
        y = y_hist[m_true - 1:]
        return FxlmsTrace(Waveform(y, rate), Waveform(e_out, rate), w_rev[::-1].copy())


def run_fxlms(x: Waveform, d: Waveform, config: FxlmsConfig, secondary_true: ImpulseResponse) -> Waveform:
    """Anti-noise y(n) produced by FxLMS on the aligned (x, d) pair."""
    trace = FxlmsFilter(config).run(x, d, secondary_true)
    logger.debug(f"FxLMS done: L={config.filter_len}, mu={config.step_size}, |W|={np.linalg.norm(trace.weights):.4f}")
    return trace.y
