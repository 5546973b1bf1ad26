"""
Spectral-support NMSE bound.

Energy the disturbance carries at frequencies where the primary path P has support but
the secondary path S does not can never be cancelled. With

    supp(X)        = bins whose |X| is within threshold_db of the spectrum peak
    uncancelable   = supp(P) minus supp(S)

two ratios are reported:

    bincount:  |uncancelable| / |supp(P)|
    weighted:  sum of S_dd over uncancelable / sum of S_dd over supp(P),  S_dd = |P|^2 S_xx

and each bound is 10 log10(ratio), floored at the configured dB floor.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from acoustics.room import PathPair
from config.settings_loader import get_setting
from core.decibels import Decibel, power_ratio_db
from core.errors import ArgumentError, ConfigurationError, UndefinedRatioError
from core.signals import ImpulseResponse, PsdEstimate

logger = logging.getLogger(__name__)

# magnitudes at or below this are treated as exact zeros
_MAG_TINY = 1e-300


@dataclass(frozen=True)
class SupportSet:
    fft_size: int
    mask: np.ndarray
    threshold_db: float
    magnitude: np.ndarray
    sample_rate_hz: int
    reference: str = "peak"

    def __post_init__(self):
        expected = self.fft_size // 2 + 1
        if self.mask.shape != (expected,) or self.magnitude.shape != (expected,):
            raise ArgumentError(f"Support mask must have {expected} one-sided bins for fft_size={self.fft_size}")

    @property
    def freqs_hz(self) -> np.ndarray:
        return np.fft.rfftfreq(self.fft_size, d=1.0 / self.sample_rate_hz)

    @property
    def count(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class SupportBoundResult:
    ratio_weighted: float
    ratio_bincount: float
    bound_db_weighted: Decibel
    bound_db_bincount: Decibel
    uncancelable_bins: int
    support_bins: int
    # False when no disturbance PSD was given and bins were weighted by |P|^2 alone
    psd_weighted: bool = True

    def bound(self, variant: str = "weighted") -> Decibel:
        if variant == "weighted":
            return self.bound_db_weighted
        if variant == "bincount":
            return self.bound_db_bincount
        raise ArgumentError(f"Unknown support-bound variant {variant!r}; expected 'weighted' or 'bincount'")


def spectral_support(
    ir: ImpulseResponse,
    fft_size: int | None = None,
    threshold_db: float | None = None,
    reference: str | None = None,
) -> SupportSet:
    """
    Zero-padded FFT magnitude of `ir` and the mask of bins above the threshold.

    reference="peak" measures threshold_db below the spectrum's own peak; "absolute"
    measures it below 0 dB (unit gain).
    """
    fft_size = int(get_setting("support", "fft_size") if fft_size is None else fft_size)
    threshold_db = float(get_setting("support", "threshold_db") if threshold_db is None else threshold_db)
    reference = get_setting("support", "reference") if reference is None else reference
    if fft_size < 1:
        raise ArgumentError(f"fft_size must be positive, got {fft_size}")
    if fft_size < len(ir):
        raise ArgumentError(f"fft_size={fft_size} is smaller than the impulse response ({len(ir)} taps)")
    if threshold_db <= 0:
        raise ArgumentError(f"threshold_db must be positive, got {threshold_db}")

    magnitude = np.abs(np.fft.rfft(ir.taps, n=fft_size))
    nonzero = magnitude > _MAG_TINY
    mag_db = 20.0 * np.log10(np.maximum(magnitude, _MAG_TINY))
    if reference == "peak":
        level = float(mag_db.max()) - threshold_db
    elif reference == "absolute":
        level = -threshold_db
    else:
        raise ConfigurationError(f"Unknown support reference {reference!r}; expected 'peak' or 'absolute'")
    mask = (mag_db >= level) & nonzero
    return SupportSet(
        fft_size=fft_size,
        mask=mask,
        threshold_db=threshold_db,
        magnitude=magnitude,
        sample_rate_hz=ir.sample_rate_hz,
        reference=reference,
    )


def _bin_weights(p_sup: SupportSet, sdd: PsdEstimate | None) -> np.ndarray:
    if sdd is None:
        return np.square(p_sup.magnitude)
    if sdd.sample_rate_hz is not None and sdd.sample_rate_hz != p_sup.sample_rate_hz:
        raise ConfigurationError(
            f"S_dd estimated at {sdd.sample_rate_hz} Hz cannot weight bins of a {p_sup.sample_rate_hz} Hz system"
        )
    freqs = p_sup.freqs_hz
    if sdd.freqs_hz[0] > freqs[0] + 1e-9 or sdd.freqs_hz[-1] < freqs[-1] - 1e-9:
        raise ArgumentError(
            f"S_dd grid [{sdd.freqs_hz[0]:.1f}, {sdd.freqs_hz[-1]:.1f}] Hz does not cover the FFT bins"
        )
    return sdd.at(freqs)


def support_ratio(p_sup: SupportSet, s_sup: SupportSet, sdd: PsdEstimate | None = None) -> SupportBoundResult:
    if p_sup.fft_size != s_sup.fft_size:
        raise ArgumentError(f"Support sets use different FFT sizes ({p_sup.fft_size} vs {s_sup.fft_size})")
    if p_sup.sample_rate_hz != s_sup.sample_rate_hz:
        raise ConfigurationError("Primary and secondary supports come from different sample rates")
    if p_sup.count == 0:
        raise UndefinedRatioError("Primary path has empty spectral support; the support ratio is undefined")

    uncancelable = p_sup.mask & ~s_sup.mask
    n_unc = int(uncancelable.sum())
    ratio_bincount = n_unc / p_sup.count

    weights = _bin_weights(p_sup, sdd)
    total = float(weights[p_sup.mask].sum())
    if total <= 0.0:
        raise UndefinedRatioError("Disturbance PSD carries no power on the primary support")
    ratio_weighted = min(float(weights[uncancelable].sum()) / total, 1.0)
    if sdd is None:
        logger.warning("No disturbance PSD given; support bins weighted by |P|^2 only")

    return SupportBoundResult(
        ratio_weighted=ratio_weighted,
        ratio_bincount=ratio_bincount,
        bound_db_weighted=power_ratio_db(ratio_weighted),
        bound_db_bincount=power_ratio_db(ratio_bincount),
        uncancelable_bins=n_unc,
        support_bins=p_sup.count,
        psd_weighted=sdd is not None,
    )


def disturbance_psd(p_sup: SupportSet, x_psd: PsdEstimate) -> PsdEstimate:
    """S_dd = |P|^2 S_xx on the FFT bin grid of the primary support."""
    freqs = p_sup.freqs_hz
    sxx = _bin_weights(p_sup, x_psd)
    return PsdEstimate(
        freqs_hz=freqs,
        power_density=np.square(p_sup.magnitude) * sxx,
        window_len=x_psd.window_len,
        overlap_frac=x_psd.overlap_frac,
        one_sided=True,
        sample_rate_hz=p_sup.sample_rate_hz,
    )


def support_bound_db(
    paths: PathPair,
    x_psd: PsdEstimate,
    fft_size: int | None = None,
    threshold_db: float | None = None,
    reference: str | None = None,
) -> SupportBoundResult:
    p_sup = spectral_support(paths.primary, fft_size, threshold_db, reference)
    s_sup = spectral_support(paths.secondary, fft_size, threshold_db, reference)
    result = support_ratio(p_sup, s_sup, disturbance_psd(p_sup, x_psd))
    logger.debug(
        f"Support bound: {result.uncancelable_bins}/{result.support_bins} uncancelable bins, "
        f"weighted {result.bound_db_weighted.value:.2f} dB"
    )
    return result


def support_masks_frame(p_sup: SupportSet, s_sup: SupportSet) -> pd.DataFrame:
    def flags(mask: np.ndarray) -> list[str]:
        return ["true" if v else "false" for v in mask]

    return pd.DataFrame({
        "freq_hz": p_sup.freqs_hz,
        "in_supp_P": flags(p_sup.mask),
        "in_supp_S": flags(s_sup.mask),
        "uncancelable": flags(p_sup.mask & ~s_sup.mask),
    })


def save_support_masks(p_sup: SupportSet, s_sup: SupportSet, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    support_masks_frame(p_sup, s_sup).to_csv(path, index=False)
    return path
