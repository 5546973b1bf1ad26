"""
Image-source room impulse responses (Allen & Berkley) for a shoebox room.

    beta_from_t60   - uniform wall reflection coefficient from a reverberation time
    generate_rir    - one source -> one microphone RIR
    simulate_paths  - primary (reference position -> error mic) and secondary
                      (speaker -> error mic) paths of one scenario

Image sources are placed at fractional delays with a Hann-windowed sinc kernel
(+-kernel_half_width samples). The optional post-filter is the classical recursive
high-pass at 100 Hz.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from config.settings_loader import get_setting
from core.errors import ArgumentError, ConfigurationError, InfeasibleRoomError
from core.signals import ImpulseResponse
from schemas import RoomConfig, RoomGeometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathPair:
    primary: ImpulseResponse
    secondary: ImpulseResponse

    def __post_init__(self):
        if self.primary.sample_rate_hz != self.secondary.sample_rate_hz:
            raise ConfigurationError("Primary and secondary paths must share a sample rate")
        if len(self.primary) != len(self.secondary):
            raise ConfigurationError(
                f"Primary and secondary paths must have equal tap counts ({len(self.primary)} vs {len(self.secondary)})"
            )

    @property
    def sample_rate_hz(self) -> int:
        return self.primary.sample_rate_hz


def beta_from_t60(dims_m, t60_s: float, sound_speed_mps: float = 343.0, model: str = "sabine") -> float:
    """
    Uniform reflection coefficient beta = sqrt(1 - absorption).

    Sabine:  absorption = 24 V ln10 / (c S T60)
    Eyring:  absorption = 1 - exp(-24 V ln10 / (c S T60))
    """
    lx, ly, lz = (float(d) for d in dims_m)
    if min(lx, ly, lz) <= 0:
        raise ArgumentError(f"Room dimensions must be positive, got {dims_m}")
    if t60_s <= 0:
        raise ArgumentError(f"T60 must be positive, got {t60_s}")
    volume = lx * ly * lz
    surface = 2.0 * (lx * ly + lx * lz + ly * lz)
    sabine = 24.0 * volume * math.log(10.0) / (sound_speed_mps * surface * t60_s)
    if model == "sabine":
        absorption = sabine
    elif model == "eyring":
        absorption = 1.0 - math.exp(-sabine)
    else:
        raise ConfigurationError(f"Unknown reflection model {model!r}")
    if absorption >= 1.0:
        raise InfeasibleRoomError(
            f"T60 = {t60_s} s is too short for a {lx}x{ly}x{lz} m room (absorption {absorption:.3f} >= 1)"
        )
    return math.sqrt(1.0 - absorption)


def check_inside(dims_m, position, label: str = "position") -> None:
    for coord, extent in zip(position, dims_m):
        if not 0.0 < coord < extent:
            raise ArgumentError(f"{label} {tuple(position)} lies outside the room {tuple(dims_m)}")


def _axis_images(src: float, extent: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Image coordinates and reflection counts along one axis."""
    r = np.arange(-order, order + 1)
    coords, counts = [], []
    for p in (0, 1):
        coords.append((1 - 2 * p) * src + 2 * r * extent)
        counts.append(np.abs(r - p) + np.abs(r))
    return np.concatenate(coords).astype(np.float64), np.concatenate(counts)


def _highpass(taps: np.ndarray, sample_rate_hz: int) -> np.ndarray:
    w = 2.0 * math.pi * get_setting("room", "highpass_cutoff_hz") / sample_rate_hz
    r1 = math.exp(-w)
    b1 = 2.0 * r1 * math.cos(w)
    b2 = -r1 * r1
    a1 = -(1.0 + r1)
    return sps.lfilter([1.0, a1, r1], [1.0, -b1, -b2], taps)


def generate_rir(config: RoomConfig) -> ImpulseResponse:
    dims = np.asarray(config.dims_m, dtype=np.float64)
    src = np.asarray(config.source_pos_m, dtype=np.float64)
    mic = np.asarray(config.mic_pos_m, dtype=np.float64)
    check_inside(dims, src, "source")
    check_inside(dims, mic, "microphone")

    if config.beta_override is not None:
        beta = float(config.beta_override)
    else:
        beta = beta_from_t60(config.dims_m, config.t60_s, config.sound_speed_mps, config.reflection_model)

    fs, c, n_taps = config.sample_rate_hz, config.sound_speed_mps, config.n_taps
    half = int(get_setting("room", "kernel_half_width"))
    max_dist = (n_taps + half) * c / fs

    axes = []
    for a in range(3):
        order = int(math.ceil(max_dist / (2.0 * dims[a]))) + 1
        coords, counts = _axis_images(src[a], dims[a], order)
        axes.append((coords - mic[a], counts))
    (dx, nx), (dy, ny), (dz, nz) = axes

    dist = np.sqrt(dx[:, None, None] ** 2 + dy[None, :, None] ** 2 + dz[None, None, :] ** 2).ravel()
    reflections = (nx[:, None, None] + ny[None, :, None] + nz[None, None, :]).ravel()
    gain = np.power(beta, reflections) / (4.0 * math.pi * dist)

    delay = dist * fs / c
    keep = (delay < n_taps + half) & (gain != 0.0)
    delay, gain = delay[keep], gain[keep]

    offsets = np.arange(-half, half + 1)
    idx = np.floor(delay).astype(np.int64)[:, None] + offsets[None, :]
    t = idx - delay[:, None]
    kernel = 0.5 * (1.0 + np.cos(np.pi * t / half)) * np.sinc(t)
    kernel[np.abs(t) > half] = 0.0
    valid = (idx >= 0) & (idx < n_taps)

    taps = np.zeros(n_taps)
    np.add.at(taps, idx[valid], (kernel * gain[:, None])[valid])

    if config.highpass_enabled:
        taps = _highpass(taps, fs)
    logger.debug(f"RIR {tuple(src)} -> {tuple(mic)}: beta={beta:.4f}, {delay.size} images")
    return ImpulseResponse(taps, fs)


def simulate_paths(
    room: RoomGeometry,
    ref_mic,
    err_mic,
    speaker,
    t60_s: float,
    noise_source=None,
) -> PathPair:
    """
    Primary path from the reference position (or a separate noise source when
    room.primary_source == "noise_source") to the error mic; secondary path from the
    cancellation speaker to the error mic.
    """
    if room.primary_source == "noise_source":
        if noise_source is None:
            raise ConfigurationError("primary_source = noise_source but no noise source position given")
        primary_src = noise_source
    else:
        primary_src = ref_mic
    for label, pos in (("reference mic", ref_mic), ("error mic", err_mic), ("speaker", speaker)):
        check_inside(room.dims_m, pos, label)

    base = room.model_dump()
    primary = generate_rir(RoomConfig(**base, source_pos_m=tuple(primary_src), mic_pos_m=tuple(err_mic), t60_s=t60_s))
    secondary = generate_rir(RoomConfig(**base, source_pos_m=tuple(speaker), mic_pos_m=tuple(err_mic), t60_s=t60_s))
    return PathPair(primary=primary, secondary=secondary)
