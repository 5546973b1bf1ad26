"""
Information-theoretic NMSE bound.

Pipeline:
1. Both signals are cut into time-aligned frames (frame_len / frame_hop).
2. Each frame gets Gaussian-kernel marginal and joint densities on fixed, shared grids;
   each density is normalized by numerical integration and the frames are averaged.
3. Entropies are DISCRETE entropies of the binned mass (pdf x cell measure), so
   H(d), H(y) and H(d, y) live on one scale and alpha = I / H(d) stays in [0, 1].
4. linear bound:       10 log10(1 - alpha) + 10 log10(E_P)
   exponential bound:  exp(2 (h_d - I)) / (2 pi e sigma_d^2), with h_d the differential
                       entropy recovered as H(d) + ln(bin width) minus the kernel term
                       1/2 ln(1 + h^2 / var(d)) the smoothing adds

Grid per axis: bin_count points over [min - 3h, max + 3h], h = bandwidth_scale * range / bin_count.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import integrate

from config.settings_loader import get_setting
from core.decibels import Decibel, power_ratio_db
from core.errors import ArgumentError
from core.signals import ImpulseResponse, Waveform
from schemas import KdeConfig

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class DensityEstimate:
    grid: tuple[np.ndarray, ...]
    pdf: np.ndarray
    normalization_residual: float

    @property
    def ndim(self) -> int:
        return len(self.grid)

    @property
    def cell_measure(self) -> float:
        return float(np.prod([g[1] - g[0] for g in self.grid]))

    def to_frame(self) -> pd.DataFrame:
        if self.ndim == 1:
            return pd.DataFrame({"grid": self.grid[0], "pdf": self.pdf})
        ga, gb = np.meshgrid(self.grid[0], self.grid[1], indexing="ij")
        return pd.DataFrame({"grid_a": ga.ravel(), "grid_b": gb.ravel(), "pdf": self.pdf.ravel()})

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        return path


@dataclass(frozen=True)
class InfoQuantities:
    h_d: float
    h_y: float
    h_joint: float
    mi: float
    alpha: float
    h_d_differential: float
    power_d: float
    n_frames: int
    degenerate: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class JointDensities:
    p_d: DensityEstimate
    p_y: DensityEstimate
    p_dy: DensityEstimate
    n_frames: int
    degenerate: tuple[str, ...]
    # kernel bandwidth per axis (None: delta density)
    bandwidths: tuple[float | None, float | None] = (None, None)
    # leading samples covered by the frames
    n_covered: int = 0


# =============================================================================
# KDE
# =============================================================================

def _kernel_rows(values: np.ndarray, grid: np.ndarray, bandwidth: float | None) -> np.ndarray:
    """Per-sample densities on the grid; bandwidth None gives a delta at the nearest grid point."""
    if bandwidth is None:
        rows = np.zeros((values.size, grid.size))
        idx = np.abs(values[:, None] - grid[None, :]).argmin(axis=1)
        rows[np.arange(values.size), idx] = 1.0 / (grid[1] - grid[0])
        return rows
    z = (values[:, None] - grid[None, :]) / bandwidth
    return np.exp(-0.5 * z * z) * (_INV_SQRT_2PI / bandwidth)


def _integral(pdf: np.ndarray, grid: tuple[np.ndarray, ...]) -> float:
    out = pdf
    for axis in reversed(range(len(grid))):
        out = integrate.trapezoid(out, grid[axis], axis=axis)
    return float(out)


def _normalized(pdf: np.ndarray, grid: tuple[np.ndarray, ...]) -> np.ndarray:
    total = _integral(pdf, grid)
    return pdf / total if total > 0 else pdf


def _finish(acc: np.ndarray, n_frames: int, grid: tuple[np.ndarray, ...]) -> DensityEstimate:
    pdf = acc / n_frames
    return DensityEstimate(grid=grid, pdf=pdf, normalization_residual=abs(_integral(pdf, grid) - 1.0))


def kde_pdf(frames: Sequence, grid, bandwidth) -> DensityEstimate:
    """
    Frame-averaged Gaussian KDE on a fixed grid.

    1-D: frames is a sequence of 1-D arrays, grid an array, bandwidth a float.
    2-D: frames is a sequence of (a, b) array pairs, grid and bandwidth are pairs.
    """
    if len(frames) < 1:
        raise ArgumentError("kde_pdf needs at least one frame")
    two_d = isinstance(grid, tuple)
    grids = tuple(np.asarray(g, dtype=np.float64) for g in grid) if two_d else (np.asarray(grid, dtype=np.float64),)
    widths = tuple(bandwidth) if two_d else (bandwidth,)
    if any(h is None or h <= 0 for h in widths):
        raise ArgumentError(f"KDE bandwidth must be positive, got {bandwidth}")

    acc = np.zeros(tuple(g.size for g in grids))
    constant = False
    for frame in frames:
        if two_d:
            a, b = (np.asarray(v, dtype=np.float64) for v in frame)
            if a.size == 0 or a.shape != b.shape:
                raise ArgumentError(f"2-D KDE frames need equal, non-empty halves, got {a.shape} and {b.shape}")
            constant = constant or np.ptp(a) == 0 or np.ptp(b) == 0
            ka = _kernel_rows(a, grids[0], widths[0])
            kb = _kernel_rows(b, grids[1], widths[1])
            acc += _normalized(ka.T @ kb / a.size, grids)
        else:
            v = np.asarray(frame, dtype=np.float64)
            if v.size == 0:
                raise ArgumentError("kde_pdf got an empty frame")
            constant = constant or np.ptp(v) == 0
            acc += _normalized(_kernel_rows(v, grids[0], widths[0]).mean(axis=0), grids)
    if constant:
        logger.warning("kde_pdf: a frame has zero variance; its density is the kernel itself")
    return _finish(acc, len(frames), grids)


def histogram_entropy(density: DensityEstimate) -> float:
    """Discrete Shannon entropy (nats) of the normalized binned mass; 0 ln 0 = 0."""
    mass = density.pdf * density.cell_measure
    total = float(mass.sum())
    if total <= 0:
        return 0.0
    p = mass[mass > 0] / total
    return float(-np.sum(p * np.log(p)))


# =============================================================================
# Mutual information
# =============================================================================

@dataclass(frozen=True)
class _Axis:
    grid: np.ndarray
    bandwidth: float | None

    @property
    def bin_width(self) -> float:
        return float(self.grid[1] - self.grid[0])


def _build_axis(values: np.ndarray, config: KdeConfig, label: str) -> _Axis:
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    if span <= 1e-12 * max(1.0, abs(lo)):
        logger.warning(f"{label} has zero variance; using a delta density (entropy 0)")
        step = 1.0 / config.bin_count
        grid = lo + step * (np.arange(config.bin_count) - config.bin_count // 2)
        return _Axis(grid, None)
    h = config.bandwidth_scale * span / config.bin_count
    return _Axis(np.linspace(lo - 3.0 * h, hi + 3.0 * h, config.bin_count), h)


def _frame_starts(n: int, config: KdeConfig) -> range:
    return range(0, n - config.frame_len + 1, config.frame_hop)


def estimate_densities(
    d: Waveform,
    y: Waveform,
    config: KdeConfig | None = None,
    labels: tuple[str, str] = ("d", "y"),
) -> JointDensities:
    """Frame-averaged marginal and joint densities of (d, y) on shared grids."""
    config = config or KdeConfig()
    if len(d) != len(y):
        raise ArgumentError(f"d and y must have equal lengths ({len(d)} vs {len(y)})")
    if len(d) < config.frame_len:
        raise ArgumentError(f"Signals of {len(d)} samples are shorter than frame_len={config.frame_len}")

    dv, yv = d.samples, y.samples
    axis_d = _build_axis(dv, config, labels[0])
    axis_y = _build_axis(yv, config, labels[1])
    degenerate = tuple(name for name, ax in zip(labels, (axis_d, axis_y)) if ax.bandwidth is None)
    # identical signals: the joint lives on the diagonal, so H(d, d) = H(d)
    identical = np.array_equal(dv, yv)

    gd, gy = (axis_d.grid,), (axis_y.grid,)
    gj = (axis_d.grid, axis_y.grid)
    acc_d = np.zeros(axis_d.grid.size)
    acc_y = np.zeros(axis_y.grid.size)
    acc_j = np.zeros((axis_d.grid.size, axis_y.grid.size))

    starts = _frame_starts(len(d), config)
    for start in starts:
        stop = start + config.frame_len
        kd = _kernel_rows(dv[start:stop], axis_d.grid, axis_d.bandwidth)
        p_d = _normalized(kd.mean(axis=0), gd)
        acc_d += p_d
        if identical:
            acc_y += p_d
            acc_j += _normalized(np.diag(p_d) / axis_d.bin_width, gj)
            continue
        ky = _kernel_rows(yv[start:stop], axis_y.grid, axis_y.bandwidth)
        acc_y += _normalized(ky.mean(axis=0), gy)
        acc_j += _normalized(kd.T @ ky / config.frame_len, gj)

    n_frames = len(starts)
    logger.debug(f"KDE over {n_frames} frames, grids {axis_d.grid.size}x{axis_y.grid.size}")
    return JointDensities(
        p_d=_finish(acc_d, n_frames, gd),
        p_y=_finish(acc_y, n_frames, gy),
        p_dy=_finish(acc_j, n_frames, gj),
        n_frames=n_frames,
        degenerate=degenerate,
        bandwidths=(axis_d.bandwidth, axis_y.bandwidth),
        n_covered=starts[-1] + config.frame_len,
    )


def _digest(w: Waveform) -> bytes:
    return hashlib.sha256(w.samples.tobytes()).digest()


def mutual_information(d: Waveform, y: Waveform, config: KdeConfig | None = None) -> InfoQuantities:
    config = config or KdeConfig()
    # evaluate the pair in a canonical order so I(d; y) == I(y; d) to the last bit
    swapped = _digest(y) < _digest(d)
    first, second = (y, d) if swapped else (d, y)
    dens = estimate_densities(first, second, config, labels=("y", "d") if swapped else ("d", "y"))

    h_first = histogram_entropy(dens.p_d)
    h_second = histogram_entropy(dens.p_y)
    h_joint = histogram_entropy(dens.p_dy)
    mi_raw = h_first + h_second - h_joint
    if mi_raw < -1e-6:
        logger.debug(f"Negative MI estimate {mi_raw:.3e} nats clamped to 0")
    mi = max(mi_raw, 0.0)

    h_d, h_y = (h_second, h_first) if swapped else (h_first, h_second)
    p_d = dens.p_y if swapped else dens.p_d
    eps = float(get_setting("kde", "alpha_eps"))
    alpha = min(max(mi / h_d, 0.0), 1.0 - eps) if h_d > 0 else 0.0
    bin_width = float(p_d.grid[0][1] - p_d.grid[0][0])
    bandwidth = dens.bandwidths[1 if swapped else 0]
    covered = d.samples[: dens.n_covered]
    var_d = float(np.var(covered))
    smoothing = 0.5 * math.log1p(bandwidth ** 2 / var_d) if bandwidth and var_d > 0 else 0.0
    return InfoQuantities(
        h_d=h_d,
        h_y=h_y,
        h_joint=h_joint,
        mi=mi,
        alpha=alpha,
        h_d_differential=h_d + math.log(bin_width) - smoothing,
        power_d=float(np.mean(np.square(covered))),
        n_frames=dens.n_frames,
        degenerate=dens.degenerate,
    )


# =============================================================================
# Bound
# =============================================================================

def path_energy(primary: ImpulseResponse, ep_mode: str = "full") -> float:
    """E_P: full RIR energy, or the energy around the direct-path peak (+-2 taps)."""
    if ep_mode == "full":
        return primary.energy
    if ep_mode == "direct":
        return primary.direct_path_energy(half_width=2)
    raise ArgumentError(f"Unknown E_P mode {ep_mode!r}; expected 'full' or 'direct'")


def info_bound_db(
    info: InfoQuantities,
    primary: ImpulseResponse,
    variant: str = "linear",
    ep_mode: str = "full",
) -> Decibel:
    if variant == "linear":
        ceiling = 1.0 - float(get_setting("kde", "alpha_eps"))
        if info.alpha >= ceiling:
            return Decibel(float(get_setting("report", "db_floor")), True)
        return power_ratio_db((1.0 - info.alpha) * path_energy(primary, ep_mode))
    if variant == "exponential":
        if info.power_d <= 0:
            return Decibel(float(get_setting("report", "db_floor")), True)
        exponent = 2.0 * (info.h_d_differential - info.mi)
        ratio = math.exp(exponent) / (2.0 * math.pi * math.e * info.power_d)
        return power_ratio_db(ratio)
    raise ArgumentError(f"Unknown info-bound variant {variant!r}; expected 'linear' or 'exponential'")
