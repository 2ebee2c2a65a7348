"""Uniform linear array: steering, phase-only precoding and beampatterns."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .waveform import ComplexSignal


@dataclass(frozen=True)
class ArrayConfig:
    n_antennas: int = 60
    spacing: float = 0.5  # wavelengths

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ConfigError("n_antennas must be >= 1")
        if not self.spacing > 0:
            raise ConfigError("spacing must be positive")


@dataclass(frozen=True)
class UserConfig:
    angle: float
    signal: ComplexSignal
    power: float = 1.0

    def __post_init__(self):
        if not -90 < self.angle < 90:
            raise ConfigError(f"user angle {self.angle} outside (-90, 90) degrees")
        if not self.power > 0:
            raise ConfigError("user power must be positive")


@dataclass(frozen=True)
class BeamPattern:
    angles: np.ndarray
    p_total: np.ndarray
    p_inband: np.ndarray
    p_oob: np.ndarray
    p_oob_lower: np.ndarray | None = None
    p_oob_upper: np.ndarray | None = None

    def to_db(self, reference) -> dict:
        with np.errstate(divide="ignore"):
            return {
                name: 10 * np.log10(getattr(self, name) / reference)
                for name in ("p_total", "p_inband", "p_oob")
            }


def _sin(theta):
    return np.sin(np.deg2rad(theta))


def steering_phases(theta, array: ArrayConfig) -> np.ndarray:
    """Per-antenna phases that steer a beam towards ``theta`` degrees."""
    if not abs(theta) < 90:
        raise ConfigError(f"steering angle {theta} outside (-90, 90)")
    m = np.arange(array.n_antennas)
    return -2 * np.pi * array.spacing * m * _sin(theta)


def propagation_vector(theta, array: ArrayConfig) -> np.ndarray:
    """LOS phase each antenna picks up towards ``theta``; shape (..., M)."""
    m = np.arange(array.n_antennas)
    s = np.atleast_1d(_sin(np.asarray(theta, float)))
    a = np.exp(2j * np.pi * array.spacing * np.outer(s, m))
    return a[0] if np.ndim(theta) == 0 else a


def _steered_sum(users, array):
    if not users:
        raise ConfigError("at least one user is required")
    fs = users[0].signal.sample_rate
    n = len(users[0].signal)
    for u in users:
        if u.signal.sample_rate != fs or len(u.signal) != n or u.signal.samples.ndim != 1:
            raise ConfigError("all user signals must share sample rate and length")
    x = np.zeros((array.n_antennas, n), complex)
    for u in users:
        x += np.exp(1j * steering_phases(u.angle, array))[:, None] * u.signal.samples
    return x


def precoder_gain(users, array: ArrayConfig, target_input_power) -> float:
    """The real scalar ``g`` that :func:`precode` applies."""
    x = _steered_sum(users, array)
    return float(np.sqrt(target_input_power / np.mean(np.abs(x) ** 2)))


def precode(users, array: ArrayConfig, target_input_power) -> ComplexSignal:
    """Phase-only multi-user precoder.

    Returns an (M, N) signal: antenna m carries ``g * sum_l s_l e^{j phi_l^m}``
    with one real ``g`` setting the mean per-antenna power.
    """
    x = _steered_sum(users, array)
    g = np.sqrt(target_input_power / np.mean(np.abs(x) ** 2))
    return ComplexSignal(g * x, users[0].signal.sample_rate)


def far_field_signal(per_antenna: ComplexSignal, theta, array: ArrayConfig) -> ComplexSignal:
    """Signal received in the far field at ``theta`` degrees (LOS, unit path gain)."""
    y = per_antenna.samples
    if y.shape[0] != array.n_antennas:
        raise ConfigError(f"expected {array.n_antennas} antenna signals, got {y.shape[0]}")
    return ComplexSignal(propagation_vector(theta, array) @ y, per_antenna.sample_rate)


def band_edges(channel_bw):
    """Inband and first adjacent channels as ``(name, low, high)`` triples."""
    b = channel_bw
    return (
        ("inband", -b / 2, b / 2),
        ("oob_lower", -3 * b / 2, -b / 2),
        ("oob_upper", b / 2, 3 * b / 2),
    )


def band_covariances(per_antenna: ComplexSignal, channel_bw, segment_len=None) -> dict:
    """Spatial covariance of the antenna signals, total and per band.

    Segments and bin normalisation follow :func:`waveform.power_spectrum`, so
    ``a^H R a`` for a band equals :func:`waveform.band_power` applied to the
    spectrum of the signal received along steering vector ``a``.
    """
    y = per_antenna.samples
    M, n = y.shape
    seg = segment_len or n
    if seg > n:
        raise ConfigError(f"segment_len {seg} exceeds signal length {n}")
    fs = per_antenna.sample_rate
    freqs = np.fft.fftfreq(seg, 1 / fs)
    masks = {name: (freqs >= lo) & (freqs < hi) for name, lo, hi in band_edges(channel_bw)}
    out = {name: np.zeros((M, M), complex) for name in masks}
    out["total"] = (y @ y.conj().T) / n

    n_seg = -(-n // seg)
    # bound the FFT working set to ~2**22 complex samples per batch
    batch = max(1, (1 << 22) // (M * seg))
    for start in range(0, n_seg, batch):
        stop = min(n_seg, start + batch)
        block = np.zeros((M, (stop - start) * seg), complex)
        chunk = y[:, start * seg: min(n, stop * seg)]
        block[:, : chunk.shape[1]] = chunk
        Y = np.fft.fft(block.reshape(M, stop - start, seg), axis=2)
        for name, mask in masks.items():
            Yb = Y[:, :, mask].reshape(M, -1)
            out[name] += (Yb @ Yb.conj().T) / (seg * n)
    return out


def pattern_from_covariance(R, angles, array: ArrayConfig) -> np.ndarray:
    A = propagation_vector(np.asarray(angles, float), array)
    # received r = a^T y, so E|r|^2 = a^T R a^*
    p = np.einsum("am,mk,ak->a", A, R, A.conj()).real
    return np.maximum(p, 0.0)


def beampattern(per_antenna: ComplexSignal, grid, channel_bw, array: ArrayConfig,
                segment_len=None) -> BeamPattern:
    """Total, inband and adjacent-channel received power over an angle grid.

    Equivalent to running :func:`far_field_signal` and
    :func:`analysis.inband_oob_split` at every angle, but evaluated through
    per-band spatial covariance matrices so the cost does not scale with
    grid size times signal length. ``segment_len`` defaults to the whole
    signal (finest resolution, least rectangular-window leakage).
    """
    grid = np.asarray(grid, float)
    if grid.size == 0:
        raise ConfigError("angle grid is empty")
    R = band_covariances(per_antenna, channel_bw, segment_len)
    p = {name: pattern_from_covariance(R[name], grid, array) for name in R}
    return BeamPattern(
        grid, p["total"], p["inband"], p["oob_lower"] + p["oob_upper"],
        p["oob_lower"], p["oob_upper"],
    )


def intermod_directions(theta1, theta2, order=3, spacing=None):
    """Beam directions of the order-``2k+1`` co-channel intermodulation pair.

    The products ``s2^(k+1) s1*^k`` and ``s1^(k+1) s2*^k`` carry steering
    phase ``(k+1) phi2 - k phi1`` (and mirrored), so they beamform towards
    ``asin((k+1) sin t2 - k sin t1)`` and ``asin((k+1) sin t1 - k sin t2)``.
    A direction outside visible space is ``None``. With ``spacing``
    (wavelengths) given, the sine argument is first folded by the grating
    period ``1/spacing``, reporting wherever the array actually forms the lobe.
    """
    if order < 3 or order % 2 == 0:
        raise ConfigError("intermodulation order must be odd and >= 3")
    k = (order - 1) // 2
    s1, s2 = _sin(theta1), _sin(theta2)
    out = []
    for arg in ((k + 1) * s2 - k * s1, (k + 1) * s1 - k * s2):
        if spacing is not None:
            period = 1 / spacing
            arg = (arg + period / 2) % period - period / 2
        out.append(float(np.rad2deg(np.arcsin(arg))) if abs(arg) <= 1 else None)
    return tuple(out)


def spurious_directions(theta1, theta2, spacing=None):
    """Directions of the two 3rd-order intermodulation beams, in degrees.

    ``(asin(2 sin t2 - sin t1), asin(2 sin t1 - sin t2))``; see
    :func:`intermod_directions` for ``None`` results and ``spacing``.
    """
    return intermod_directions(theta1, theta2, 3, spacing)


def main_lobe_mask(angles, centers, half_width):
    angles = np.asarray(angles, float)
    mask = np.zeros(angles.shape, bool)
    for c in centers:
        mask |= np.abs(angles - c) <= half_width
    return mask


def local_peaks(angles, values, exclude=None, count=2):
    """Angles of the ``count`` strongest local maxima outside ``exclude``."""
    v = np.asarray(values, float)
    interior = np.zeros(v.shape, bool)
    interior[1:-1] = (v[1:-1] >= v[:-2]) & (v[1:-1] > v[2:])
    if exclude is not None:
        interior &= ~exclude
    idx = np.flatnonzero(interior)
    idx = idx[np.argsort(v[idx])[::-1][:count]]
    return [float(angles[i]) for i in idx]
