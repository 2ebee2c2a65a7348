"""Test signals and spectral measurements.

Real passband two-tone signals feed the passband intermodulation checks; all
array work runs on complex-baseband signals (Gaussian or windowed OFDM).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyBandWarning


@dataclass(frozen=True)
class RealSignal:
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        _check_signal(self, np.float64)


@dataclass(frozen=True)
class ComplexSignal:
    """Uniformly sampled complex-baseband waveform.

    ``samples`` may carry leading axes (e.g. one row per antenna); time is
    always the last axis.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        _check_signal(self, np.complex128)

    def __len__(self):
        return self.samples.shape[-1]

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


def _check_signal(sig, dtype):
    if not sig.sample_rate > 0:
        raise ConfigError(f"sample_rate must be positive, got {sig.sample_rate}")
    samples = np.asarray(sig.samples, dtype=dtype)
    if not np.all(np.isfinite(samples)):
        raise ConfigError("signal contains non-finite samples")
    samples.flags.writeable = False
    object.__setattr__(sig, "samples", samples)
    object.__setattr__(sig, "sample_rate", float(sig.sample_rate))


@dataclass(frozen=True)
class OfdmConfig:
    """LTE-like CP-OFDM numerology.

    ``cp_len`` is given on the un-oversampled grid; ``window_len`` is in
    output (oversampled) samples.
    """

    n_fft: int = 2048
    n_active: int = 1200
    subcarrier_spacing: float = 15e3
    oversampling_factor: int = 4
    window_len: int = 16
    n_symbols: int = 12
    cp_len: int = 144

    def __post_init__(self):
        if not 0 < self.n_active < self.n_fft:
            raise ConfigError("n_active must satisfy 0 < n_active < n_fft")
        if self.n_active % 2:
            raise ConfigError("n_active must be even (symmetric around DC)")
        if self.oversampling_factor < 1:
            raise ConfigError("oversampling_factor must be >= 1")
        if self.n_symbols < 1:
            raise ConfigError("n_symbols must be >= 1")
        if not 0 <= self.window_len < self.cp_len * self.oversampling_factor:
            raise ConfigError("window_len must be shorter than the cyclic prefix")

    @property
    def sample_rate(self) -> float:
        return self.n_fft * self.subcarrier_spacing * self.oversampling_factor

    @property
    def occupied_bandwidth(self) -> float:
        return self.n_active * self.subcarrier_spacing

    @property
    def symbol_len(self) -> int:
        """Samples per symbol including cyclic prefix, at the output rate."""
        return (self.n_fft + self.cp_len) * self.oversampling_factor


@dataclass(frozen=True)
class SpectrumEstimate:
    """Two-sided, DC-centred spectrum. ``psd`` holds power per bin."""

    frequencies: np.ndarray
    psd: np.ndarray
    resolution_bw: float

    @property
    def total_power(self) -> float:
        return float(np.sum(self.psd))


def gen_two_tone_passband(f1, f2, phi1, phi2, sample_rate, n_samples) -> RealSignal:
    """Sum of two unit-amplitude cosines.

    The sample rate must keep every product of a cubic nonlinearity below
    Nyquist, otherwise aliased products land on the lines being measured.
    """
    if f1 <= 0 or f2 <= 0:
        raise ConfigError("tone frequencies must be positive")
    products = {
        "3*f1": 3 * f1,
        "3*f2": 3 * f2,
        "2*f1+f2": 2 * f1 + f2,
        "2*f2+f1": 2 * f2 + f1,
    }
    name, worst = max(products.items(), key=lambda kv: kv[1])
    if sample_rate <= 2 * worst:
        raise ConfigError(
            f"sample rate {sample_rate:g} Hz aliases the {name} product at "
            f"{worst:g} Hz (needs > {2 * worst:g} Hz)"
        )
    t = np.arange(n_samples) / sample_rate
    x = np.cos(2 * np.pi * f1 * t + phi1) + np.cos(2 * np.pi * f2 * t + phi2)
    return RealSignal(x, sample_rate)


def gen_complex_gaussian(power, n_samples, seed, sample_rate=1.0) -> ComplexSignal:
    """Zero-mean circular Gaussian noise with E|s|^2 = power."""
    if not power > 0:
        raise ConfigError("power must be positive")
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)
    return ComplexSignal(s * np.sqrt(power / 2), sample_rate)


def _edge_window(n):
    # rising half of a raised cosine, strictly inside (0, 1)
    k = np.arange(n)
    return 0.5 * (1 - np.cos(np.pi * (k + 0.5) / n))


def gen_ofdm(config: OfdmConfig, power, seed) -> ComplexSignal:
    """Windowed CP-OFDM with QPSK on every active subcarrier.

    Active subcarriers sit symmetrically around an unused DC bin. Each
    symbol is extended by a cyclic suffix of ``window_len`` samples, tapered
    with a raised-cosine edge on both ends and overlap-added onto its
    neighbours. The result is scaled to exactly ``power`` mean-square.
    """
    if not power > 0:
        raise ConfigError("power must be positive")
    os_ = config.oversampling_factor
    n_ifft = config.n_fft * os_
    cp = config.cp_len * os_
    w = config.window_len
    stride = n_ifft + cp
    half = config.n_active // 2
    bins = np.r_[np.arange(-half, 0), np.arange(1, half + 1)] % n_ifft

    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(config.n_symbols, config.n_active, 2))
    qpsk = ((1 - 2 * bits[..., 0]) + 1j * (1 - 2 * bits[..., 1])) / np.sqrt(2)
    grid = np.zeros((config.n_symbols, n_ifft), complex)
    grid[:, bins] = qpsk
    body = np.fft.ifft(grid, axis=1)

    # prefix + body + suffix, one extended symbol per row
    ext = np.concatenate([body[:, -cp:], body, body[:, :w]], axis=1)
    if w:
        ramp = _edge_window(w)
        ext[:, :w] *= ramp
        ext[:, -w:] *= ramp[::-1]

    out = np.zeros(config.n_symbols * stride + w, complex)
    for i, sym in enumerate(ext):
        out[i * stride: i * stride + stride + w] += sym
    out *= np.sqrt(power / np.mean(np.abs(out) ** 2))
    return ComplexSignal(out, config.sample_rate)


def ofdm_for_length(n_samples, power, seed, config: OfdmConfig | None = None) -> ComplexSignal:
    """OFDM waveform truncated to exactly ``n_samples`` and renormalized."""
    config = config or OfdmConfig()
    n_symbols = max(1, -(-n_samples // config.symbol_len))
    cfg = OfdmConfig(**{**config.__dict__, "n_symbols": n_symbols})
    s = gen_ofdm(cfg, power, seed).samples[:n_samples]
    s = s * np.sqrt(power / np.mean(np.abs(s) ** 2))
    return ComplexSignal(s, cfg.sample_rate)


def frequency_shift(signal: ComplexSignal, offset) -> ComplexSignal:
    """Move a baseband signal to a carrier offset of ``offset`` Hz."""
    n = np.arange(len(signal))
    rot = np.exp(2j * np.pi * offset * n / signal.sample_rate)
    return ComplexSignal(signal.samples * rot, signal.sample_rate)


def sample_moments(signal, order) -> float:
    if order not in (2, 4, 6):
        raise ConfigError(f"unsupported moment order {order}; use 2, 4 or 6")
    return float(np.mean(np.abs(signal.samples) ** order))


def power_spectrum(signal, segment_len=4096) -> SpectrumEstimate:
    """Averaged periodogram with a rectangular window.

    Segments do not overlap; a partial final segment is zero padded. Bin
    powers are normalised by the total sample count, so the bins sum to
    the time-domain mean-square power exactly. Real signals give the
    two-sided spectrum (a real line of amplitude A shows A^2/4 at +-f).
    """
    x = np.asarray(signal.samples)
    n = x.shape[-1]
    if n == 0:
        raise ConfigError("cannot estimate the spectrum of an empty signal")
    if segment_len > n:
        raise ConfigError(f"segment_len {segment_len} exceeds signal length {n}")
    n_seg = -(-n // segment_len)
    padded = np.zeros(n_seg * segment_len, complex)
    padded[:n] = x
    X = np.fft.fft(padded.reshape(n_seg, segment_len), axis=1)
    psd = np.sum(np.abs(X) ** 2, axis=0) / (segment_len * n)
    freqs = np.fft.fftfreq(segment_len, 1 / signal.sample_rate)
    return SpectrumEstimate(
        np.fft.fftshift(freqs), np.fft.fftshift(psd), signal.sample_rate / segment_len
    )


def band_mask(frequencies, f_low, f_high):
    return (frequencies >= f_low) & (frequencies < f_high)


def band_power(spectrum: SpectrumEstimate, f_low, f_high) -> float:
    """Power in bins whose centres fall in ``[f_low, f_high)``.

    An empty band returns 0.0 and raises :class:`EmptyBandWarning`.
    """
    if not f_low < f_high:
        raise ConfigError("band_power needs f_low < f_high")
    mask = band_mask(spectrum.frequencies, f_low, f_high)
    if not mask.any():
        warnings.warn(f"no bins in [{f_low:g}, {f_high:g}) Hz", EmptyBandWarning, stacklevel=2)
        return 0.0
    return float(np.sum(spectrum.psd[mask]))


def line_phasors(signal: RealSignal, frequencies) -> np.ndarray:
    """Complex amplitude ``A e^{j phase}`` of real cosine lines ``A cos(2 pi f t + phase)``.

    Read from a single full-length DFT; exact only for bin-centred tones.
    """
    n = len(signal.samples)
    X = np.fft.rfft(signal.samples)
    out = []
    for f in frequencies:
        k = f * n / signal.sample_rate
        if abs(k - round(k)) > 1e-9:
            raise ConfigError(f"{f:g} Hz is not bin-centred for n={n}")
        out.append(2 * X[int(round(k))] / n)
    return np.array(out)


def line_amplitudes(signal: RealSignal, frequencies) -> np.ndarray:
    return np.abs(line_phasors(signal, frequencies))
