"""Closed-form distortion powers and beamforming gains, plus their simulated counterparts.

Conventions: ``alpha`` (or ``alpha_bb``) is the 3rd-order coefficient in the
form where the cubic baseband product of a signal ``s`` reads
``(3*alpha/4) |s|^2 s``. A baseband PA polynomial ``x + c3 x|x|^2`` therefore
has ``alpha = 4*c3/3`` (see :func:`alpha_from_baseband`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .amplifier import PhaseDeviationSpec, draw_deviations
from .errors import ConfigError, TruncatedBandWarning
from .waveform import ComplexSignal, band_power, power_spectrum

# Monte Carlo trials drawn per independent random substream
MC_BLOCK = 1000
Z99 = 2.5758293035489004


@dataclass(frozen=True)
class DistortionTerms:
    z1: ComplexSignal
    z2: ComplexSignal
    u1: ComplexSignal
    u2: ComplexSignal

    def total(self) -> ComplexSignal:
        s = self.z1.samples + self.z2.samples + self.u1.samples + self.u2.samples
        return ComplexSignal(s, self.z1.sample_rate)


@dataclass(frozen=True)
class TermPowers:
    p_z1: float
    p_z2: float
    p_v1: float
    p_v2: float


@dataclass(frozen=True)
class GainResult:
    gain: float
    family: str
    sigma: float
    M: int
    std_error: float | None = None
    half_width: float | None = None  # 99% confidence


@dataclass(frozen=True)
class BandSplit:
    p_inband: float
    p_oob_lower: float
    p_oob_upper: float
    truncated: bool = False

    @property
    def p_oob(self) -> float:
        return self.p_oob_lower + self.p_oob_upper


def alpha_from_baseband(c3):
    return 4 * c3 / 3


def decompose_third_order(s1: ComplexSignal, s2: ComplexSignal, alpha_bb) -> DistortionTerms:
    """Split the cubic product of two co-channel signals into its four terms.

    ``z1``/``z2`` follow the users' own phases; ``u1``/``u2`` carry the
    intermodulation phases ``2*theta2 - theta1`` and ``2*theta1 - theta2``.
    ``alpha_bb`` may be an array broadcasting against the samples (one
    coefficient per antenna row).
    """
    if s1.sample_rate != s2.sample_rate or s1.samples.shape != s2.samples.shape:
        raise ConfigError("decompose_third_order needs signals of identical format")
    a = np.asarray(alpha_bb)
    if a.ndim:
        a = a.reshape(a.shape + (1,) * (s1.samples.ndim - a.ndim))
    x1, x2 = s1.samples, s2.samples
    p1, p2 = np.abs(x1) ** 2, np.abs(x2) ** 2
    k = 0.75 * a
    fs = s1.sample_rate
    return DistortionTerms(
        z1=ComplexSignal(k * (p1 + 2 * p2) * x1, fs),
        z2=ComplexSignal(k * (p2 + 2 * p1) * x2, fs),
        u1=ComplexSignal(k * np.conj(x1) * x2**2, fs),
        u2=ComplexSignal(k * np.conj(x2) * x1**2, fs),
    )


def analytic_term_powers(P1, P2, alpha_mag) -> TermPowers:
    """Term powers for independent circular Gaussian users.

    z1 = (3a/4)(|s1|^2 + 2|s2|^2) s1, so with E|s|^4 = 2P^2 and
    E|s|^6 = 6P^3:
    E|z1|^2 = (9a^2/16)(6 P1^3 + 8 P1^2 P2 + 8 P1 P2^2).
    """
    if not (P1 > 0 and P2 > 0):
        raise ConfigError("user powers must be positive")
    k = 9 * alpha_mag**2 / 16
    return TermPowers(
        p_z1=k * (6 * P1**3 + 8 * P1**2 * P2 + 8 * P1 * P2**2),
        p_z2=k * (6 * P2**3 + 8 * P2**2 * P1 + 8 * P2 * P1**2),
        p_v1=k * 2 * P1 * P2**2,
        p_v2=k * 2 * P1**2 * P2,
    )


def sinc(sigma):
    """sin(x)/x, unnormalised, with the removable singularity filled in."""
    sigma = float(sigma)
    if abs(sigma) < 1e-4:
        s2 = sigma * sigma
        return 1 - s2 / 6 + s2 * s2 / 120
    return math.sin(sigma) / sigma


def coherence_factor(sigma, family) -> float:
    """|E e^{j psi}|^2 for the deviation distribution."""
    if family == "none" or sigma == 0:
        return 1.0
    if family == "gaussian":
        return math.exp(-sigma**2)
    if family == "uniform":
        return sinc(sigma) ** 2
    raise ConfigError(f"unknown deviation family {family!r}")


def beamforming_gain_closed_form(M, sigma, family) -> GainResult:
    if M < 1:
        raise ConfigError("M must be >= 1")
    if sigma < 0:
        raise ConfigError("sigma must be non-negative")
    g = M + (M * M - M) * coherence_factor(sigma, family)
    return GainResult(g, family, float(sigma), M)


def beamforming_gain_monte_carlo(M, sigma, family, trials, seed) -> GainResult:
    """Empirical mean of |sum_m e^{j psi_m}|^2.

    Trials are drawn in fixed blocks of ``MC_BLOCK``, each from its own
    substream keyed by ``(seed, block index)``; the result does not depend
    on the order in which blocks are evaluated.
    """
    if trials < 100:
        raise ConfigError("at least 100 Monte Carlo trials are required")
    spec = PhaseDeviationSpec(family, sigma)
    samples = np.empty(trials)
    for b, start in enumerate(range(0, trials, MC_BLOCK)):
        n = min(MC_BLOCK, trials - start)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))
        psi = draw_deviations(spec, (n, M), rng)
        samples[start:start + n] = np.abs(np.exp(1j * psi).sum(axis=1)) ** 2
    se = float(samples.std(ddof=1) / np.sqrt(trials))
    return GainResult(float(samples.mean()), family, float(sigma), M, se, Z99 * se)


def received_distortion_power(M, sigma, family, P, alpha_mag, location) -> float:
    """Beamformed 3rd-order distortion power for two equal-power users."""
    terms = analytic_term_powers(P, P, alpha_mag)
    if location == "main_beam":
        term = terms.p_z1
    elif location == "spurious":
        term = terms.p_v1
    else:
        raise ConfigError(f"location must be 'main_beam' or 'spurious', got {location!r}")
    return term * beamforming_gain_closed_form(M, sigma, family).gain


def inband_oob_split(signal: ComplexSignal, channel_bw, segment_len=None) -> BandSplit:
    """Power in the channel and in each first adjacent channel.

    Adjacent channels reaching past Nyquist are cut at the band edge and
    flagged with ``truncated`` (plus a :class:`TruncatedBandWarning`).
    """
    fs = signal.sample_rate
    if not 0 < channel_bw < fs:
        raise ConfigError("channel_bw must be positive and below the sample rate")
    n = len(signal)
    spec = power_spectrum(signal, segment_len or n)
    b = channel_bw
    nyq = fs / 2
    truncated = 1.5 * b > nyq
    if truncated:
        warnings.warn("adjacent channel exceeds Nyquist; truncated", TruncatedBandWarning, stacklevel=2)
    # the top bin centre of an even-length FFT sits at -fs/2
    lo_edge = min(-nyq, spec.frequencies[0])
    hi_edge = nyq
    return BandSplit(
        p_inband=band_power(spec, -b / 2, b / 2),
        p_oob_lower=band_power(spec, max(-1.5 * b, lo_edge), -b / 2),
        p_oob_upper=band_power(spec, b / 2, min(1.5 * b, hi_edge)),
        truncated=truncated,
    )
