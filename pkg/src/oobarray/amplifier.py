"""Memoryless polynomial PA models and per-antenna PA banks."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .waveform import ComplexSignal, RealSignal

FAMILIES = ("gaussian", "uniform", "none")


@dataclass(frozen=True)
class PaModel:
    """Odd-order baseband polynomial ``sum_p c[p] x |x|^(2p)``.

    ``coeffs[0]`` is the linear gain, ``coeffs[1]`` the 3rd-order term and so
    on. The input envelope is clipped at ``clip_level`` before evaluation.
    """

    coeffs: tuple
    clip_level: float = math.inf

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise ConfigError("a PA model needs at least the linear coefficient")
        if not self.clip_level > 0:
            raise ConfigError("clip_level must be positive")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "clip_level", float(self.clip_level))

    @property
    def order(self) -> int:
        return 2 * len(self.coeffs) - 1

    @property
    def third_order(self) -> complex:
        return self.coeffs[1] if len(self.coeffs) > 1 else 0j

    def saturation_level(self) -> float:
        """Input envelope used as the 0 dB backoff reference.

        The clip level when the model clips; otherwise the input magnitude at
        which the AM/AM curve of the polynomial first stops rising.
        """
        if math.isfinite(self.clip_level):
            return self.clip_level
        if len(self.coeffs) < 2 or self.third_order == 0:
            raise ConfigError("an unclipped linear model has no saturation level")
        r = np.linspace(1e-3, 100, 200_001)
        gain = np.abs(np.polyval(self.coeffs[::-1], r**2)) * r
        rising = np.diff(gain) > 0
        stop = np.argmin(rising) if not rising.all() else len(r) - 1
        return float(r[stop])


@dataclass(frozen=True)
class PhaseDeviationSpec:
    family: str = "none"
    sigma: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown deviation family {self.family!r}")
        if self.sigma < 0:
            raise ConfigError("sigma must be non-negative")


@dataclass(frozen=True)
class PaBank:
    models: tuple
    deviations: np.ndarray

    def __post_init__(self):
        dev = np.asarray(self.deviations, float)
        if len(self.models) != len(dev):
            raise ConfigError("one deviation per PA model is required")
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "deviations", dev)

    def __len__(self):
        return len(self.models)


def apply_passband_polynomial(x: RealSignal, alpha) -> RealSignal:
    s = x.samples
    return RealSignal(s + alpha * s**3, x.sample_rate)


def clip_envelope(x, level):
    """Limit ``|x|`` to ``level`` keeping the phase. Works on scalars and arrays."""
    if not level > 0:
        raise ConfigError("clip level must be positive")
    x = np.asarray(x, complex)
    mag = np.abs(x)
    scale = np.where(mag > level, level / np.where(mag > level, mag, 1.0), 1.0)
    out = x * scale
    return out.item() if out.ndim == 0 else out


def _polyval(pa, x):
    if math.isfinite(pa.clip_level):
        x = clip_envelope(x, pa.clip_level)
    p2 = np.abs(x) ** 2
    acc = np.zeros_like(x, dtype=complex)
    # Horner in |x|^2
    for c in reversed(pa.coeffs):
        acc = acc * p2 + c
    return x * acc


def apply_baseband_polynomial(x: ComplexSignal, pa: PaModel) -> ComplexSignal:
    return ComplexSignal(_polyval(pa, x.samples), x.sample_rate)


def draw_deviations(spec: PhaseDeviationSpec, size, rng) -> np.ndarray:
    if spec.family == "none" or spec.sigma == 0:
        return np.zeros(size)
    if spec.family == "gaussian":
        return rng.normal(0.0, spec.sigma, size)
    return rng.uniform(-spec.sigma, spec.sigma, size)


def make_pa_bank(base: PaModel, M, spec: PhaseDeviationSpec, seed) -> PaBank:
    """M copies of ``base`` whose nonlinear coefficients are rotated by e^{j psi_m}.

    One common phase per PA; the linear coefficient is left alone.
    """
    if M < 1:
        raise ConfigError("M must be >= 1")
    psi = draw_deviations(spec, M, np.random.default_rng(seed))
    models = []
    for p in psi:
        rot = np.exp(1j * p)
        coeffs = (base.coeffs[0],) + tuple(c * rot for c in base.coeffs[1:])
        models.append(PaModel(coeffs, base.clip_level))
    return PaBank(tuple(models), psi)


def apply_bank(per_antenna: ComplexSignal, bank: PaBank) -> ComplexSignal:
    """Run row m of ``per_antenna`` through PA m."""
    x = per_antenna.samples
    if x.shape[0] != len(bank):
        raise ConfigError(f"{x.shape[0]} antenna signals for a bank of {len(bank)} PAs")
    y = np.empty_like(x)
    for m, pa in enumerate(bank.models):
        y[m] = _polyval(pa, x[m])
    return ComplexSignal(y, per_antenna.sample_rate)


# Baseband fit quoted for a measured PA, linear gain pinned to one.
CUBIC = PaModel((1.0, -0.0368))

# Synthetic stand-in for a measured, clipped 9th-order PA. The 3rd-order term
# equals CUBIC; the higher orders are small and complex so that they add
# AM/PM and extra intermodulation directions without dominating.
NINTH_ORDER = PaModel(
    (1.0, -0.0368, -5.0e-4 + 5.0e-3j, 2.0e-5 - 2.2e-4j, -3.0e-7 + 3.5e-6j),
    clip_level=2.5,
)

PRESETS = {"cubic": CUBIC, "ninth_order": NINTH_ORDER}


_COEF = re.compile(r"\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)")


def load_coefficient_file(path) -> list[PaModel]:
    """Read PA models from a plain-text coefficient file.

    One model per line: complex coefficients as ``(re,im)`` pairs in rising
    order, then the clip level (``inf`` for none). ``#`` starts a comment.
    """
    models = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        pairs = _COEF.findall(line)
        rest = _COEF.sub(" ", line).split()
        if not pairs or len(rest) != 1:
            raise ConfigError(f"{path}:{lineno}: expected '(re,im) ... clip_level'")
        try:
            coeffs = tuple(complex(float(a), float(b)) for a, b in pairs)
            models.append(PaModel(coeffs, float(rest[0])))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if not models:
        raise ConfigError(f"{path}: no PA models found")
    return models


def format_coefficient_line(pa: PaModel) -> str:
    pairs = " ".join(f"({c.real!r},{c.imag!r})" for c in pa.coeffs)
    return f"{pairs} {pa.clip_level!r}"


def resolve_pa(name_or_path) -> PaModel:
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]
    path = Path(name_or_path)
    if not path.exists():
        raise ConfigError(f"unknown PA preset or file {name_or_path!r}; presets: {sorted(PRESETS)}")
    return load_coefficient_file(path)[0]
