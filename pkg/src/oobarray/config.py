"""Scenario configuration (JSON, strict: unknown keys are rejected)."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ArraySection(_Strict):
    n_antennas: int = Field(60, ge=1)
    spacing: float = Field(0.5, gt=0)


class UserSection(_Strict):
    angle: float = Field(gt=-90, lt=90)
    power: float = Field(1.0, gt=0)


class PaSection(_Strict):
    preset: str = "cubic"
    file: Optional[str] = None
    clip_level: Optional[float] = Field(None, gt=0)


class DeviationSection(_Strict):
    family: Literal["gaussian", "uniform", "none"] = "none"
    sigma: float = Field(0.0, ge=0)
    seed: int = 2


class OfdmSection(_Strict):
    n_fft: int = 2048
    n_active: int = 1200
    subcarrier_spacing: float = 15e3
    oversampling_factor: int = 4
    window_len: int = 16
    cp_len: int = 144


class WaveformSection(_Strict):
    type: Literal["ofdm", "gaussian"] = "ofdm"
    n_samples: int = Field(100_000, ge=16)
    seed: int = 1
    ofdm: OfdmSection = OfdmSection()
    # per-user carrier offsets for the dual-carrier mode
    offsets_hz: Optional[list[float]] = None


class TwoToneSection(_Strict):
    f1: float = 10e6
    f2: float = 11e6
    phi1: float = 0.0
    phi2: float = 0.0
    sample_rate: float = 200e6
    n_samples: int = 2000
    alpha: float = 0.1
    baseband_offsets_hz: tuple[float, float] = (-0.5e6, 0.5e6)


class OperatingPoint(_Strict):
    backoff_db: float = Field(8.0, ge=0)


class GridSection(_Strict):
    min: float = -90.0
    max: float = 90.0
    step: float = Field(0.1, gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.min < self.max:
            raise ValueError("grid.min must be below grid.max")
        return self


def _default_sigmas():
    return sorted([round(0.1 * k, 10) for k in range(41)] + [math.pi])


class GainCurveSection(_Strict):
    sigmas: list[float] = Field(default_factory=_default_sigmas)
    trials: int = Field(10_000, ge=100)
    seed: int = 3

    @field_validator("sigmas")
    @classmethod
    def _non_negative(cls, v):
        if not v or min(v) < 0:
            raise ValueError("sigmas must be a non-empty list of non-negative values")
        return sorted(v)


class OutputSection(_Strict):
    directory: Optional[str] = None
    normalization: Literal["max_user", "none"] = "max_user"
    per_term: bool = True
    figures: bool = False


class ScenarioConfig(_Strict):
    array: ArraySection = ArraySection()
    users: list[UserSection] = Field(
        default_factory=lambda: [UserSection(angle=-15.0), UserSection(angle=12.0)]
    )
    pa: PaSection = PaSection()
    deviations: DeviationSection = DeviationSection()
    waveform: WaveformSection = WaveformSection()
    two_tone: TwoToneSection = TwoToneSection()
    operating_point: OperatingPoint = OperatingPoint()
    grid: GridSection = GridSection()
    channel_bw: float = Field(20e6, gt=0)
    # spectral segment for the band split; None uses the whole signal
    segment_len: Optional[int] = Field(None, ge=16)
    gain_curve: GainCurveSection = GainCurveSection()
    outputs: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _users(self):
        if not self.users:
            raise ValueError("users: at least one user is required")
        offs = self.waveform.offsets_hz
        if offs is not None and len(offs) != len(self.users):
            raise ValueError("waveform.offsets_hz needs one entry per user")
        return self

    def with_seed(self, seed: int) -> "ScenarioConfig":
        """Derive every random stream from one seed."""
        return self.model_copy(update={
            "waveform": self.waveform.model_copy(update={"seed": seed}),
            "deviations": self.deviations.model_copy(update={"seed": seed + 1}),
            "gain_curve": self.gain_curve.model_copy(update={"seed": seed + 2}),
        })

    def with_updates(self, **sections) -> "ScenarioConfig":
        data = self.model_dump()
        for key, value in sections.items():
            if isinstance(value, dict) and isinstance(data.get(key), dict):
                data[key] = {**data[key], **value}
            else:
                data[key] = value
        return ScenarioConfig.model_validate(data)


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None


def load_config(path) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(data)
