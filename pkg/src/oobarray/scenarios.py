"""Scenario runners: two-tone spectra, beampatterns, gain curves, validation.

Each ``run_*`` returns an in-memory result; ``write_*`` turns it into CSV.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import amplifier, analysis, waveform
from .array import (
    ArrayConfig,
    BeamPattern,
    UserConfig,
    band_covariances,
    beampattern,
    far_field_signal,
    local_peaks,
    main_lobe_mask,
    pattern_from_covariance,
    precode,
    precoder_gain,
    spurious_directions,
    steering_phases,
)
from .config import ScenarioConfig
from .errors import ConfigError
from .waveform import ComplexSignal

BEAMPATTERN_HEADER = ("angle_deg", "p_total_db", "p_inband_db", "p_oob_db")
GAIN_HEADER = (
    "sigma_rad", "rel_gain_gauss", "rel_gain_uniform",
    "rel_gain_gauss_mc", "rel_gain_uniform_mc", "mc_halfwidth",
)
# half-width of the user main-lobe region ignored when looking for spurious peaks
MAIN_LOBE_EXCLUSION_DEG = 5.0


def fmt(v) -> str:
    v = float(v)
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return f"{v:.12g}"


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else fmt(r) for r in row])
    return path


# --------------------------------------------------------------------------
# building blocks shared by the runners


def angle_grid(cfg: ScenarioConfig) -> np.ndarray:
    g = cfg.grid
    n = int(round((g.max - g.min) / g.step))
    return np.round(g.min + g.step * np.arange(n + 1), 10)


def array_of(cfg: ScenarioConfig) -> ArrayConfig:
    return ArrayConfig(cfg.array.n_antennas, cfg.array.spacing)


def base_pa(cfg: ScenarioConfig) -> amplifier.PaModel:
    if cfg.pa.file:
        pa = amplifier.load_coefficient_file(cfg.pa.file)[0]
    else:
        if cfg.pa.preset not in amplifier.PRESETS:
            raise ConfigError(
                f"pa.preset: unknown preset {cfg.pa.preset!r}; choose from {sorted(amplifier.PRESETS)}"
            )
        pa = amplifier.PRESETS[cfg.pa.preset]
    if cfg.pa.clip_level is not None:
        pa = amplifier.PaModel(pa.coeffs, cfg.pa.clip_level)
    return pa


def pa_bank(cfg: ScenarioConfig) -> amplifier.PaBank:
    spec = amplifier.PhaseDeviationSpec(cfg.deviations.family, cfg.deviations.sigma)
    return amplifier.make_pa_bank(base_pa(cfg), cfg.array.n_antennas, spec, cfg.deviations.seed)


def input_power(cfg: ScenarioConfig, pa: amplifier.PaModel | None = None) -> float:
    """Mean per-antenna PA input power at the configured backoff."""
    pa = pa or base_pa(cfg)
    return pa.saturation_level() ** 2 * 10 ** (-cfg.operating_point.backoff_db / 10)


def user_signals(cfg: ScenarioConfig, n_samples=None) -> list[ComplexSignal]:
    w = cfg.waveform
    n = n_samples or w.n_samples
    ofdm_cfg = waveform.OfdmConfig(**w.ofdm.model_dump())
    seeds = np.random.SeedSequence(w.seed).spawn(len(cfg.users))
    out = []
    for i, (u, ss) in enumerate(zip(cfg.users, seeds)):
        seed = int(ss.generate_state(1)[0])
        if w.type == "ofdm":
            s = waveform.ofdm_for_length(n, u.power, seed, ofdm_cfg)
        else:
            s = waveform.gen_complex_gaussian(u.power, n, seed, ofdm_cfg.sample_rate)
        if w.offsets_hz:
            s = waveform.frequency_shift(s, w.offsets_hz[i])
        out.append(s)
    return out


def users_of(cfg: ScenarioConfig, signals) -> list[UserConfig]:
    return [UserConfig(u.angle, s, u.power) for u, s in zip(cfg.users, signals)]


# --------------------------------------------------------------------------
# two-tone


@dataclass
class ToneLine:
    domain: str
    product: str
    frequency_hz: float
    amplitude: float
    expected: float

    @property
    def error(self) -> float:
        return abs(self.amplitude - self.expected)


@dataclass
class TwoToneResult:
    lines: list[ToneLine]
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return all(l.error <= self.tolerance * max(1.0, abs(l.expected)) for l in self.lines)

    def rows(self):
        for l in self.lines:
            yield (l.domain, l.product, l.frequency_hz, l.amplitude, l.expected, l.error)


def run_two_tone(cfg: ScenarioConfig) -> TwoToneResult:
    """Cubic PA line amplitudes, passband and baseband-equivalent.

    The passband run drives ``x + alpha x^3`` with two unit cosines. The
    baseband run drives ``x + (3 alpha/4) x|x|^2`` with two unit complex
    carriers at the configured offsets, which must reproduce the same
    fundamental and intermodulation amplitudes.
    """
    tt = cfg.two_tone
    a = tt.alpha
    x = waveform.gen_two_tone_passband(tt.f1, tt.f2, tt.phi1, tt.phi2, tt.sample_rate, tt.n_samples)
    y = amplifier.apply_passband_polynomial(x, a)
    f1, f2 = tt.f1, tt.f2
    p1, p2 = tt.phi1, tt.phi2
    # (name, frequency, expected signed amplitude, line phase)
    products = [
        ("f1", f1, 1 + 9 * a / 4, p1),
        ("f2", f2, 1 + 9 * a / 4, p2),
        ("2f2-f1", 2 * f2 - f1, 3 * a / 4, 2 * p2 - p1),
        ("2f1-f2", 2 * f1 - f2, 3 * a / 4, 2 * p1 - p2),
        ("3f1", 3 * f1, a / 4, 3 * p1),
        ("3f2", 3 * f2, a / 4, 3 * p2),
        ("2f1+f2", 2 * f1 + f2, 3 * a / 4, 2 * p1 + p2),
        ("2f2+f1", 2 * f2 + f1, 3 * a / 4, 2 * p2 + p1),
    ]
    products = [p for p in products if p[1] > 0]
    phasors = waveform.line_phasors(y, [p[1] for p in products])
    lines = [
        ToneLine("passband", name, f, float((ph * np.exp(-1j * phase)).real), e)
        for (name, f, e, phase), ph in zip(products, phasors)
    ]

    d1, d2 = tt.baseband_offsets_hz
    n = tt.n_samples
    t = np.arange(n) / tt.sample_rate
    s = np.exp(2j * np.pi * d1 * t) + np.exp(2j * np.pi * d2 * t)
    pa = amplifier.PaModel((1.0, 3 * a / 4))
    yb = amplifier.apply_baseband_polynomial(ComplexSignal(s, tt.sample_rate), pa).samples
    Y = np.fft.fft(yb) / n
    freqs = np.fft.fftfreq(n, 1 / tt.sample_rate)
    for name, f, e in [
        ("d1", d1, 1 + 9 * a / 4),
        ("d2", d2, 1 + 9 * a / 4),
        ("2d2-d1", 2 * d2 - d1, 3 * a / 4),
        ("2d1-d2", 2 * d1 - d2, 3 * a / 4),
    ]:
        k = np.argmin(np.abs(freqs - f))
        if abs(freqs[k] - f) > 1e-6 * tt.sample_rate / n:
            raise ConfigError(f"two_tone.baseband_offsets_hz: {f:g} Hz is not bin-centred")
        # carriers start at zero phase, so every product line is real
        lines.append(ToneLine("baseband", name, f, float(Y[k].real), e))
    return TwoToneResult(lines)


def write_two_tone(result: TwoToneResult, out_dir) -> list[Path]:
    header = ("domain", "product", "frequency_hz", "amplitude", "expected", "abs_error")
    return [write_csv(Path(out_dir) / "two_tone.csv", header, result.rows())]


# --------------------------------------------------------------------------
# beampatterns


@dataclass
class BeampatternResult:
    angles: np.ndarray
    patterns: dict  # name -> BeamPattern
    reference: float
    user_angles: list
    predicted_spurious: tuple
    summary: dict = field(default_factory=dict)

    def db(self, name, quantity="p_total"):
        with np.errstate(divide="ignore"):
            return 10 * np.log10(getattr(self.patterns[name], quantity) / self.reference)


def _peak_ratio_db(angles, values, user_angles, array: ArrayConfig):
    """User-angle peak over the two strongest peaks outside the main lobes."""
    ex = main_lobe_mask(angles, user_angles, MAIN_LOBE_EXCLUSION_DEG)
    peaks = local_peaks(angles, values, ex, count=2)
    at_users = [values[np.argmin(np.abs(angles - a))] for a in user_angles]
    at_peaks = [values[np.argmin(np.abs(angles - a))] for a in peaks]
    if not at_peaks:
        return peaks, math.nan
    return peaks, 10 * np.log10(max(at_users) / max(at_peaks))


def simulate_antenna_signals(cfg: ScenarioConfig, signals=None):
    """Precoded PA inputs, the bank, and the PA outputs for a scenario."""
    arr = array_of(cfg)
    signals = signals or user_signals(cfg)
    users = users_of(cfg, signals)
    bank = pa_bank(cfg)
    x = precode(users, arr, input_power(cfg))
    y = amplifier.apply_bank(x, bank)
    return users, bank, x, y


def run_beampattern(cfg: ScenarioConfig, signals=None) -> BeampatternResult:
    arr = array_of(cfg)
    grid = angle_grid(cfg)
    users, bank, x, y = simulate_antenna_signals(cfg, signals)
    fs = x.sample_rate
    seg = cfg.segment_len
    bw = cfg.channel_bw
    user_angles = [u.angle for u in users]

    patterns = {}
    R = band_covariances(y, bw, seg)
    patterns["output"] = _pattern(R, grid, arr)
    inband_at_users = pattern_from_covariance(R["inband"], user_angles, arr)
    reference = float(inband_at_users.max()) if cfg.outputs.normalization == "max_user" else 1.0

    if cfg.outputs.per_term:
        lin = np.array([m.coeffs[0] for m in bank.models])[:, None]
        linear = ComplexSignal(lin * x.samples, fs)
        patterns["linear"] = beampattern(linear, grid, bw, arr, seg)
        patterns["distortion"] = beampattern(ComplexSignal(y.samples - linear.samples, fs), grid, bw, arr, seg)
        del linear
        if len(users) == 2:
            for name, term in _third_order_terms(cfg, users, bank, x).items():
                patterns[name] = beampattern(term, grid, bw, arr, seg)

    res = BeampatternResult(
        grid, patterns, reference, user_angles,
        spurious_directions(*user_angles[:2], spacing=arr.spacing) if len(users) == 2 else (),
    )
    res.summary = _summarize(res, arr)
    return res


def _pattern(R, grid, arr) -> BeamPattern:
    p = {name: pattern_from_covariance(R[name], grid, arr) for name in R}
    return BeamPattern(grid, p["total"], p["inband"], p["oob_lower"] + p["oob_upper"],
                       p["oob_lower"], p["oob_upper"])


def _third_order_terms(cfg, users, bank, x):
    """Per-antenna z1, z2, u1, u2 routed through the precoder's steering phases."""
    arr = array_of(cfg)
    g = precoder_gain(users, arr, input_power(cfg))
    per_user = [
        ComplexSignal(g * np.exp(1j * steering_phases(u.angle, arr))[:, None] * u.signal.samples,
                      x.sample_rate)
        for u in users
    ]
    alphas = np.array([analysis.alpha_from_baseband(m.third_order) for m in bank.models])
    terms = analysis.decompose_third_order(per_user[0], per_user[1], alphas)
    return {"z1": terms.z1, "z2": terms.z2, "u1": terms.u1, "u2": terms.u2}


def _summarize(res: BeampatternResult, arr) -> dict:
    out = {}
    a = res.angles
    out["reference_power"] = res.reference
    for i, d in enumerate(res.predicted_spurious):
        out[f"predicted_spurious_{i + 1}_deg"] = math.nan if d is None else d
    out["output_oob_argmax_deg"] = float(a[np.argmax(res.patterns["output"].p_oob)])
    peaks, ratio = _peak_ratio_db(a, res.patterns["output"].p_oob, res.user_angles, arr)
    out["output_oob_user_over_spurious_db"] = ratio
    for i, p in enumerate(sorted(peaks, reverse=True)):
        out[f"output_oob_spurious_peak_{i + 1}_deg"] = p
    if "distortion" in res.patterns:
        peaks, ratio = _peak_ratio_db(a, res.patterns["distortion"].p_total, res.user_angles, arr)
        out["distortion_user_over_spurious_db"] = ratio
        for i, p in enumerate(sorted(peaks, reverse=True)):
            out[f"distortion_spurious_peak_{i + 1}_deg"] = p
    if "z1" in res.patterns:
        for name in ("z1", "z2", "u1", "u2"):
            out[f"{name}_argmax_deg"] = float(a[np.argmax(res.patterns[name].p_total)])
        zmax = max(res.patterns["z1"].p_total.max(), res.patterns["z2"].p_total.max())
        umax = max(res.patterns["u1"].p_total.max(), res.patterns["u2"].p_total.max())
        out["term_z_over_u_db"] = 10 * np.log10(zmax / umax) if umax > 0 else math.inf
    return out


def write_beampattern(result: BeampatternResult, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    paths = []
    for name, bp in result.patterns.items():
        fname = "beampattern.csv" if name == "output" else f"beampattern_{name}.csv"
        db = bp.to_db(result.reference)
        rows = zip(bp.angles, db["p_total"], db["p_inband"], db["p_oob"])
        paths.append(write_csv(out_dir / fname, BEAMPATTERN_HEADER, rows))
    paths.append(write_csv(out_dir / "beampattern_summary.csv", ("metric", "value"),
                           sorted(result.summary.items())))
    return paths


# --------------------------------------------------------------------------
# gain curve


@dataclass
class GainCurveResult:
    M: int
    rows: list
    noncoherent_floor: float


def run_gain_curve(cfg: ScenarioConfig) -> GainCurveResult:
    """Relative amplitude gain sqrt(G)/M versus phase spread, both families."""
    M = cfg.array.n_antennas
    gc = cfg.gain_curve
    rows = []
    for i, sigma in enumerate(gc.sigmas):
        rel = {}
        hw = 0.0
        for j, fam in enumerate(("gaussian", "uniform")):
            cf = analysis.beamforming_gain_closed_form(M, sigma, fam)
            mc = analysis.beamforming_gain_monte_carlo(M, sigma, fam, gc.trials, (gc.seed, i, j))
            rel[fam] = math.sqrt(cf.gain) / M
            rel[fam + "_mc"] = math.sqrt(mc.gain) / M
            # delta method: d sqrt(G) = dG / (2 sqrt(G))
            hw = max(hw, mc.half_width / (2 * math.sqrt(mc.gain) * M))
        rows.append((sigma, rel["gaussian"], rel["uniform"], rel["gaussian_mc"], rel["uniform_mc"], hw))
    return GainCurveResult(M, rows, 1 / math.sqrt(M))


def write_gain_curve(result: GainCurveResult, out_dir) -> list[Path]:
    return [write_csv(Path(out_dir) / "gain_curve.csv", GAIN_HEADER, result.rows)]


# --------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    analytic: float
    simulated: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, analytic, simulated, tolerance, relative=True, detail=""):
        if name in {c.name for c in self.checks}:
            raise ValueError(f"duplicate check {name}")
        analytic, simulated = float(analytic), float(simulated)
        err = abs(simulated - analytic)
        if relative and analytic != 0:
            err /= abs(analytic)
        ok = bool(np.isfinite(simulated) and err <= tolerance)
        self.checks.append(Check(name, analytic, simulated, tolerance, ok, detail))
        return ok

    def fail(self, name, exc):
        self.checks.append(Check(name, math.nan, math.nan, math.nan, False, f"error: {exc}"))


VALIDATION_SIGMAS = (0.0, 0.1145, 0.5, 1.0, 2.0, math.pi)
VALIDATION_M = (2, 16, 60)


def _check_moments(rep, cfg):
    s = waveform.gen_complex_gaussian(1.0, 10**6, cfg.waveform.seed)
    P = waveform.sample_moments(s, 2)
    rep.add("gaussian_moment_4", 2.0, waveform.sample_moments(s, 4) / P**2, 0.02)
    rep.add("gaussian_moment_6", 6.0, waveform.sample_moments(s, 6) / P**3, 0.04)


def _check_parseval(rep, cfg):
    g = waveform.gen_complex_gaussian(1.0, 10**5 + 123, cfg.waveform.seed)
    o = user_signals(cfg)[0]
    for name, sig in (("gaussian", g), ("ofdm", o)):
        spec = waveform.power_spectrum(sig)
        rep.add(f"parseval_{name}", sig.power, spec.total_power, 1e-9)
    rep.add("ofdm_power_normalization", cfg.users[0].power, o.power, 0.01)


def _check_decomposition(rep, cfg):
    rng = np.random.default_rng(cfg.waveform.seed)
    n = 10**5
    s1 = ComplexSignal(rng.standard_normal(n) + 1j * rng.standard_normal(n), 1.0)
    s2 = ComplexSignal(rng.standard_normal(n) + 1j * rng.standard_normal(n), 1.0)
    a = analysis.alpha_from_baseband(base_pa(cfg).third_order or -0.0368)
    terms = analysis.decompose_third_order(s1, s2, a).total().samples
    x = s1.samples + s2.samples
    ref = 0.75 * a * np.abs(x) ** 2 * x
    err = np.max(np.abs(terms - ref)) / np.max(np.abs(ref))
    rep.add("cubic_decomposition_identity", 0.0, err, 1e-12, relative=False)


def _check_term_powers(rep, cfg):
    n = 10**6
    s1 = waveform.gen_complex_gaussian(1.0, n, cfg.waveform.seed + 11)
    s2 = waveform.gen_complex_gaussian(1.0, n, cfg.waveform.seed + 12)
    a = 0.1
    t = analysis.decompose_third_order(s1, s2, a)
    P1, P2 = s1.power, s2.power
    ana = analysis.analytic_term_powers(P1, P2, a)
    rep.add("term_power_z1", ana.p_z1, t.z1.power, 0.02)
    rep.add("term_power_v1", ana.p_v1, t.u1.power, 0.02)
    for M in VALIDATION_M:
        for sigma in VALIDATION_SIGMAS:
            for fam in ("gaussian", "uniform"):
                main = analysis.received_distortion_power(M, sigma, fam, 1.0, a, "main_beam")
                spur = analysis.received_distortion_power(M, sigma, fam, 1.0, a, "spurious")
                rep.add(f"ratio_11_{fam}_M{M}_s{sigma:.4g}", 11.0, main / spur, 1e-12)


def _check_gains(rep, cfg, trials=10_000):
    for M in VALIDATION_M:
        for i, sigma in enumerate(VALIDATION_SIGMAS):
            for j, fam in enumerate(("gaussian", "uniform")):
                cf = analysis.beamforming_gain_closed_form(M, sigma, fam)
                mc = analysis.beamforming_gain_monte_carlo(
                    M, sigma, fam, trials, (cfg.gain_curve.seed, M, i, j))
                tol = 3 * mc.std_error
                rep.add(f"gain_mc_{fam}_M{M}_s{sigma:.4g}", cf.gain, mc.gain, tol,
                        relative=False, detail=f"3 standard errors = {tol:.4g}")


def _check_gain_endpoints(rep, cfg):
    M = cfg.array.n_antennas
    floor = 1 / math.sqrt(M)
    rel = lambda s, f: math.sqrt(analysis.beamforming_gain_closed_form(M, s, f).gain) / M
    rep.add("rel_gain_sigma0_gaussian", 1.0, rel(0.0, "gaussian"), 1e-12)
    rep.add("rel_gain_sigma0_uniform", 1.0, rel(0.0, "uniform"), 1e-12)
    rep.add("rel_gain_uniform_pi_floor", floor, rel(math.pi, "uniform"), 0.02)
    rep.add("rel_gain_gaussian_4_floor", floor, rel(4.0, "gaussian"), 0.02)


def _check_two_tone(rep, cfg):
    for alpha in (0.1, -0.05):
        res = run_two_tone(cfg.with_updates(two_tone={"alpha": alpha}))
        for line in res.lines:
            if line.product in ("f1", "2f2-f1", "2f1-f2", "d1", "2d2-d1"):
                rep.add(f"two_tone_{line.domain}_{line.product}_a{alpha:g}",
                        line.expected, line.amplitude, 1e-9)


def _check_main_beam_power(rep, cfg, n=10**6, chunk=50_000):
    """Simulated z-term power at a user angle with identical, unclipped cubic PAs."""
    c = cfg.with_updates(
        deviations={"family": "none", "sigma": 0.0},
        waveform={"type": "gaussian", "offsets_hz": None},
        pa={"preset": "cubic", "file": None, "clip_level": None},
    )
    if len(c.users) != 2:
        return
    c = c.with_updates(users=[{"angle": u.angle, "power": 1.0} for u in c.users])
    arr = array_of(c)
    M = arr.n_antennas
    pa = base_pa(c)
    signals = user_signals(c, n)
    users = users_of(c, signals)
    g = precoder_gain(users, arr, input_power(c))
    theta = users[0].angle
    acc = 0.0
    for start in range(0, n, chunk):
        part = [UserConfig(u.angle, ComplexSignal(u.signal.samples[start:start + chunk],
                                                  u.signal.sample_rate)) for u in users]
        x = np.zeros((M, len(part[0].signal)), complex)
        for u in part:
            x += g * np.exp(1j * steering_phases(u.angle, arr))[:, None] * u.signal.samples
        xs = ComplexSignal(x, u.signal.sample_rate)
        d = amplifier.apply_baseband_polynomial(xs, pa).samples - x
        r = far_field_signal(ComplexSignal(d, xs.sample_rate), theta, arr).samples
        acc += float(np.sum(np.abs(r) ** 2))
    simulated = acc / n
    P1 = g**2 * signals[0].power
    P2 = g**2 * signals[1].power
    a = abs(analysis.alpha_from_baseband(pa.third_order))
    analytic = analysis.analytic_term_powers(P1, P2, a).p_z1 * M**2
    P = 0.5 * (P1 + P2)
    rep.add("main_beam_power_sigma0", analytic, simulated, 0.02,
            detail=f"(99/8)a^2P^3M^2 at equal power = {99 / 8 * a**2 * P**3 * M**2:.6g}")


def _check_beampattern(rep, cfg):
    c = cfg.with_updates(outputs={"per_term": True})
    if len(c.users) != 2:
        return
    res = run_beampattern(c)
    step = c.grid.step
    pred = res.predicted_spurious
    s = res.summary
    for i, name in enumerate(("u1", "u2")):
        if pred[i] is not None:
            rep.add(f"spurious_direction_{name}", pred[i], s[f"{name}_argmax_deg"], step + 1e-9,
                    relative=False)
    rep.add("term_ratio_z_over_u_db", 10 * math.log10(11), s["term_z_over_u_db"], 0.3, relative=False)
    rep.add("distortion_user_over_spurious_db", 10 * math.log10(11),
            s["distortion_user_over_spurious_db"], 0.3, relative=False)
    argmax = s["output_oob_argmax_deg"]
    nearest = min(res.user_angles, key=lambda a: abs(a - argmax))
    rep.add("oob_argmax_at_user_angle", nearest, argmax, step + 1e-9, relative=False)


CHECK_GROUPS = (
    ("moments", _check_moments),
    ("parseval", _check_parseval),
    ("decomposition", _check_decomposition),
    ("term_powers", _check_term_powers),
    ("gains", _check_gains),
    ("gain_endpoints", _check_gain_endpoints),
    ("two_tone", _check_two_tone),
    ("main_beam_power", _check_main_beam_power),
    ("beampattern", _check_beampattern),
)


def run_validation(cfg: ScenarioConfig, groups=None) -> ValidationReport:
    """Run every analytic-versus-simulated check; failures never abort the rest."""
    rep = ValidationReport()
    for name, fn in CHECK_GROUPS:
        if groups is not None and name not in groups:
            continue
        try:
            fn(rep, cfg)
        except Exception as exc:  # recorded, remaining groups still run
            rep.fail(name, exc)
    return rep


def write_validation(rep: ValidationReport, out_dir) -> list[Path]:
    header = ("check", "analytic", "simulated", "tolerance", "passed", "detail")
    rows = ((c.name, c.analytic, c.simulated, c.tolerance, "true" if c.passed else "false", c.detail)
            for c in rep.checks)
    return [write_csv(Path(out_dir) / "validation.csv", header, rows)]
