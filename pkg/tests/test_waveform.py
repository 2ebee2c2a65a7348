import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oobarray import amplifier
from oobarray.errors import ConfigError, EmptyBandWarning
from oobarray.waveform import (
    ComplexSignal,
    OfdmConfig,
    band_power,
    gen_complex_gaussian,
    gen_ofdm,
    gen_two_tone_passband,
    line_amplitudes,
    ofdm_for_length,
    power_spectrum,
    sample_moments,
)


def test_two_tone_has_two_unit_lines():
    x = gen_two_tone_passband(10e6, 11e6, 0, 0, 200e6, 2000)
    spec = power_spectrum(x, 2000)
    strong = spec.frequencies[spec.psd > 1e-12]
    assert sorted(strong) == pytest.approx([-11e6, -10e6, 10e6, 11e6])
    assert line_amplitudes(x, [10e6, 11e6]) == pytest.approx([1.0, 1.0], rel=1e-12)


def test_coincident_tones_add_coherently():
    x = gen_two_tone_passband(10e6, 10e6, 0, 0, 200e6, 2000)
    assert line_amplitudes(x, [10e6])[0] == pytest.approx(2.0, rel=1e-12)


def test_cubic_products_of_two_tone():
    alpha = 0.1
    x = gen_two_tone_passband(10e6, 11e6, 0.3, -1.1, 200e6, 2000)
    y = amplifier.apply_passband_polynomial(x, alpha)
    im = line_amplitudes(y, [12e6, 9e6])
    np.testing.assert_allclose(im, 3 * alpha / 4, rtol=1e-9)


def test_aliasing_is_rejected_with_product_named():
    with pytest.raises(ConfigError, match=r"3\*f2.*3.3e\+07"):
        gen_two_tone_passband(10e6, 11e6, 0, 0, 60e6, 600)
    with pytest.raises(ConfigError):
        gen_two_tone_passband(-1, 11e6, 0, 0, 200e6, 600)


def test_gaussian_moments():
    s = gen_complex_gaussian(1.0, 10**6, seed=1)
    assert sample_moments(s, 2) == pytest.approx(1.0, rel=0.01)
    assert sample_moments(s, 4) == pytest.approx(2.0, rel=0.02)
    assert sample_moments(s, 6) == pytest.approx(6.0, rel=0.04)


def test_sixth_moment_scales_as_power_cubed():
    # oracle: brute-force average over 1e7 independent draws
    rng = np.random.default_rng(12345)
    acc = 0.0
    for _ in range(10):
        z = (rng.standard_normal(10**6) + 1j * rng.standard_normal(10**6)) * np.sqrt(2 / 2)
        acc += np.sum(np.abs(z) ** 6)
    oracle = acc / 10**7
    assert oracle == pytest.approx(48.0, rel=0.01)
    s = gen_complex_gaussian(2.0, 10**6, seed=5)
    assert sample_moments(s, 6) == pytest.approx(oracle, rel=0.04)


def test_moment_of_constant_and_bad_order():
    s = ComplexSignal(np.ones(10), 1.0)
    assert sample_moments(s, 4) == 1.0
    with pytest.raises(ConfigError):
        sample_moments(s, 3)


def test_gaussian_is_deterministic():
    a = gen_complex_gaussian(1.0, 1000, seed=9)
    b = gen_complex_gaussian(1.0, 1000, seed=9)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert not np.array_equal(a.samples, gen_complex_gaussian(1.0, 1000, seed=10).samples)


def test_ofdm_numerology():
    cfg = OfdmConfig()
    assert cfg.sample_rate == 122.88e6
    # oracle: count the loaded bins of one symbol body
    s = gen_ofdm(OfdmConfig(n_symbols=1, window_len=0), 1.0, seed=3).samples
    n_ifft = cfg.n_fft * cfg.oversampling_factor
    body = s[cfg.cp_len * cfg.oversampling_factor:][:n_ifft]
    loaded = np.sum(np.abs(np.fft.fft(body)) > 1e-6 * np.abs(np.fft.fft(body)).max())
    assert loaded * cfg.subcarrier_spacing == cfg.occupied_bandwidth == 18.0e6


@pytest.mark.parametrize("power", [0.3, 1.0, 4.0])
def test_ofdm_power_and_statistics(power):
    s = ofdm_for_length(100_000, power, seed=2)
    assert len(s) == 100_000
    assert s.power == pytest.approx(power, rel=0.01)
    kurt = sample_moments(s, 4) / s.power**2
    assert 1.9 <= kurt <= 2.1


def test_ofdm_spectral_containment():
    s = ofdm_for_length(200_000, 1.0, seed=4)
    spec = power_spectrum(s)
    inband = spec.psd[np.abs(spec.frequencies) < 9e6].mean()
    outside = spec.psd[np.abs(spec.frequencies) > 9.5e6].mean()
    assert 10 * np.log10(outside / inband) < -30


def test_ofdm_window_must_fit_prefix():
    with pytest.raises(ConfigError):
        OfdmConfig(window_len=600)
    with pytest.raises(ConfigError):
        OfdmConfig(n_active=2048)


def test_bin_centred_tone_lands_in_one_bin():
    n, fs = 4096, 1.0
    f0 = 100 * fs / n
    s = ComplexSignal(np.exp(2j * np.pi * f0 * np.arange(4 * n) / fs), fs)
    spec = power_spectrum(s, n)
    k = np.argmax(spec.psd)
    assert spec.frequencies[k] == pytest.approx(f0)
    assert spec.psd[k] >= 0.99 * spec.total_power


def test_band_power():
    s = gen_complex_gaussian(1.0, 50_000, seed=1, sample_rate=10.0)
    spec = power_spectrum(s)
    assert band_power(spec, -5.0, 5.0) == pytest.approx(s.power, rel=1e-9)
    assert spec.total_power == pytest.approx(1.0, rel=0.01)

    tone = ComplexSignal(np.exp(2j * np.pi * 1.0 * np.arange(4096) / 8.0), 8.0)
    tspec = power_spectrum(tone)
    assert band_power(tspec, 2.0, 3.0) <= 1e-6 * tone.power


def test_band_power_of_intermod_line():
    alpha = 0.1
    x = gen_two_tone_passband(10e6, 11e6, 0, 0, 200e6, 2000)
    spec = power_spectrum(amplifier.apply_passband_polynomial(x, alpha), 2000)
    line = 2 * 11e6 - 10e6
    both_sides = band_power(spec, line - 5e4, line + 5e4) + band_power(spec, -line - 5e4, -line + 5e4)
    assert both_sides == pytest.approx((3 * alpha / 4) ** 2 / 2, rel=1e-9)


def test_empty_band_warns():
    spec = power_spectrum(ComplexSignal(np.ones(64), 64.0), 64)
    with pytest.warns(EmptyBandWarning):
        assert band_power(spec, 0.1, 0.2) == 0.0


def test_spectrum_validation():
    with pytest.raises(ConfigError):
        power_spectrum(ComplexSignal(np.ones(10), 1.0), 11)
    with pytest.raises(ConfigError):
        power_spectrum(ComplexSignal(np.ones(0), 1.0), 1)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(16, 5000), seg=st.integers(1, 16), seed=st.integers(0, 2**31))
def test_parseval_holds_for_any_length(n, seg, seed):
    seg = max(1, min(n, seg * 64))
    s = gen_complex_gaussian(1.0, n, seed)
    spec = power_spectrum(s, seg)
    assert spec.total_power == pytest.approx(s.power, rel=1e-9)


def test_parseval_ofdm_default_segment():
    s = ofdm_for_length(100_003, 1.0, seed=8)
    assert power_spectrum(s).total_power == pytest.approx(s.power, rel=1e-9)
