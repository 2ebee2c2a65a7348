import math

import numpy as np
import pytest

from oobarray import analysis
from oobarray.amplifier import CUBIC, PhaseDeviationSpec, apply_bank, make_pa_bank
from oobarray.array import (
    ArrayConfig,
    UserConfig,
    band_covariances,
    beampattern,
    far_field_signal,
    intermod_directions,
    local_peaks,
    precode,
    precoder_gain,
    propagation_vector,
    spurious_directions,
    steering_phases,
)
from oobarray.errors import ConfigError
from oobarray.waveform import ComplexSignal, gen_complex_gaussian


def test_steering_phase_examples():
    arr = ArrayConfig(4, 0.5)
    np.testing.assert_allclose(steering_phases(0.0, arr), 0.0)
    np.testing.assert_allclose(steering_phases(30.0, arr), -np.pi * 0.5 * np.arange(4))
    with pytest.raises(ConfigError):
        steering_phases(90.0, arr)


def test_precode_power_and_phase_slope():
    arr = ArrayConfig(16)
    s = gen_complex_gaussian(1.0, 4000, seed=1)
    x = precode([UserConfig(20.0, s)], arr, 0.7)
    assert x.samples.shape == (16, 4000)
    assert np.mean(np.abs(x.samples) ** 2) == pytest.approx(0.7, rel=1e-12)
    ratio = x.samples[1:, 0] / x.samples[:-1, 0]
    np.testing.assert_allclose(np.angle(ratio), np.angle(np.exp(-1j * np.pi * math.sin(math.radians(20)))),
                               atol=1e-12)


def test_precoder_gain_matches_precode():
    arr = ArrayConfig(8)
    users = [UserConfig(-15, gen_complex_gaussian(1.0, 1000, 1)), UserConfig(12, gen_complex_gaussian(1.0, 1000, 2))]
    g = precoder_gain(users, arr, 2.0)
    x = precode(users, arr, 2.0).samples
    ref = sum(np.exp(1j * steering_phases(u.angle, arr))[:, None] * u.signal.samples for u in users)
    np.testing.assert_allclose(x, g * ref, rtol=1e-12)


def test_far_field_coherent_gain_is_m_squared():
    M = 12
    arr = ArrayConfig(M)
    s = gen_complex_gaussian(1.0, 2000, seed=3)
    x = precode([UserConfig(25.0, s)], arr, 1.0)
    r = far_field_signal(x, 25.0, arr)
    assert r.power == pytest.approx(M**2 * 1.0, rel=1e-12)


def test_two_antenna_null():
    # d = 1 wavelength, steering to 0, the array nulls at asin(1/2) = 30 deg
    arr = ArrayConfig(2, 1.0)
    s = ComplexSignal(np.ones((2, 8)), 1.0)
    assert far_field_signal(s, 30.0, arr).power == pytest.approx(0.0, abs=1e-25)
    assert far_field_signal(s, 0.0, arr).power == pytest.approx(4.0)


def test_deviated_bank_reduces_coherent_distortion():
    M, sigma = 32, 0.8
    arr = ArrayConfig(M)
    s = gen_complex_gaussian(1.0, 20_000, seed=5)
    x = precode([UserConfig(0.0, s)], arr, 1.0)
    lin = x.samples
    coherent = apply_bank(x, make_pa_bank(CUBIC, M, PhaseDeviationSpec(), 0)).samples - lin
    r0 = far_field_signal(ComplexSignal(coherent[:, :200], 1.0), 0.0, arr).power
    ratios = []
    for seed in range(300):
        bank = make_pa_bank(CUBIC, M, PhaseDeviationSpec("gaussian", sigma), seed)
        y = apply_bank(x, bank).samples - lin
        r = far_field_signal(ComplexSignal(y[:, :200], 1.0), 0.0, arr).power
        ratios.append(r / r0)
    expected = analysis.beamforming_gain_closed_form(M, sigma, "gaussian").gain / M**2
    assert np.mean(ratios) == pytest.approx(expected, rel=0.05)


def test_beampattern_equals_direct_route():
    arr = ArrayConfig(6)
    fs = 122.88e6
    users = [UserConfig(-20, gen_complex_gaussian(1.0, 3000, 1, fs)),
             UserConfig(35, gen_complex_gaussian(1.0, 3000, 2, fs))]
    x = precode(users, arr, 3.0)
    y = ComplexSignal(x.samples - 0.05 * np.abs(x.samples) ** 2 * x.samples, fs)
    angles = np.array([-70.0, -20.0, 0.0, 13.3, 35.0, 80.0])
    for seg in (None, 512):
        bp = beampattern(y, angles, 20e6, arr, seg)
        for i, a in enumerate(angles):
            r = far_field_signal(y, a, arr)
            split = analysis.inband_oob_split(r, 20e6, seg)
            assert bp.p_inband[i] == pytest.approx(split.p_inband, rel=1e-9)
            assert bp.p_oob[i] == pytest.approx(split.p_oob, rel=1e-9)
            assert bp.p_total[i] == pytest.approx(r.power, rel=1e-9)


def test_single_antenna_pattern_is_flat():
    arr = ArrayConfig(1)
    s = gen_complex_gaussian(1.0, 1000, 4, 100e6)
    y = precode([UserConfig(10.0, s)], arr, 1.0)
    bp = beampattern(y, np.linspace(-80, 80, 17), 20e6, arr)
    np.testing.assert_allclose(bp.p_total, bp.p_total[0], rtol=1e-12)


def test_linear_pattern_peaks_at_users():
    arr = ArrayConfig(32)
    fs = 122.88e6
    users = [UserConfig(-15, gen_complex_gaussian(1.0, 4000, 1, fs)),
             UserConfig(12, gen_complex_gaussian(1.0, 4000, 2, fs))]
    grid = np.round(np.arange(-900, 901) * 0.1, 10)
    bp = beampattern(precode(users, arr, 1.0), grid, 20e6, arr)
    assert sorted(local_peaks(grid, bp.p_total, count=2)) == [-15.0, 12.0]


def test_covariance_total_matches_band_sum_for_wide_channel():
    arr = ArrayConfig(3)
    y = ComplexSignal(gen_complex_gaussian(1.0, 3 * 1024, 9).samples.reshape(3, 1024), 10.0)
    R = band_covariances(y, 10.0 / 1.5)  # bands cover (-5, 5) exactly
    np.testing.assert_allclose(R["inband"] + R["oob_lower"] + R["oob_upper"], R["total"], atol=1e-12)


@pytest.mark.parametrize(
    "t1, t2, expected",
    [
        (-15.0, 12.0, (42.426, -46.515)),
        (0.0, 30.0, (90.0, -30.0)),
        (20.0, 20.0, (20.0, 20.0)),
        (-50.0, 40.0, (None, None)),
    ],
)
def test_spurious_direction_examples(t1, t2, expected):
    got = spurious_directions(t1, t2)
    for g, e in zip(got, expected):
        if e is None:
            assert g is None
        else:
            assert g == pytest.approx(e, abs=1e-3)


def test_spurious_directions_brute_force():
    # oracle: maximise |sum_m e^{j m pi (sin t - (2 sin t2 - sin t1))}| on a fine grid
    arr = ArrayConfig(60)
    t = np.arange(-89999, 90000) * 1e-3
    phase = lambda a: steering_phases(a, arr)
    w = np.exp(1j * (2 * phase(12.0) - phase(-15.0)))
    af = np.abs(propagation_vector(t, arr) @ w)
    assert t[np.argmax(af)] == pytest.approx(spurious_directions(-15.0, 12.0)[0], abs=2e-3)


def test_fifth_order_folding():
    raw = intermod_directions(-15.0, 12.0, order=5)
    assert raw == (None, None)
    folded = intermod_directions(-15.0, 12.0, order=5, spacing=0.5)
    assert folded[0] == pytest.approx(-59.16, abs=0.01)
    assert folded[1] == pytest.approx(53.87, abs=0.01)
    with pytest.raises(ConfigError):
        intermod_directions(0, 1, order=4)


def test_far_field_reciprocity_in_total_power():
    # swapping which signal goes to which angle leaves the summed received power unchanged
    arr = ArrayConfig(10)
    s1, s2 = gen_complex_gaussian(1.0, 5000, 1), gen_complex_gaussian(1.0, 5000, 2)
    a = precode([UserConfig(-15, s1), UserConfig(12, s2)], arr, 1.0)
    b = precode([UserConfig(-15, s2), UserConfig(12, s1)], arr, 1.0)
    pa = far_field_signal(a, -15, arr).power + far_field_signal(a, 12, arr).power
    pb = far_field_signal(b, -15, arr).power + far_field_signal(b, 12, arr).power
    assert pa == pytest.approx(pb, rel=0.05)


def test_validation_errors():
    with pytest.raises(ConfigError):
        ArrayConfig(0)
    with pytest.raises(ConfigError):
        UserConfig(95.0, gen_complex_gaussian(1.0, 10, 1))
    with pytest.raises(ConfigError):
        precode([], ArrayConfig(2), 1.0)
    with pytest.raises(ConfigError):
        far_field_signal(ComplexSignal(np.ones((3, 4)), 1.0), 0.0, ArrayConfig(2))
