"""Optional PNG figures rendered next to the CSV outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no timestamps or version strings, so reruns give identical files
_META = {"Software": None}
FLOOR_DB = -70.0


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return Path(path)


def plot_beampatterns(result, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    paths = []
    theta = np.deg2rad(result.angles)

    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(6, 5))
    for name, style in (("linear", "r--"), ("z1", "C0"), ("z2", "C1"), ("u1", "C2"), ("u2", "C3")):
        if name in result.patterns:
            ax.plot(theta, np.maximum(result.db(name), FLOOR_DB), style, lw=1, label=name)
    _polar_axes(ax)
    ax.legend(loc="lower left", fontsize=8)
    ax.set_title("Full-bandwidth power per term (dB)")
    paths.append(_save(fig, out_dir / "beampattern_terms.png"))

    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(6, 5))
    ax.plot(theta, np.maximum(result.db("output", "p_inband"), FLOOR_DB), "k", lw=1, label="inband")
    ax.plot(theta, np.maximum(result.db("output", "p_oob"), FLOOR_DB), "r", lw=1, label="OOB")
    _polar_axes(ax)
    ax.legend(loc="lower left", fontsize=8)
    ax.set_title("Inband and adjacent-channel power (dB)")
    paths.append(_save(fig, out_dir / "beampattern_oob.png"))
    return paths


def _polar_axes(ax):
    ax.set_theta_zero_location("N")
    ax.set_theta_direction(-1)
    ax.set_thetamin(-90)
    ax.set_thetamax(90)
    ax.set_ylim(FLOOR_DB, 5)
    ax.set_rticks([-60, -40, -20, 0])
    ax.set_rlabel_position(80)
    ax.tick_params(axis="y", labelsize=7)


def plot_gain_curve(result, out_dir) -> list[Path]:
    rows = np.array(result.rows)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rows[:, 0], rows[:, 1], "C0", label="Gaussian")
    ax.plot(rows[:, 0], rows[:, 2], "C1", label="uniform")
    ax.plot(rows[:, 0], rows[:, 3], "C0o", ms=3, mfc="none", label="Gaussian (MC)")
    ax.plot(rows[:, 0], rows[:, 4], "C1s", ms=3, mfc="none", label="uniform (MC)")
    ax.axhline(result.noncoherent_floor, color="k", ls="--", lw=1, label=r"$1/\sqrt{M}$")
    ax.set_xlabel(r"$\sigma$ (rad)")
    ax.set_ylabel("relative beamforming gain")
    ax.set_ylim(0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, Path(out_dir) / "gain_curve.png")]


def plot_two_tone(result, out_dir) -> list[Path]:
    lines = [l for l in result.lines if l.domain == "passband"]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    f = np.array([l.frequency_hz for l in lines]) / 1e6
    a = np.array([l.amplitude for l in lines])
    ax.stem(f, 20 * np.log10(np.maximum(a, 1e-12)), bottom=-120)
    ax.set_xlabel("frequency (MHz)")
    ax.set_ylabel("line amplitude (dB)")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return [_save(fig, Path(out_dir) / "two_tone.png")]
