"""Command-line entry point: ``oobarray <subcommand> --config ... --out ...``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__, scenarios
from .config import load_config
from .errors import ConfigError

log = logging.getLogger("oobarray")


def _write_manifest(out_dir: Path, command, cfg, files, extra=None):
    manifest = {
        "command": command,
        "version": __version__,
        "config": cfg.model_dump(mode="json"),
        "outputs": sorted(p.name for p in files),
    }
    if extra:
        manifest.update(_finite(extra))
    path = out_dir / "run_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _finite(obj):
    """Replace NaN/inf with None so the manifest stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _cmd_two_tone(cfg, out, figures):
    res = scenarios.run_two_tone(cfg)
    files = scenarios.write_two_tone(res, out)
    if figures:
        from .plotting import plot_two_tone
        files += plot_two_tone(res, out)
    for l in res.lines:
        log.info("%-8s %-7s %12.6g Hz  amplitude %.12g (expected %.12g)",
                 l.domain, l.product, l.frequency_hz, l.amplitude, l.expected)
    return files, {"passed": res.passed}, 0 if res.passed else 1


def _cmd_beampattern(cfg, out, figures):
    res = scenarios.run_beampattern(cfg)
    files = scenarios.write_beampattern(res, out)
    if figures:
        from .plotting import plot_beampatterns
        files += plot_beampatterns(res, out)
    for k, v in sorted(res.summary.items()):
        log.info("%s = %.6g", k, v)
    return files, {"summary": res.summary}, 0


def _cmd_gain_curve(cfg, out, figures):
    res = scenarios.run_gain_curve(cfg)
    files = scenarios.write_gain_curve(res, out)
    if figures:
        from .plotting import plot_gain_curve
        files += plot_gain_curve(res, out)
    log.info("M = %d, noncoherent floor 1/sqrt(M) = %.6g", res.M, res.noncoherent_floor)
    return files, {"noncoherent_floor": res.noncoherent_floor}, 0


def _cmd_validate(cfg, out, figures):
    rep = scenarios.run_validation(cfg)
    files = scenarios.write_validation(rep, out)
    for c in rep.checks:
        log.info("%s %s analytic=%.6g simulated=%.6g tol=%.3g",
                 "PASS" if c.passed else "FAIL", c.name, c.analytic, c.simulated, c.tolerance)
    n_fail = sum(not c.passed for c in rep.checks)
    log.info("%d checks, %d failed", len(rep.checks), n_fail)
    return files, {"passed": rep.passed, "n_checks": len(rep.checks), "n_failed": n_fail}, \
        0 if rep.passed else 1


COMMANDS = {
    "two-tone": _cmd_two_tone,
    "beampattern": _cmd_beampattern,
    "gain-curve": _cmd_gain_curve,
    "validate": _cmd_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="oobarray", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, default=None, help="scenario JSON (defaults if omitted)")
        sp.add_argument("--out", type=Path, default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="overrides every seed in the config")
        sp.add_argument("--figures", action="store_true", help="also render PNG figures")
        sp.add_argument("-q", "--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        out = args.out or Path(cfg.outputs.directory or ".")
        out.mkdir(parents=True, exist_ok=True)
        figures = args.figures or cfg.outputs.figures
        files, extra, code = COMMANDS[args.command](cfg, out, figures)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    _write_manifest(out, args.command, cfg, files, extra)
    return code


if __name__ == "__main__":
    sys.exit(main())
