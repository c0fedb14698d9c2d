"""Command-line front end.

    subnyq estimate --fh 60 --factors 3,4,5 --freqs 25,50 --noiseless
    subnyq audit --fh 60 --factors 3,4,5 --freqs 25,50
    subnyq synthesize --fh 60 --factors 3,4,5 --freqs 25,50 --snr-db 20 --out run/
    subnyq sweep success --out results/
    subnyq sweep mse --config mse.ini --trials 500 --out results/

Settings come from an INI file (``--config``) with ``[signal]``, ``[channels]``,
``[estimate]`` and ``[sweep]`` sections; flags override file values.
Exit codes: 0 ok, 1 configuration error, 2 collision or degenerate estimate.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
import tempfile
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .harness import (ExperimentConfig, mse_csv, mse_sweep_config, run_mse_sweep, run_success_sweep,
                      scenario_csv, success_csv)
from .model import ChannelConfig, ChannelSequence, SignalSpec, noise_variance_for_snr, synthesize_multichannel
from .screen import MAX_WINDOW, run_pipeline
from .unfold import audit_ambiguity, check_coprime

EXIT_OK, EXIT_CONFIG, EXIT_COLLISION = 0, 1, 2

# flag dest -> dotted config keys, first match wins
CONFIG_KEYS = {
    "fh": ("signal.fh",),
    "freqs": ("signal.freqs",),
    "amplitudes": ("signal.amplitudes",),
    "phases": ("signal.phases",),
    "snr_db": ("signal.snr_db", "sweep.snr_db"),
    "seed": ("signal.seed", "sweep.seed"),
    "factors": ("channels.factors",),
    "snapshots": ("channels.snapshots",),
    "window": ("channels.window",),
    "k": ("estimate.k", "sweep.k"),
    "mode": ("estimate.mode", "sweep.mode"),
    "trials": ("sweep.trials",),
    "band": ("sweep.band",),
    "min_separation": ("sweep.min_separation",),
    "amplitude_range": ("sweep.amplitude_range",),
    "baseline_span": ("sweep.baseline_span",),
}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _int_range(text: str) -> list[int]:
    """``"1-8"`` or ``"1,3,5"``."""
    text = str(text).strip()
    if "-" in text and "," not in text:
        lo, hi = _ints(text.replace("-", ","))
        return list(range(lo, hi + 1))
    return _ints(text)


class Settings:
    """Flag values layered over a config file."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file: dict[str, str] = {}
        if getattr(args, "config", None):
            cp = configparser.ConfigParser()
            if not cp.read(args.config):
                raise ConfigError(f"cannot read config file {args.config}")
            for section in cp.sections():
                for key, value in cp.items(section):
                    self.file[f"{section}.{key}"] = value

    def get(self, name: str, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        for key in CONFIG_KEYS.get(name, ()):
            if key in self.file:
                return self.file[key]
        return default

    def require(self, name: str):
        value = self.get(name)
        if value is None:
            raise ConfigError(f"missing --{name.replace('_', '-')} (or its config-file key)")
        return value

    def echo(self) -> dict:
        out = dict(self.file)
        out.update({k: v for k, v in vars(self.args).items() if v is not None and k != "func"})
        return out


def _factors(settings: Settings) -> tuple[int, int, int]:
    factors = _ints(settings.require("factors"))
    if len(factors) != 3:
        raise ConfigError(f"--factors needs exactly three values, got {factors}")
    if min(factors) < 1:
        raise ConfigError("factors must be positive integers")
    try:
        check_coprime(factors)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return tuple(factors)


def _window(settings: Settings, factors) -> int:
    a = min(factors)
    N = int(settings.get("window", MAX_WINDOW))
    return (N // a) * a


def _signal(settings: Settings) -> SignalSpec:
    fH = float(settings.require("fh"))
    freqs = _floats(settings.require("freqs"))
    amps = settings.get("amplitudes")
    phases = settings.get("phases")
    amps = _floats(amps) if amps is not None else None
    phases = _floats(phases) if phases is not None else None
    try:
        spec = SignalSpec.from_arrays(freqs, fH, amps, phases, seed=int(settings.get("seed", 0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    snr = settings.get("snr_db")
    if snr is not None and not getattr(settings.args, "noiseless", False):
        snr = _floats(snr)[0]
        spec = SignalSpec(spec.components, fH, noise_variance_for_snr(spec.signal_power, snr), spec.seed)
    return spec


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_atomic(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_manifest(path: Path, command: str, settings: Settings, config: dict, seed,
                   started: str, outputs) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
        "arguments": settings.echo(),
        "started": started,
        "finished": _now(),
        "outputs": [str(p) for p in outputs],
    }
    write_atomic(path, json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


def _read_samples(path: str, fH: float) -> list[ChannelSequence]:
    by_factor: dict[int, list[tuple[int, complex]]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            by_factor.setdefault(int(row["factor"]), []).append(
                (int(row["n"]), complex(float(row["real"]), float(row["imag"]))))
    seqs = []
    for factor, rows in by_factor.items():
        rows.sort()
        n = [r[0] for r in rows]
        if n != list(range(n[0], n[0] + len(n))):
            raise ConfigError(f"samples for factor {factor} are not contiguous in n")
        seqs.append(ChannelSequence(ChannelConfig(factor, n[0]), np.array([r[1] for r in rows]), fH))
    return seqs


def cmd_estimate(args) -> int:
    settings = Settings(args)
    started = _now()
    factors = _factors(settings)
    N = _window(settings, factors)
    mode = settings.get("mode", "combined")
    truth = None
    if args.samples:
        fH = float(settings.require("fh"))
        K = int(settings.require("k"))
        seqs = {s.factor: s for s in _read_samples(args.samples, fH)}
        missing = [f for f in factors if f not in seqs]
        if missing:
            raise ConfigError(f"sample file has no channel with factor {missing}")
        seqs = [seqs[f] for f in factors]
        seed = None
    else:
        spec = _signal(settings)
        K = int(settings.get("k", spec.K))
        snapshots = int(settings.get("snapshots", 100))
        seqs = synthesize_multichannel(spec, [ChannelConfig(f) for f in factors], snapshots + N - 1)
        truth = spec.freqs
        seed = spec.seed
    try:
        result = run_pipeline(seqs, K, N, mode=mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if args.porcelain:
        for f in result.final_freqs:
            print(f"{f:.9f}")
    else:
        print(" ".join(f"{f:.9f}" for f in result.final_freqs))
    if truth is not None and len(truth) == len(result.final_freqs):
        from .harness import mse_metric
        print(f"mse {mse_metric(result.final_freqs, truth):.9g}",
              file=sys.stderr if args.porcelain else sys.stdout)
    if result.collision_flag:
        print("warning: collision or degenerate estimate", file=sys.stderr)

    if args.out:
        out = Path(args.out)
        csv_path = out / "scenario.csv"
        write_atomic(csv_path, scenario_csv(result))
        write_manifest(out / "estimate.manifest.json", "estimate", settings,
                       {"factors": factors, "window": result.window_len, "mode": mode, "K": K},
                       seed, started, [csv_path])
    return EXIT_COLLISION if result.collision_flag else EXIT_OK


def cmd_audit(args) -> int:
    settings = Settings(args)
    factors = _factors(settings)
    fH = float(settings.require("fh"))
    freqs = _floats(settings.require("freqs"))
    try:
        report = audit_ambiguity(freqs, factors, fH, args.tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"{'f_m':>12} {'f_l':>12} {'channels':>9} {'multiple':>8}")
    for c in report.conflicts:
        m, l = c.pair
        print(f"{freqs[m]:>12.6g} {freqs[l]:>12.6g} {'%d,%d' % c.channel_pair:>9} {c.multiple:>8d}")
    if not report.consistent:
        print("internal-consistency error: pair in conflict on every channel pair", file=sys.stderr)
    return EXIT_OK


def cmd_synthesize(args) -> int:
    settings = Settings(args)
    started = _now()
    factors = _factors(settings)
    spec = _signal(settings)
    N = _window(settings, factors)
    snapshots = int(settings.get("snapshots", 100))
    seqs = synthesize_multichannel(spec, [ChannelConfig(f) for f in factors], snapshots + N - 1)
    lines = ["factor,n,real,imag"]
    for s in seqs:
        lines += [f"{s.factor},{n},{x.real:.17g},{x.imag:.17g}" for n, x in zip(s.indices, s.samples)]
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        write_atomic(out / "samples.csv", text)
        write_manifest(out / "synthesize.manifest.json", "synthesize", settings,
                       {"factors": factors, "num_samples": snapshots + N - 1,
                        "noise_variance": spec.noise_variance}, spec.seed, started, [out / "samples.csv"])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep_config(settings: Settings, kind: str) -> ExperimentConfig:
    base = ExperimentConfig() if kind == "success" else mse_sweep_config()
    kw = {}
    if settings.get("fh") is not None:
        kw["fH"] = float(settings.get("fh"))
        if settings.get("band") is None:
            kw["band"] = (0.0, kw["fH"])
    if settings.get("factors") is not None:
        kw["factors"] = _factors(settings)
    if settings.get("k") is not None:
        kw["K_values"] = tuple(_int_range(settings.get("k")))
    if settings.get("snr_db") is not None:
        kw["snr_db"] = tuple(_floats(settings.get("snr_db")))
    for name, field_, conv in (("trials", "num_trials", int), ("snapshots", "snapshots", int),
                               ("window", "window", int), ("seed", "seed", int), ("mode", "mode", str),
                               ("min_separation", "min_separation", float),
                               ("baseline_span", "baseline_span", str)):
        if settings.get(name) is not None:
            kw[field_] = conv(settings.get(name))
    for name, field_ in (("band", "band"), ("amplitude_range", "amplitude_range")):
        if settings.get(name) is not None:
            kw[field_] = tuple(_floats(settings.get(name)))
    try:
        return ExperimentConfig(**{**asdict(base), **kw})
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def cmd_sweep(args) -> int:
    settings = Settings(args)
    started = _now()
    cfg = _sweep_config(settings, args.kind)

    def progress(msg):
        print(msg, file=sys.stderr, flush=True)

    if args.kind == "success":
        text = success_csv(run_success_sweep(cfg, progress=progress))
    else:
        text = mse_csv(run_mse_sweep(cfg, progress=progress))
    out = Path(args.out or ".")
    csv_path = out / f"{args.kind}.csv"
    write_atomic(csv_path, text)
    write_manifest(out / f"{args.kind}.manifest.json", f"sweep {args.kind}", settings,
                   asdict(cfg), cfg.seed, started, [csv_path])
    progress(f"wrote {csv_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file with [signal], [channels], [estimate], [sweep] sections")
    common.add_argument("--fh", help="band limit in Hz")
    common.add_argument("--factors", help="undersampling factors a,b,c (pairwise coprime)")
    common.add_argument("--freqs", help="true frequencies in Hz, comma-separated")
    common.add_argument("--amplitudes", help="component amplitudes (default 1)")
    common.add_argument("--phases", help="component phases in radians (default 0)")
    common.add_argument("--k", help="number of tones; a range like 1-8 for sweeps")
    common.add_argument("--snr-db", dest="snr_db", help="SNR in dB; a list for MSE sweeps")
    common.add_argument("--trials", help="Monte Carlo trials per point")
    common.add_argument("--snapshots", help="snapshots T per channel (default 100)")
    common.add_argument("--window", help="window length N, rounded down to a multiple of the unfolding factor")
    common.add_argument("--seed", help="random seed")
    common.add_argument("--mode", choices=("combined", "intersect"))
    common.add_argument("--out", help="output directory")

    parser = _Parser(prog="subnyq", description="Sub-Nyquist multi-tone frequency estimation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="run the three-channel pipeline once")
    p.add_argument("--noiseless", action="store_true", help="ignore any SNR setting")
    p.add_argument("--samples", help="CSV of samples (factor,n,real,imag) instead of synthesizing")
    p.add_argument("--porcelain", action="store_true", help="one frequency per line, nothing else on stdout")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("audit", parents=[common], help="list ambiguous frequency pairs")
    p.add_argument("--tol", type=float, default=1e-9, help="integrality tolerance")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("synthesize", parents=[common], help="write sub-Nyquist samples as CSV")
    p.add_argument("--noiseless", action="store_true")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo sweeps")
    p.add_argument("kind", choices=("success", "mse"))
    p.add_argument("--band", help="frequency band lo,hi in Hz")
    p.add_argument("--min-separation", dest="min_separation")
    p.add_argument("--amplitude-range", dest="amplitude_range")
    p.add_argument("--baseline-span", dest="baseline_span", choices=("snapshots", "duration"))
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"subnyq: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
