"""Command-line front end.

Subcommands: linear-sweep, simulate, stability, inflation, echo,
weights-audit.  Each accepts --config PATH (key = value lines, see
docs/formats.md), --out DIR, --seed N, --threads N; the process exits 0
iff every configured assertion passed.  A scan config (several epsilon
values) runs its members in a thread pool of --threads workers.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields, replace

from .errors import ConfigError
from .experiments import KINDS, RunConfig, run_experiment
from .weights import WeightParams

_BOOL_KEYS = {"quasistatic_G", "with_v0", "snapshots", "linear_baseline",
              "nonlinear"}
_INT_KEYS = {"seed", "n_x", "n_y", "k_mode", "k_band", "audit_t_points"}
_TUPLE_KEYS = {"echo_etas", "audit_etas"}
_WEIGHT_KEYS = {"N", "s", "lambda0", "rho0", "gamma_star", "rho", "j_max"}


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def _coerce(key: str, value: str):
    if key in _BOOL_KEYS:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    if key in _INT_KEYS:
        return int(value)
    if key in _TUPLE_KEYS:
        return tuple(float(v) for v in value.replace(",", " ").split())
    if key in ("kind", "t_end_policy", "recipe", "out_dir", "echo_policy"):
        return value
    return float(value)


def build_config(kind: str, raw: dict, out_dir: str | None,
                 seed: int | None) -> RunConfig:
    run_keys = {f.name for f in fields(RunConfig)}
    kwargs = {}
    wkwargs = {}
    for key, value in raw.items():
        if key in ("epsilon_scan",):
            continue
        if key in _WEIGHT_KEYS:
            wkwargs[key] = int(value) if key == "j_max" else float(value)
        elif key in run_keys:
            kwargs[key] = _coerce(key, value) if isinstance(value, str) else value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    kwargs["kind"] = kind
    if out_dir is not None:
        kwargs["out_dir"] = out_dir
    if seed is not None:
        kwargs["seed"] = seed
    if wkwargs:
        kwargs["weight_params"] = WeightParams(**wkwargs)
    return RunConfig(**kwargs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shearmhd",
        description="Sheared-MHD spectral laboratory experiment runner")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1,
                       help="parallel workers for epsilon scans")
    args = parser.parse_args(argv)

    raw: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = parse_config_text(fh.read())
    scan = raw.pop("epsilon_scan", None)

    try:
        base = build_config(args.kind, raw, args.out, args.seed)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    configs = [base]
    if scan:
        eps_list = [float(v) for v in str(scan).replace(",", " ").split()]
        configs = [replace(base, epsilon=eps,
                           out_dir=f"{base.out_dir}/eps_{eps:g}")
                   for eps in eps_list]

    if len(configs) == 1 or args.threads <= 1:
        summaries = [run_experiment(c) for c in configs]
    else:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            summaries = list(pool.map(run_experiment, configs))

    ok = True
    for cfg, summary in zip(configs, summaries):
        for name, passed in summary.get("assertions", {}).items():
            status = "pass" if passed else "FAIL"
            print(f"[{status}] {cfg.out_dir}: {name}")
            ok = ok and bool(passed)
    print(json.dumps({"runs": len(configs), "all_assertions_pass": ok},
                     sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
