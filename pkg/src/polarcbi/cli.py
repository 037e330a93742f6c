"""Command-line interface: construct, analyze, coupling, interleave-map, simulate."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .channel import ChannelParams
from .correlation import measure_coupling, profile_of
from .harness import SCHEMES, ExperimentConfig, emit_results, format_results, run_experiment
from .interleave import build_bi_map, build_cbi_map, build_direct_map
from .ldpc import build_tanner_h
from .polar import (DEFAULT_DESIGN_SNR_DB, construct_awgn, construct_bec, format_code_spec,
                    read_code_spec)


def _param_list(values):
    out = []
    for v in values:
        out.extend(float(t) for t in str(v).replace(",", " ").split())
    return out


def _code_args(p):
    p.add_argument("--spec", help="code-spec file written by `construct`")
    p.add_argument("--n", type=int, default=256, help="block length N")
    p.add_argument("--rate", type=float, default=0.25, help="code rate K/N")
    p.add_argument("--channel", choices=("bec", "awgn"), default="awgn")
    p.add_argument("--param", nargs="+", default=None,
                   help="erasure probability (bec) or Eb/N0 in dB (awgn); list for sweeps")


def _load_code(args):
    if args.spec:
        return read_code_spec(args.spec)
    K = round(args.n * args.rate)
    params = _param_list(args.param) if args.param else []
    if args.channel == "bec":
        return construct_bec(args.n, params[0] if params else 0.5, K)
    return construct_awgn(args.n, params[0] if params else DEFAULT_DESIGN_SNR_DB, K)


def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_construct(args):
    _write(format_code_spec(_load_code(args)), args.out)


def cmd_analyze(args):
    prof = profile_of(_load_code(args))
    _write(f"K_c={prof.K_c}\nK_uc={prof.K_uc}\n"
           f"A_c={','.join(map(str, prof.correlated))}\n"
           f"A_uc={','.join(map(str, prof.uncorrelated))}\n", args.out)


def cmd_coupling(args):
    code = _load_code(args)
    params = _param_list(args.param) if args.param else [0.2]
    channel = ChannelParams(args.channel, params[0], code.rate)
    cols = [int(c) for c in _param_list(args.columns)] if args.columns else list(profile_of(code).uncorrelated)
    report = measure_coupling(code, channel, cols, args.trials, args.seed)
    _write(report.to_csv(), args.out)


def cmd_interleave_map(args):
    code = _load_code(args)
    n_l = build_tanner_h().n if args.nl is None else args.nl
    if args.scheme == "direct":
        m = build_direct_map(n_l, code.K)
    elif args.scheme == "bi":
        m = build_bi_map(n_l, code.K)
    else:
        m = build_cbi_map(n_l, code.K, profile_of(code).correlated_relative)
    _write(m.to_csv(), args.out)


_SIM_FLAGS = {
    "scheme": "scheme", "n": "n", "rate": "rate", "channel": "channel", "param": "params",
    "seed": "seed", "min_frames": "min_frames", "max_frames": "max_frames",
    "target_errors": "target_errors", "bp_iters": "bp_iters", "systematic": "systematic",
    "spec": "spec_path", "design_param": "design_param", "chunk_frames": "chunk_frames",
    "ldpc_llr": "ldpc_llr", "workers": "workers",
}


def simulate_config(args) -> ExperimentConfig:
    """Defaults, then the JSON config file, then explicit flags."""
    settings = {}
    if args.config:
        settings = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(settings) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for flag, key in _SIM_FLAGS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        settings[key] = _param_list(value) if key == "params" else value
    if "params" in settings:
        settings["params"] = [float(v) for v in settings["params"]]
    cfg = ExperimentConfig(**settings)
    cfg.validate()
    return cfg


def cmd_simulate(args):
    cfg = simulate_config(args)
    result = run_experiment(cfg)
    if args.out:
        emit_results(result, args.out)
    else:
        sys.stdout.write(format_results(result))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarcbi", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a polar code and write its code-spec file")
    _code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="correlated / uncorrelated information split")
    _code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("coupling", help="Monte-Carlo error coupling of SC decoding")
    _code_args(p)
    p.add_argument("--columns", nargs="+", help="1-based information columns to measure")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("interleave-map", help="dump an LDPC-to-polar routing table")
    _code_args(p)
    p.add_argument("--scheme", choices=("direct", "bi", "cbi"), default="cbi")
    p.add_argument("--nl", type=int, default=None, help="LDPC block length (default 155)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_interleave_map)

    p = sub.add_parser("simulate", help="BER/BLER sweep")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--spec")
    p.add_argument("--n", type=int)
    p.add_argument("--rate", type=float)
    p.add_argument("--channel", choices=("bec", "awgn"))
    p.add_argument("--param", nargs="+")
    p.add_argument("--design-param", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-frames", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--target-errors", type=int)
    p.add_argument("--bp-iters", type=int)
    p.add_argument("--systematic", action="store_true", default=None)
    p.add_argument("--chunk-frames", type=int)
    p.add_argument("--ldpc-llr", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
