"""Command line entry point: ``python -m nibp <subcommand>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import bounds as bd
from . import experiments as ex


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--backend", choices=("dense", "pauli"), help="generic simulator backend")
    p.add_argument("--jobs", type=int, help="worker processes")


def _config(args) -> ex.ExperimentConfig:
    return ex.load_config(args.config, seed=args.seed, backend=args.backend, jobs=args.jobs,
                          out=str(args.out) if args.out else None)


def _out_dir(args, cfg: ex.ExperimentConfig, name: str) -> Path:
    return args.out if args.out else Path(cfg.out) / name


def _print(summary) -> None:
    print(json.dumps(ex._json_safe(summary), indent=2, sort_keys=True))


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.instances is not None:
        cfg = cfg.replace(verify=ex.VerifyOptions(**{**cfg.verify.__dict__,
                                                     "instances": args.instances}))
    summary = ex.run_bound_verification(cfg, _out_dir(args, cfg, "verify"))
    _print(summary)
    return 0 if summary["violations"] == 0 else 1


def cmd_qaoa(args) -> int:
    cfg = _config(args)
    _, summary = ex.run_qaoa_experiment(cfg, _out_dir(args, cfg, "qaoa"))
    _print(summary)
    return 0


def cmd_landscape(args) -> int:
    cfg = _config(args)
    pair = tuple(args.params) if args.params else None
    _print(ex.run_landscape(cfg, _out_dir(args, cfg, "landscape"), pair, args.grid))
    return 0


def cmd_gradcheck(args) -> int:
    cfg = _config(args)
    summary = ex.run_gradcheck(cfg, _out_dir(args, cfg, "gradcheck"))
    _print(summary)
    return 0 if summary["failures"] == 0 else 1


def cmd_bounds(args) -> int:
    inp = bd.BoundInputs(n=args.n, L=args.L, q=args.q, N_lm=args.N_lm, eta_inf=args.eta,
                         N_O=args.N_O, omega_inf=args.omega, b=args.b, q_M=args.q_M, w=args.w,
                         trace_O=args.trace_O)
    rows = bd.table_rows(inp, args.alpha, args.c)
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        keys = list(rows[0]["inputs"])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "formula", "value"] + keys)
        for r in rows:
            w.writerow([r["name"], r["formula"], repr(float(r["value"]))]
                       + [r["inputs"][k] for k in keys])
        text = buf.getvalue()
    sys.stdout.write(text)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / f"bounds.{args.format}").write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nibp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="fuzz the cost and gradient bounds")
    _common(p)
    p.add_argument("--instances", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("qaoa", help="noisy QAOA MaxCut training study")
    _common(p)
    p.set_defaults(func=cmd_qaoa)

    p = sub.add_parser("landscape", help="2-parameter cost landscapes at several depths")
    _common(p)
    p.add_argument("--params", type=int, nargs=2, metavar=("I", "J"))
    p.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("gradcheck", help="exact vs finite-difference gradients")
    _common(p)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True, help="unitary layers (L + 1 noise channels)")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--N-lm", dest="N_lm", type=int, default=1)
    p.add_argument("--eta", type=float, default=1.0, help="largest generator coefficient")
    p.add_argument("--N-O", dest="N_O", type=int, default=1)
    p.add_argument("--omega", type=float, default=1.0, help="largest observable coefficient")
    p.add_argument("--b", type=int, default=1, help="factors sharing the parameter")
    p.add_argument("--q-M", dest="q_M", type=float)
    p.add_argument("--w", type=int, help="smallest observable term weight")
    p.add_argument("--trace-O", dest="trace_O", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
