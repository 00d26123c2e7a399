"""Command-line front end: ``catbitflip {rate,sweep,leakage,validate}``.

Rates are reported in units of kappa2 (kappa2 = 1 throughout).  Exit codes:
0 success, 1 validation checks failed, 2 configuration error, 3 numerical
non-convergence, 4 internal error.  Errors go to stderr as one JSON object
``{"code", "message", "context"}``.
"""

import argparse
import json
import sys
import warnings

import numpy as np

from .config import FORMATS, METHODS, RunConfig
from .errors import CatBitflipError, ConfigError
from .sweep import run_leakage, run_rate, run_sweep, write_rows
from .validation import SUITES, report_json, run_validate


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_run_flags(p, grid):
    p.add_argument("--config", help="JSON run configuration; flags below override its fields")
    p.add_argument("--kind", help="perturbation kind (photon_loss, zgate, detuning, ...)")
    p.add_argument("--strength", type=float, help="perturbation strength in units of kappa2")
    p.add_argument("--kappa1", type=float, dest="strength", help="alias of --strength")
    p.add_argument("--m", type=int, help="generic_dissipator power of adag")
    p.add_argument("--n", type=int, help="generic_dissipator power of a")
    if grid:
        p.add_argument("--alpha2", type=float, nargs="+", help="alpha^2 grid (one value for rate)")
    else:
        p.add_argument("--alpha2", type=float, nargs=1, help="alpha^2")
    p.add_argument("--method", nargs="+", choices=METHODS, help="methods to run")
    p.add_argument("--dim", type=int, help="Fock cutoff override")
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format")


def build_parser():
    parser = _Parser(prog="catbitflip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_run_flags(sub.add_parser("rate", help="bit-flip rate at one alpha^2"), grid=False)
    _add_run_flags(sub.add_parser("sweep", help="bit-flip rates over an alpha^2 grid"), grid=True)
    p = sub.add_parser("leakage", help="leakage l(t) of |0c><0c| under L0 + L1")
    _add_run_flags(p, grid=False)
    p.add_argument("--t-max", type=float, default=2.0, help="last time (units of 1/kappa2)")
    p.add_argument("--n-times", type=int, default=21, help="number of time points")
    p = sub.add_parser("validate", help="run a validation suite and print a JSON report")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--out", help="also write the report here")
    return parser


def config_from_args(args):
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    pert = dict(data.get("perturbation", {}))
    if isinstance(data.get("perturbation"), str):
        pert = {"kind": data["perturbation"]}
    for key, flag in (("kind", args.kind), ("strength", args.strength), ("m", args.m), ("n", args.n)):
        if flag is not None:
            pert[key] = flag
    if pert:
        data["perturbation"] = pert
    if args.alpha2 is not None:
        data["alpha2_grid"] = list(args.alpha2)
    if args.method is not None:
        data["methods"] = list(args.method)
    if args.dim is not None:
        data["dim_override"] = args.dim
    if args.out is not None:
        data["output_path"] = args.out
    if args.format is not None:
        data["format"] = args.format
    if getattr(args, "t_max", None) is not None and "t_grid" not in data:
        if args.t_max <= 0 or args.n_times < 2:
            raise ConfigError("need --t-max > 0 and --n-times >= 2")
        data["t_grid"] = list(np.linspace(0.0, args.t_max, args.n_times))
    data.setdefault("perturbation", {"kind": "none"} if args.command == "leakage" else None)
    if data["perturbation"] is None:
        raise ConfigError("no perturbation given (use --config or --kind)")
    return RunConfig.from_dict(data)


def _emit_error(code, exc, context):
    payload = {"code": code, "message": str(exc), "context": context}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None):
    warnings.simplefilter("ignore", category=RuntimeWarning)
    context = {"argv": list(sys.argv[1:] if argv is None else argv)}
    try:
        args = build_parser().parse_args(argv)
        context["command"] = args.command
        if args.command == "validate":
            report = run_validate(args.suite)
            text = report_json(report)
            print(text)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            return 0 if report["passed"] else 1
        config = config_from_args(args)
        context["config"] = config.to_dict()
        if args.command == "rate":
            row = run_rate(config)
            write_rows([row], config.output_path, config.format)
        elif args.command == "sweep":
            run_sweep(config)
        else:
            run_leakage(config)
        return 0
    except CatBitflipError as exc:
        context["error"] = type(exc).__name__
        return _emit_error(exc.exit_code, exc, context)
    except Exception as exc:  # anything else is a bug
        context["error"] = type(exc).__name__
        return _emit_error(4, exc, context)


if __name__ == "__main__":
    sys.exit(main())
