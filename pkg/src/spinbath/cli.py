"""Command-line front end.

Subcommands: simulate, predict, compare, oracle-check, spectrum. Every
run is described by a JSON config document, CLI flags, or both; flags
override file values (a model given by flags replaces the file's model
section wholesale). Exit codes: 0 success, 1 assertion or tension
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .errors import ConfigError, SpinBathError
from .harness import (
    OutputFormat,
    build_model,
    decomposition_to_csv,
    parse_config,
    resolve_grid,
    run_compare,
    run_oracle_check,
    run_predict,
    run_simulate,
    _atomic_write_text,
    _fmt,
)
from .spectrum import spectral_decomposition


def _load_json_file(path: str, what: str) -> Any:
    try:
        with open(path, "r") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ConfigError(what, f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(what, f"invalid JSON in {path}: {exc}") from None


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="FILE", help="JSON config document")
    sub.add_argument("--model-file", metavar="FILE", help="inline model JSON file")
    sub.add_argument("--n", type=int, help="number of bath spins (random model)")
    sub.add_argument("--seed", type=int, help="random model seed")
    sub.add_argument(
        "--g-max", type=float, default=None,
        help="uniform coupling upper bound, couplings in (0, g_max] (default 1.0)",
    )
    sub.add_argument(
        "--equal-coupling", type=float, metavar="G", default=None,
        help="give every spin the same coupling G instead of random couplings",
    )
    sub.add_argument(
        "--phases", choices=["zero", "uniform"], default=None,
        help="bath amplitude phases (default zero)",
    )


def _add_grid_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--t-start", type=float, default=None)
    sub.add_argument("--t-end", type=float, default=None)
    sub.add_argument("--steps", type=int, default=None)


def _add_output_flags(sub: argparse.ArgumentParser, formats: list[str]) -> None:
    sub.add_argument("--output", metavar="FILE", help="write results to this path")
    sub.add_argument(
        "--format", choices=formats, default=None,
        help=f"output format (default {formats[0]})",
    )


def _add_verdict_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n-min", type=int, default=None, help="minimum line count gate")
    sub.add_argument("--cv-max", type=float, default=None, help="gap spread gate")
    sub.add_argument("--ks-max", type=float, default=None, help="uniformity gate")
    sub.add_argument("--eps-global", type=float, default=None, help="max weight gate")
    sub.add_argument("--eps-group", type=float, default=None, help="per-group deviation gate")
    sub.add_argument("--g-groups", type=int, default=None, help="partition group count")
    sub.add_argument("--q-max", type=int, default=None, help="rationalization denominator cap")
    sub.add_argument("--rel-tolerance", type=float, default=None)
    sub.add_argument("--omega-tolerance", type=float, default=None, help="line merge radius / max|g|")
    sub.add_argument("--enumeration-cap", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbath",
        description=(
            "Spin-bath dephasing: simulate the closed-form evolution, or "
            "predict decoherence analytically from the exact frequency "
            "spectrum, and compare the two."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="sample r(t) and |r(t)|^2 on a grid")
    _add_model_flags(simulate)
    _add_grid_flags(simulate)
    _add_output_flags(simulate, ["csv", "json"])

    predict = sub.add_parser("predict", help="analytical decoherence verdict")
    _add_model_flags(predict)
    _add_verdict_flags(predict)
    _add_output_flags(predict, ["json"])

    compare = sub.add_parser("compare", help="run both pipelines and reconcile")
    _add_model_flags(compare)
    _add_grid_flags(compare)
    _add_verdict_flags(compare)
    _add_output_flags(compare, ["json"])

    oracle = sub.add_parser(
        "oracle-check", help="closed form vs state-vector oracle on random cases"
    )
    oracle.add_argument("--n-max", type=int, default=10, help="largest bath size")
    oracle.add_argument("--cases", type=int, default=100)
    oracle.add_argument("--seed", type=int, default=1)

    spectrum = sub.add_parser("spectrum", help="dump the exact frequency spectrum")
    _add_model_flags(spectrum)
    spectrum.add_argument(
        "--omega-tolerance", type=float, default=0.0, help="line merge radius / max|g|"
    )
    spectrum.add_argument("--enumeration-cap", type=int, default=None)
    spectrum.add_argument("--output", metavar="FILE", help="write CSV to this path")
    return parser


def _model_dict_from_flags(args: argparse.Namespace) -> dict[str, Any] | None:
    """Translate model flags into a config model section, or None."""
    if args.model_file is not None:
        for flag, name in ((args.n, "--n"), (args.seed, "--seed"),
                           (args.g_max, "--g-max"),
                           (args.equal_coupling, "--equal-coupling")):
            if flag is not None:
                raise ConfigError("model", f"--model-file conflicts with {name}")
        return {"inline": _load_json_file(args.model_file, "model")}
    random_flags = (args.n, args.seed, args.g_max, args.equal_coupling, args.phases)
    if all(v is None for v in random_flags):
        return None
    if args.n is None or args.seed is None:
        raise ConfigError("model", "a random model needs both --n and --seed")
    if args.equal_coupling is not None and args.g_max is not None:
        raise ConfigError("model", "--equal-coupling conflicts with --g-max")
    section: dict[str, Any] = {"n": args.n, "seed": args.seed}
    if args.equal_coupling is not None:
        section["coupling"] = {"law": "equal", "g": args.equal_coupling}
    elif args.g_max is not None:
        section["coupling"] = {"law": "uniform_positive", "g_max": args.g_max}
    if args.phases is not None:
        section["phases"] = args.phases
    return {"random": section}


def _assemble(args: argparse.Namespace, default_format: str) -> dict[str, Any]:
    """Merge the config file (if any) with flag overrides into one dict."""
    data: dict[str, Any] = {}
    if args.config is not None:
        loaded = _load_json_file(args.config, "config")
        if not isinstance(loaded, dict):
            raise ConfigError("config", "expected a JSON object")
        data = loaded

    model = _model_dict_from_flags(args)
    if model is not None:
        data["model"] = model

    if hasattr(args, "t_start"):
        grid = dict(data.get("grid", {}))
        for key, value in (("t_start", args.t_start), ("t_end", args.t_end),
                           ("steps", args.steps)):
            if value is not None:
                grid[key] = value
        if grid:
            data["grid"] = grid

    if hasattr(args, "n_min"):
        verdict = dict(data.get("verdict", {}))
        for key in ("n_min", "cv_max", "ks_max", "eps_global", "eps_group",
                    "g_groups", "q_max", "rel_tolerance", "omega_tolerance",
                    "enumeration_cap"):
            value = getattr(args, key)
            if value is not None:
                verdict[key] = value
        if verdict:
            data["verdict"] = verdict

    if getattr(args, "output", None) is not None:
        fmt = getattr(args, "format", None) or data.get("output", {}).get("format")
        data["output"] = {"path": args.output, "format": fmt or default_format}
    elif getattr(args, "format", None) is not None and "output" in data:
        data["output"] = {**data["output"], "format": args.format}
    return data


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = parse_config(_assemble(args, "csv"))
    series = run_simulate(config)
    t0, t1 = float(series.times[0]), float(series.times[-1])
    print(f"simulated {len(series)} points on [{_fmt(t0)}, {_fmt(t1)}]")
    if config.output is not None:
        print(f"wrote {config.output.path}")
    else:
        final = float(abs(series.r_values[-1]) ** 2)
        print(f"final |r|^2 = {_fmt(final)}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    config = parse_config(_assemble(args, "json"))
    report = run_predict(config)
    print(
        f"verdict: {report.verdict.value} "
        f"(n_points={report.n_points}, quasi_continuous={report.quasi_continuous}, "
        f"in_l1={report.in_l1})"
    )
    if config.output is not None:
        print(f"wrote {config.output.path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = parse_config(_assemble(args, "json"))
    result = run_compare(config)
    status = "consistent" if result.agreement.consistent else "tension"
    print(
        f"verdict: {result.prediction.verdict.value}; "
        f"late-time avg |r|^2 = {_fmt(result.decay_stats.time_avg_r_sq_last_half)}; "
        f"agreement: {status}"
    )
    if result.agreement.description:
        print(result.agreement.description)
    if config.output is not None:
        print(f"wrote {config.output.path}")
    return 0 if result.agreement.consistent else 1


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    summary = run_oracle_check(args.n_max, args.cases, args.seed)
    print(
        f"oracle check: {summary.cases} cases, "
        f"max |closed - brute| = {summary.max_abs_error:.3e} "
        f"(tolerance {summary.tolerance:.0e})"
    )
    if summary.passed:
        return 0
    first = summary.failures[0]
    print(
        f"FAILED case {first.case_index}: n={first.n}, "
        f"model_seed={first.model_seed}, t={_fmt(first.t)}, "
        f"error={first.error:.3e}",
        file=sys.stderr,
    )
    print("model for replay:", file=sys.stderr)
    print(json.dumps(first.model), file=sys.stderr)
    return 1


def _cmd_spectrum(args: argparse.Namespace) -> int:
    data = _assemble(args, "csv")
    data.pop("output", None)
    config = parse_config(data)
    model = build_model(config.model_source)
    kwargs = {}
    if args.enumeration_cap is not None:
        kwargs["max_spins"] = args.enumeration_cap
    dec = spectral_decomposition(model, args.omega_tolerance, **kwargs)
    print(
        f"{dec.n_lines} lines over [{_fmt(dec.lines[0].omega)}, "
        f"{_fmt(dec.lines[-1].omega)}]"
    )
    if args.output is not None:
        _atomic_write_text(args.output, decomposition_to_csv(dec))
        print(f"wrote {args.output}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "predict": _cmd_predict,
    "compare": _cmd_compare,
    "oracle-check": _cmd_oracle_check,
    "spectrum": _cmd_spectrum,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpinBathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
