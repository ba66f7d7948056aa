"""Command-line front end.

Four subcommands map onto the library: ``classify`` (closed-form verdicts
at one point), ``oracle`` (brute-force weak-PBE enumeration on a signal
grid), ``sweep`` (region tables over a parameter grid), and ``simulate``
(type-drift Monte Carlo). Runs can be described by a JSON config file, by
flags, or both, with flags winning; ``--dump-config`` writes the resolved
run back out as JSON that reproduces it exactly.

Exit codes: 0 success, 1 validation error, 2 oracle discrepancy, 3 size
guard. Every failure prints one machine-parsable line to stderr
(``error: <category>: <reason>``); result data goes only to the output
target (stdout by default), logs to stderr. Set
``RESTRAINT_GAMES_LOG=error|info|debug`` to control logging.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from typing import Optional

from .conditions import classify as classify_point
from .game import Mechanism, MechanismSpec, ModelParams, ParameterError, Variant
from .montecarlo import DriftMode, SimConfig, pooling_profile, simulate
from .oracle import (
    BudgetExceededError,
    DiscreteGame,
    DiscrepancyError,
    StrategyProfile,
    find_all_pbe,
)
from .sweep import (
    GridSpec,
    region_row_for_point,
    run_sweep,
    write_rows_csv,
    write_rows_json,
)

log = logging.getLogger("restraint_games")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DISCREPANCY = 2
EXIT_SIZE_GUARD = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; 2 is reserved for oracle
    # discrepancies, so usage problems are validation errors here
    def error(self, message):
        raise ParameterError("usage", message)


def _add_param_flags(parser: argparse.ArgumentParser, with_m: bool = True) -> None:
    parser.add_argument("--mechanism", choices=[m.value for m in Mechanism])
    parser.add_argument("--variant", choices=[v.value for v in Variant])
    parser.add_argument("--c", type=float)
    parser.add_argument("--vd", type=float, help="aggressive type's gain V_D")
    parser.add_argument("--vb", type=float, help="State B's exploitation loss V_B")
    parser.add_argument("--r", type=float)
    parser.add_argument("--p", type=float, help="type-drift probability")
    parser.add_argument("--prior", type=float)
    if with_m:
        parser.add_argument("--m", type=float, help="signal level")


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON run config")
    parser.add_argument("-o", "--output", metavar="PATH", default="-")
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument(
        "--dump-config",
        metavar="PATH",
        help="write the resolved run config as JSON and exit without running",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="restraint-games", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="closed-form verdicts at one point")
    _add_param_flags(p_classify)
    _add_io_flags(p_classify)

    p_oracle = sub.add_parser("oracle", help="brute-force weak-PBE enumeration")
    _add_param_flags(p_oracle, with_m=False)
    p_oracle.add_argument("--messages", help="comma-separated signal grid, e.g. 0,2")
    _add_io_flags(p_oracle)

    p_sweep = sub.add_parser("sweep", help="classify a parameter grid")
    p_sweep.add_argument("--oracle-fraction", type=float)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--jobs", type=int, help="worker cap for row evaluation")
    _add_io_flags(p_sweep)

    p_sim = sub.add_parser("simulate", help="type-drift Monte Carlo")
    _add_param_flags(p_sim)
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--drift-mode", choices=[d.value for d in DriftMode])
    p_sim.add_argument(
        "--allow-degenerate-prior",
        action="store_true",
        default=None,
        help="permit prior 0 or 1 (testing aid)",
    )
    p_sim.add_argument(
        "--dump-trials", metavar="PATH", help="write one CSV row per trial"
    )
    _add_io_flags(p_sim)

    return parser


def _load_config(path: Optional[str], command: str) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError("config is a JSON object", f"got {type(data).__name__}")
    if "command" in data:
        if data["command"] != command:
            raise ParameterError(
                "config command matches subcommand",
                f"config says {data['command']!r}, invoked {command!r}",
            )
        data = {k: v for k, v in data.items() if k != "command"}
    elif command == "sweep" and "axes" in data:
        # bare GridSpec config
        data = {"grid": data}
    return data


def _merge_mechanism(cfg: dict, args) -> dict:
    mech = dict(cfg.get("mechanism", {}))
    if getattr(args, "mechanism", None) is not None:
        mech["mechanism"] = args.mechanism
    if getattr(args, "variant", None) is not None:
        mech["variant"] = args.variant
    if "mechanism" not in mech:
        raise ParameterError("--mechanism required")
    mech.setdefault("variant", "base")
    return mech


def _merge_params(cfg: dict, args) -> dict:
    params = dict(cfg.get("params", {}))
    for flag, key in (("c", "c"), ("vd", "V_D"), ("vb", "V_B"), ("r", "r"), ("p", "p"), ("prior", "prior")):
        value = getattr(args, flag, None)
        if value is not None:
            params[key] = value
    for key in ("c", "V_D", "V_B"):
        if key not in params:
            raise ParameterError(f"--{key.lower().replace('_', '')} required")
    params.setdefault("r", 0.0)
    params.setdefault("p", 0.0)
    params.setdefault("prior", 0.5)
    return params


def _require_m(cfg: dict, args) -> float:
    m = getattr(args, "m", None)
    if m is None:
        m = cfg.get("m")
    if m is None:
        raise ParameterError("--m required")
    return float(m)


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(text_writer, path: str) -> None:
    out, close = _open_out(path)
    try:
        text_writer(out)
    finally:
        if close:
            out.close()


def _dump_config(resolved: dict, path: str) -> None:
    text = json.dumps(resolved, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _run_classify(args) -> int:
    cfg = _load_config(args.config, "classify")
    mech = _merge_mechanism(cfg, args)
    params_d = _merge_params(cfg, args)
    m = _require_m(cfg, args)
    fmt = args.format or cfg.get("format") or "json"
    resolved = {
        "command": "classify",
        "mechanism": mech,
        "params": params_d,
        "m": m,
        "output": args.output,
        "format": fmt,
    }
    if args.dump_config:
        _dump_config(resolved, args.dump_config)
        return EXIT_OK
    spec = MechanismSpec.from_dict(mech)
    params = ModelParams.from_dict(params_d)
    report = classify_point(spec, params, m)
    if fmt == "json":
        _emit(lambda out: out.write(json.dumps(report.to_dict(), indent=2) + "\n"), args.output)
    else:
        row = region_row_for_point(spec, params, m)
        _emit(lambda out: write_rows_csv([row], spec, out), args.output)
    log.info("classify: pooling=%s separating=%s", report.pooling_on_restraint.holds, report.separating.holds)
    return EXIT_OK


def _parse_messages(cfg: dict, args) -> tuple[float, ...]:
    raw = getattr(args, "messages", None)
    if raw is not None:
        try:
            return tuple(float(tok) for tok in raw.split(",") if tok.strip() != "")
        except ValueError as exc:
            raise ParameterError("messages are comma-separated decimals", str(exc)) from exc
    if "messages" in cfg:
        return tuple(float(v) for v in cfg["messages"])
    raise ParameterError("--messages required")


def _run_oracle(args) -> int:
    cfg = _load_config(args.config, "oracle")
    mech = _merge_mechanism(cfg, args)
    params_d = _merge_params(cfg, args)
    messages = _parse_messages(cfg, args)
    fmt = args.format or cfg.get("format") or "json"
    resolved = {
        "command": "oracle",
        "mechanism": mech,
        "params": params_d,
        "messages": list(messages),
        "output": args.output,
        "format": fmt,
    }
    if args.dump_config:
        _dump_config(resolved, args.dump_config)
        return EXIT_OK
    game = DiscreteGame(
        MechanismSpec.from_dict(mech), ModelParams.from_dict(params_d), messages
    )
    certs = find_all_pbe(game)
    counts: dict[str, int] = {}
    for cert in certs:
        counts[cert.pbe_class.value] = counts.get(cert.pbe_class.value, 0) + 1
    log.info("oracle: %d certificate(s) %s", len(certs), counts)
    if fmt == "json":
        payload = {
            "mechanism": mech,
            "params": params_d,
            "messages": list(messages),
            "counts": counts,
            "certificates": [c.to_dict() for c in certs],
        }
        _emit(lambda out: out.write(json.dumps(payload, indent=2) + "\n"), args.output)
    else:

        def write(out):
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(
                ["class", "signal_restrained", "signal_aggressive", "fight_after", "t2_actions", "posteriors"]
            )
            for cert in certs:
                d = cert.profile.to_dict()
                writer.writerow(
                    [
                        cert.pbe_class.value,
                        d["signal_of"]["restrained"],
                        d["signal_of"]["aggressive"],
                        ";".join(f"{m}:{'fight' if f else 'yield'}" for m, f in d["fight_after"]),
                        ";".join(f"{t}@{m}:{a}" for t, m, a in d["t2_action"]),
                        ";".join(f"{m}:{q}" for m, q in cert.beliefs.to_dict()["posterior"]),
                    ]
                )

        _emit(write, args.output)
    return EXIT_OK


def _run_sweep(args) -> int:
    cfg = _load_config(args.config, "sweep")
    if "grid" not in cfg:
        raise ParameterError("sweep needs a grid config (--config)")
    oracle_fraction = args.oracle_fraction
    if oracle_fraction is None:
        oracle_fraction = cfg.get("oracle_fraction", 0.05)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    jobs = args.jobs if args.jobs is not None else cfg.get("jobs", 1)
    fmt = args.format or cfg.get("format") or "csv"
    resolved = {
        "command": "sweep",
        "grid": cfg["grid"],
        "oracle_fraction": oracle_fraction,
        "seed": seed,
        "jobs": jobs,
        "output": args.output,
        "format": fmt,
    }
    if args.dump_config:
        _dump_config(resolved, args.dump_config)
        return EXIT_OK
    grid = GridSpec.from_dict(cfg["grid"])
    rows = run_sweep(grid, oracle_fraction=oracle_fraction, seed=seed, jobs=jobs)
    checked = sum(1 for row in rows if row.oracle_checked)
    log.info("sweep: %d row(s), %d oracle-checked", len(rows), checked)
    if fmt == "csv":
        _emit(lambda out: write_rows_csv(rows, grid.mechanism, out), args.output)
    else:
        _emit(lambda out: write_rows_json(rows, grid.mechanism, out), args.output)
    return EXIT_OK


def _run_simulate(args) -> int:
    cfg = _load_config(args.config, "simulate")
    mech = _merge_mechanism(cfg, args)
    params_d = _merge_params(cfg, args)
    m = _require_m(cfg, args)
    n_trials = args.trials if args.trials is not None else cfg.get("n_trials", 100_000)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    drift = args.drift_mode or cfg.get("drift_mode", DriftMode.LITERAL.value)
    allow_degenerate = (
        args.allow_degenerate_prior
        if args.allow_degenerate_prior is not None
        else bool(cfg.get("allow_degenerate_prior", False))
    )
    profile_d = cfg.get("profile")
    fmt = args.format or cfg.get("format") or "json"
    resolved = {
        "command": "simulate",
        "mechanism": mech,
        "params": params_d,
        "m": m,
        "profile": profile_d if profile_d is not None else pooling_profile(m).to_dict(),
        "drift_mode": drift,
        "n_trials": n_trials,
        "seed": seed,
        "allow_degenerate_prior": allow_degenerate,
        "output": args.output,
        "format": fmt,
    }
    if args.dump_config:
        _dump_config(resolved, args.dump_config)
        return EXIT_OK
    config = SimConfig(
        spec=MechanismSpec.from_dict(mech),
        params=ModelParams.from_dict(params_d),
        m=m,
        profile=StrategyProfile.from_dict(resolved["profile"]),
        n_trials=int(n_trials),
        seed=int(seed),
        drift_mode=DriftMode(drift),
        allow_degenerate_prior=allow_degenerate,
    )
    dump_trials = args.dump_trials or cfg.get("dump_trials")
    if dump_trials:
        with open(dump_trials, "w", encoding="utf-8", newline="") as fh:
            result = simulate(config, trial_log=fh)
    else:
        result = simulate(config)
    log.info(
        "simulate: %d trial(s), mean_u_B=%.6g (se %.3g)",
        config.n_trials,
        result.mean_u_B,
        result.standard_error_u_B,
    )
    if fmt == "json":
        _emit(lambda out: out.write(json.dumps(result.to_dict(), indent=2) + "\n"), args.output)
    else:

        def write(out):
            writer = csv.writer(out, lineterminator="\n")
            header = ["conflict", "exploit", "restraint", "mean_u_A", "mean_u_B", "standard_error_u_B"]
            d = result.to_dict()
            values = [
                d["outcome_counts"].get("conflict", 0),
                d["outcome_counts"].get("exploit", 0),
                d["outcome_counts"].get("restraint", 0),
                result.mean_u_A,
                result.mean_u_B,
                result.standard_error_u_B,
            ]
            by_type = d.get("mean_u_B_by_initial_type")
            if by_type is not None:
                header += ["mean_u_B_initial_restrained", "mean_u_B_initial_aggressive"]
                values += [
                    "" if by_type["restrained"] is None else by_type["restrained"],
                    "" if by_type["aggressive"] is None else by_type["aggressive"],
                ]
            writer.writerow(header)
            writer.writerow(values)

        _emit(write, args.output)
    return EXIT_OK


_RUNNERS = {
    "classify": _run_classify,
    "oracle": _run_oracle,
    "sweep": _run_sweep,
    "simulate": _run_simulate,
}


def _setup_logging() -> None:
    level_name = os.environ.get("RESTRAINT_GAMES_LOG", "error").lower()
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        level_name, logging.ERROR
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="%(name)s: %(message)s")


def main(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _RUNNERS[args.command](args)
    except ParameterError as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DiscrepancyError as exc:
        log.debug("discrepancy report: %s", json.dumps(exc.report.to_json_list()))
        print(f"error: discrepancy: {exc}", file=sys.stderr)
        return EXIT_DISCREPANCY
    except BudgetExceededError as exc:
        print(f"error: size-guard: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
