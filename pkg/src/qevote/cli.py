"""Command-line front end: run elections, attacks, experiments, and bound checks.

Every subcommand reads a strict JSON config (schema_version 1, unknown
keys rejected), writes its artifacts plus a manifest with content
hashes into --out, and keeps all payloads free of timestamps so reruns
are byte-identical.  Exit codes: 0 success, 1 failed run or failed
bound, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any

from . import __version__
from .analysis import run_bound_suite
from .errors import ConfigError, ParameterError
from .harness import (
    ExperimentConfig,
    HonestStrategy,
    estimate_advantage,
    run_integrity_experiment,
    run_privacy_experiment,
    run_verifiability_experiment,
)
from .registry import build_strategy, get_binding, list_protocols, list_strategies

SCHEMA_VERSION = 1

_RUNNERS = {
    "qint": run_integrity_experiment,
    "qver": run_verifiability_experiment,
    "qpriv": run_privacy_experiment,
}

# the protocols ship no verification predicates; qver runs bind one by name
_VERIFIERS = {"accept-any": lambda x, session, cfg: True}


# ---- config plumbing -------------------------------------------------------


def _load_config(path: Path | None, required: set[str], optional: set[str]) -> dict:
    if path is None:
        raise ConfigError("this subcommand needs --config <path>")
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"config {path} needs \"schema_version\": {SCHEMA_VERSION}, "
            f"got {cfg.get('schema_version')!r}"
        )
    keys = set(cfg)
    missing = sorted(required - keys)
    if missing:
        raise ConfigError(f"config {path} is missing required keys: {', '.join(missing)}")
    unknown = sorted(keys - required - optional - {"schema_version"})
    if unknown:
        raise ConfigError(f"config {path} has unknown keys: {', '.join(unknown)}")
    return cfg


def _experiment_config(data: dict) -> ExperimentConfig:
    params = data.get("protocol_params", {})
    if not isinstance(params, dict):
        raise ConfigError("protocol_params must be a JSON object")
    perm = data.get("vote_permutation")
    if perm is not None and perm != "flip":
        raise ConfigError('JSON configs support only the "flip" vote permutation')
    return ExperimentConfig(
        protocol=data["protocol"],
        n_voters=data["n_voters"],
        corruption_budget=data.get("corruption_budget", 0.0),
        security_param=data.get("security_param", 1),
        votes=data.get("votes"),
        casting_order=data.get("casting_order"),
        vote_permutation=perm,
        protocol_params=dict(params),
    )


def _resolve(flag, key: str, data: dict, default):
    """Flag beats config beats default."""
    if flag is not None:
        return flag
    return data.get(key, default)


# ---- artifact plumbing -----------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv_value(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _write_trials_csv(path: Path, rep) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial_index", "seed", "outcome", "auxiliary"])
        for i, outcome in enumerate(rep.outcomes):
            detail = rep.details[i] if rep.details else {}
            aux = ";".join(f"{k}={_csv_value(v)}" for k, v in sorted(detail.items()))
            writer.writerow([i, rep.trial_seed(i), outcome, aux])


def _write_manifest(
    out_dir: Path, subcommand: str, args, artifacts: list[Path], effective: dict
) -> Path:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config_path": str(args.config) if args.config else None,
        "config_sha256": _sha256(Path(args.config)) if args.config else None,
        "out_dir": str(out_dir),
        "effective": effective,
        "artifacts": [
            {"path": p.name, "sha256": _sha256(p)} for p in sorted(artifacts)
        ],
        "created_unix": time.time(),  # the only timestamp; payloads carry none
    }
    path = out_dir / "manifest.json"
    _write_json(path, manifest)
    return path


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---- experiment running ----------------------------------------------------


def _run_named_experiment(kind: str, data: dict, strategy, seed: int, trials: int, threads: int):
    if kind not in _RUNNERS:
        raise ConfigError(f"experiment must be one of {sorted(_RUNNERS)}, got {kind!r}")
    cfg = _experiment_config(data)
    binding = get_binding(cfg.protocol)
    kwargs: dict[str, Any] = {"trials": trials, "seed": seed, "threads": threads}
    if kind == "qver":
        name = data.get("verifier")
        if name is None:
            raise ConfigError(
                f"qver needs a verifier; known verifiers: {', '.join(sorted(_VERIFIERS))}"
            )
        if name not in _VERIFIERS:
            raise ConfigError(f"unknown verifier {name!r}; known: {', '.join(sorted(_VERIFIERS))}")
        kwargs["verifier"] = _VERIFIERS[name]
    return _RUNNERS[kind](cfg, binding, strategy, **kwargs)


def _summary_block(kind: str, rep) -> dict:
    block = rep.to_dict()
    if kind == "qpriv" and rep.scored:
        est = estimate_advantage(rep)
        block["advantage"] = {
            "rate": est.rate,
            "low": est.low,
            "high": est.high,
            "advantage": est.advantage,
        }
    return block


def _parse_sweep(sweep: Any) -> tuple[str, list]:
    if not isinstance(sweep, dict):
        raise ConfigError("sweep must be a JSON object with target and values")
    unknown = sorted(set(sweep) - {"target", "values"})
    if unknown:
        raise ConfigError(f"sweep has unknown keys: {', '.join(unknown)}")
    target = sweep.get("target")
    values = sweep.get("values")
    if not isinstance(target, str):
        raise ConfigError("sweep.target must be a string")
    ok = target == "trials" or (
        target.count(".") == 1
        and target.split(".")[0] in ("protocol_params", "strategy_params")
        and target.split(".")[1]
    )
    if not ok:
        raise ConfigError(
            "sweep.target must be 'trials', 'protocol_params.<name>', or 'strategy_params.<name>'"
        )
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a non-empty list")
    return target, values


def _apply_sweep_value(data: dict, strategy_params: dict, trials: int, target: str, value):
    data = dict(data)
    strategy_params = dict(strategy_params)
    if target == "trials":
        if not isinstance(value, int) or value < 1:
            raise ConfigError(f"swept trial count must be a positive integer, got {value!r}")
        trials = value
    else:
        family, key = target.split(".")
        if family == "protocol_params":
            data["protocol_params"] = {**data.get("protocol_params", {}), key: value}
        else:
            strategy_params[key] = value
    return data, strategy_params, trials


_ATTACK_REQUIRED = {"protocol", "strategy", "n_voters", "votes"}
_ATTACK_OPTIONAL = {
    "experiment",
    "verifier",
    "strategy_params",
    "corruption_budget",
    "security_param",
    "protocol_params",
    "casting_order",
    "vote_permutation",
    "seed",
    "trials",
    "threads",
}


def _rate_text(rep) -> str:
    if rep.scored == 0:
        return "win_rate n/a (every trial excluded)"
    lo, hi = rep.wilson()
    return f"win_rate {rep.win_rate():.4f} (wilson95 {lo:.4f}..{hi:.4f})"


def _run_and_report(args, subcommand: str, data: dict, sweep) -> int:
    kind = data.get("experiment", "qint")
    strategy_params = data.get("strategy_params", {})
    if not isinstance(strategy_params, dict):
        raise ConfigError("strategy_params must be a JSON object")
    seed = _resolve(args.seed, "seed", data, 0)
    trials = _resolve(args.trials, "trials", data, 1 if subcommand == "run-attack" else 200)
    threads = _resolve(args.threads, "threads", data, 1)
    if trials < 1:
        raise ConfigError("trials must be >= 1")

    out = _out_dir(args)
    artifacts: list[Path] = []
    payload: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "experiment-report",
        "subcommand": subcommand,
        "experiment": kind,
        "protocol": data["protocol"],
        "strategy": data["strategy"],
        "strategy_params": strategy_params,
        "seed": seed,
        "sweep": None,
        "summary": None,
        "series": None,
    }

    if sweep is None:
        strategy = build_strategy(data["strategy"], data["protocol"], strategy_params)
        rep = _run_named_experiment(kind, data, strategy, seed, trials, threads)
        payload["experiment_config"] = asdict(_experiment_config(data))
        payload["summary"] = _summary_block(kind, rep)
        trials_csv = out / "trials.csv"
        _write_trials_csv(trials_csv, rep)
        artifacts.append(trials_csv)
        print(f"{kind} {data['protocol']} vs {data['strategy']}: "
              f"{rep.wins}/{rep.scored} wins, {rep.excluded} excluded, {_rate_text(rep)}")
    else:
        target, values = sweep
        payload["sweep"] = {"target": target, "values": values}
        payload["experiment_config"] = asdict(_experiment_config(data))
        series = []
        for i, value in enumerate(values):
            vdata, vparams, vtrials = _apply_sweep_value(
                data, strategy_params, trials, target, value
            )
            strategy = build_strategy(vdata["strategy"], vdata["protocol"], vparams)
            rep = _run_named_experiment(kind, vdata, strategy, seed, vtrials, threads)
            trials_csv = out / f"trials_{i:03d}.csv"
            _write_trials_csv(trials_csv, rep)
            artifacts.append(trials_csv)
            series.append(
                {"value": value, "trials_csv": trials_csv.name, "summary": _summary_block(kind, rep)}
            )
            print(f"{target}={value}: {rep.wins}/{rep.scored} wins, "
                  f"{rep.excluded} excluded, {_rate_text(rep)}")
        payload["series"] = series
        artifacts.extend(_write_series(out, payload))

    report = out / "report.json"
    _write_json(report, payload)
    artifacts.append(report)
    manifest = _write_manifest(
        out,
        subcommand,
        args,
        artifacts,
        {"seed": seed, "trials": trials, "threads": threads},
    )
    print(f"wrote {report} and {manifest}")
    return 0


_SERIES_COLUMNS = [
    "value",
    "trials",
    "wins",
    "losses",
    "excluded",
    "win_rate",
    "wilson_low",
    "wilson_high",
]


def _series_rows(payload: dict) -> list[list]:
    entries = payload["series"] or [{"value": None, "summary": payload["summary"]}]
    rows = []
    for entry in entries:
        s = entry["summary"]
        lo, hi = s["wilson_95"]
        rows.append(
            [
                "" if entry["value"] is None else entry["value"],
                s["trials"],
                s["wins"],
                s["losses"],
                s["excluded"],
                "" if s["win_rate"] is None else s["win_rate"],
                "" if lo is None else lo,
                "" if hi is None else hi,
            ]
        )
    return rows


def _write_series(out: Path, payload: dict) -> list[Path]:
    series_csv = out / "series.csv"
    with open(series_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SERIES_COLUMNS)
        writer.writerows(_series_rows(payload))
    written = [series_csv]
    if payload.get("sweep"):
        target = payload["sweep"]["target"]
        plot = {
            "kind": "plot-spec",
            "title": f"{payload['experiment']} {payload['protocol']} "
            f"vs {payload['strategy']}: win rate over {target}",
            "series_csv": series_csv.name,
            "x": {"column": "value", "label": target},
            "y": {"column": "win_rate", "label": "win rate"},
            "band": {"low": "wilson_low", "high": "wilson_high", "label": "wilson 95%"},
        }
        plot_json = out / "plot.json"
        _write_json(plot_json, plot)
        written.append(plot_json)
    return written


# ---- subcommands -----------------------------------------------------------


def cmd_run_protocol(args) -> int:
    data = _load_config(
        args.config,
        required={"protocol", "n_voters", "votes"},
        optional={"security_param", "protocol_params", "casting_order", "seed"},
    )
    seed = _resolve(args.seed, "seed", data, 0)
    cfg = _experiment_config(data)
    binding = get_binding(cfg.protocol)
    rep = run_integrity_experiment(cfg, binding, HonestStrategy(), trials=1, seed=seed)
    tally = rep.details[0].get("tally")

    out = _out_dir(args)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "protocol-report",
        "protocol": cfg.protocol,
        "seed": seed,
        "votes": data["votes"],
        "tally": tally,
        "aborted": tally is None,
        "correct": tally is not None and rep.outcomes[0] == 0,
    }
    report = out / "report.json"
    _write_json(report, payload)
    _write_manifest(out, "run-protocol", args, [report], {"seed": seed, "trials": 1, "threads": 1})

    if tally is None:
        print(f"{cfg.protocol}: aborted", file=sys.stderr)
        return 1
    print(f"{cfg.protocol}: tally {tally}")
    if rep.outcomes[0] != 0:
        print("tally does not cover the declared votes", file=sys.stderr)
        return 1
    return 0


def cmd_run_attack(args) -> int:
    data = _load_config(args.config, required=_ATTACK_REQUIRED, optional=_ATTACK_OPTIONAL)
    return _run_and_report(args, "run-attack", data, sweep=None)


def cmd_run_experiment(args) -> int:
    data = _load_config(
        args.config,
        required=_ATTACK_REQUIRED | {"experiment"},
        optional=(_ATTACK_OPTIONAL - {"experiment"}) | {"sweep"},
    )
    sweep = _parse_sweep(data["sweep"]) if "sweep" in data else None
    return _run_and_report(args, "run-experiment", data, sweep)


def cmd_verify_bounds(args) -> int:
    filters = list(args.only or [])
    sabotage = bool(args.sabotage)
    if args.config is not None:
        data = _load_config(args.config, required=set(), optional={"filter", "sabotage"})
        raw = data.get("filter", [])
        extra = [raw] if isinstance(raw, str) else list(raw)
        filters.extend(extra)
        sabotage = sabotage or bool(data.get("sabotage", False))

    checks = run_bound_suite(_sabotage=sabotage)
    if filters:
        checks = [c for c in checks if any(c.name.startswith(f) for f in filters)]
        if not checks:
            raise ConfigError(f"no bound matches filters: {', '.join(filters)}")

    for c in checks:
        mark = "pass" if c.passed else "FAIL"
        print(f"[{mark}] {c.name} value={c.value:.6g} ({c.requirement})")

    out = _out_dir(args)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "bounds-report",
        "sabotage": sabotage,
        "filters": sorted(filters),
        "bounds": [
            {"name": c.name, "passed": c.passed, "value": c.value, "requirement": c.requirement}
            for c in checks
        ],
    }
    report = out / "bounds.json"
    _write_json(report, payload)
    _write_manifest(out, "verify-bounds", args, [report], {"sabotage": sabotage})

    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"failed bounds: {', '.join(failed)}", file=sys.stderr)
        return 1
    print(f"all {len(checks)} bounds hold")
    return 0


def cmd_export(args) -> int:
    data = _load_config(args.config, required={"source"}, optional=set())
    source = Path(data["source"])
    try:
        payload = json.loads(source.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read source report {source}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"source {source} is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or payload.get("kind") != "experiment-report":
        raise ConfigError(f"source {source} is not an experiment report")

    out = _out_dir(args)
    artifacts = _write_series(out, payload)
    _write_manifest(out, "export", args, artifacts, {"source": str(source)})
    print(f"exported {', '.join(p.name for p in artifacts)} to {out}")
    return 0


def cmd_list(args) -> int:
    for protocol in list_protocols():
        print(f"{protocol}: {', '.join(list_strategies(protocol))}")
    return 0


# ---- entry point -----------------------------------------------------------


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--seed", type=_u64, help="master seed (overrides the config)")
    common.add_argument("--trials", type=_positive, help="trial count (overrides the config)")
    common.add_argument("--out", type=Path, default=Path("qevote-out"),
                        help="artifact directory (default: qevote-out)")
    common.add_argument("--threads", type=_positive, help="worker threads for trials")

    parser = argparse.ArgumentParser(
        prog="qevote",
        description="Simulate quantum e-voting protocols, attacks, and security bounds.",
    )
    parser.add_argument("--version", action="version", version=f"qevote {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("run-protocol", parents=[common],
                       help="one honest election; prints the tally")
    p.set_defaults(handler=cmd_run_protocol)

    p = sub.add_parser("run-attack", parents=[common],
                       help="a named adversary strategy, single run by default")
    p.set_defaults(handler=cmd_run_attack)

    p = sub.add_parser("run-experiment", parents=[common],
                       help="a security experiment batch, optionally swept")
    p.set_defaults(handler=cmd_run_experiment)

    p = sub.add_parser("verify-bounds", parents=[common],
                       help="evaluate every closed-form security bound")
    p.add_argument("--only", action="append", metavar="PREFIX",
                   help="restrict to bounds whose name starts with PREFIX (repeatable)")
    p.add_argument("--sabotage", action="store_true",
                   help="negative control: corrupt one comparison to prove failures surface")
    p.set_defaults(handler=cmd_verify_bounds)

    p = sub.add_parser("export", parents=[common],
                       help="rebuild CSV series and plot spec from a stored report")
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("list", parents=[common],
                       help="show known protocols and their strategies")
    p.set_defaults(handler=cmd_list)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
