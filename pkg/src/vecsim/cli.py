"""Command-line frontend.

Subcommands: ``run`` (one simulation -> JSON report), ``compare`` (policy
cross product -> CSV/JSON tables), ``sweep`` (parameter sensitivity),
``oracle`` (exhaustive search on tiny instances), and ``gen`` (emit a
builtin workload file).  Configuration comes from an optional TOML file
with sections [platform], [workload], [run], [sim], [lsbts]; command-line
flags win over file values.  Exit codes: 0 success, 2 configuration
error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .infrastructure import PlatformConfig, build_platform
from .metrics import metrics_to_dict, summarize
from .oracle import brute_force_best
from .policy import PolicyKind
from .simengine import SimOptions, outcome_to_dict, run
from .workload import BUILTIN_WORKLOADS, GenParams, builtin_workload, load_workload, save_workload

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# Reference improvement targets for the builtin workloads, reported
# alongside measured values: (qos_gain_pct, cost_reduction_pct) of the
# table policy over each baseline, share-of-winner convention.
REFERENCE_GAINS = {
    ("healthcare", "random"): (55.0, 61.0),
    ("e-transport", "random"): (53.0, 60.0),
    ("e-business", "random"): (50.0, 63.0),
    ("healthcare", "lsbts"): (30.0, 56.0),
    ("e-transport", "lsbts"): (25.0, 49.0),
    ("e-business", "lsbts"): (24.0, 53.0),
}

_CSV_COLUMNS = (
    "workload", "policy", "seed", "qos", "qor", "cost", "nmd",
    "privacy_fraction", "privacy_percent", "ep_ul", "ep_rsu", "cp",
)
_MEAN_FIELDS = (
    "qos", "qor", "cost", "nmd", "privacy_fraction", "privacy_percent",
    "ep_ul", "ep_rsu", "cp",
)
_CONVENTIONS = {
    "qos_gain_pct": "(qos_pvec - qos_other) / qos_pvec * 100",
    "qos_ratio": "qos_pvec / qos_other",
    "cost_reduction_pct": "(cost_other - cost_pvec) / cost_other * 100",
}
SWEEP_PARAMS = ("k_cloud", "approx_fraction", "rsu_count", "latency_cloud", "srp")


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved configuration for one invocation."""

    platform: PlatformConfig
    workload_name: str | None
    workload_file: str | None
    policy: PolicyKind
    seed: int
    opts: SimOptions
    out: str | None
    fmt: str


# --- config file -------------------------------------------------------------

_SECTION_KEYS = {
    "platform": {f for f in PlatformConfig.__dataclass_fields__},
    "workload": {"name", "file"},
    "run": {"policy", "seed", "out", "format"},
    "sim": {"approx_fraction", "approx_accuracy", "privacy_weighting", "nmd_scope", "trace"},
    "lsbts": {"bc_overhead"},
}
_INT_KEYS = {"vehicles", "rsu_count", "rsu_cores", "cloud_cores", "seed"}
_BOOL_KEYS = {"elastic", "trace"}
_STR_KEYS = {"name", "file", "policy", "out", "format", "privacy_weighting", "nmd_scope"}


def _coerce(section: str, key: str, value):
    where = f"config [{section}] {key}"
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def load_config_file(path) -> dict:
    """Read the TOML config file, rejecting unknown sections and keys."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    sections = {}
    for section, body in raw.items():
        if section not in _SECTION_KEYS:
            raise ConfigError(
                f"{path}: unknown config section [{section}] "
                f"(valid: {', '.join(sorted(_SECTION_KEYS))})"
            )
        if not isinstance(body, dict):
            raise ConfigError(f"{path}: section [{section}] must be a table")
        known = _SECTION_KEYS[section]
        unknown = set(body) - known
        if unknown:
            raise ConfigError(f"{path}: unknown keys in [{section}]: {sorted(unknown)}")
        sections[section] = {k: _coerce(section, k, v) for k, v in body.items()}
    return sections


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) with flags; flags win."""
    sections = load_config_file(args.config) if getattr(args, "config", None) else {}
    platform = PlatformConfig(**sections.get("platform", {}))

    sim = dict(sections.get("sim", {}))
    lsbts = sections.get("lsbts", {})
    if "bc_overhead" in lsbts:
        sim["bc_overhead"] = lsbts["bc_overhead"]
    if getattr(args, "trace", None):
        sim["trace"] = True
    opts = SimOptions(**sim)

    wl = sections.get("workload", {})
    name = getattr(args, "workload", None) or wl.get("name")
    file = getattr(args, "workload_file", None) or wl.get("file")
    if getattr(args, "workload", None) and getattr(args, "workload_file", None):
        raise ConfigError("pass either --workload or --workload-file, not both")
    if name and file and not getattr(args, "workload", None) and not getattr(args, "workload_file", None):
        raise ConfigError("config [workload] must set either 'name' or 'file', not both")
    if getattr(args, "workload", None):
        file = None
    elif getattr(args, "workload_file", None):
        name = None

    run_section = sections.get("run", {})
    policy_name = getattr(args, "policy", None) or run_section.get("policy", "pvec")
    try:
        policy = PolicyKind(policy_name)
    except ValueError:
        raise ConfigError(
            f"unknown policy {policy_name!r} (valid: {', '.join(k.value for k in PolicyKind)})"
        ) from None
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = run_section.get("seed", 0)
    out = getattr(args, "out", None) or run_section.get("out")
    fmt = getattr(args, "fmt", None) or run_section.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r} (valid: csv, json)")
    return RunConfig(platform=platform, workload_name=name, workload_file=file,
                     policy=policy, seed=seed, opts=opts, out=out, fmt=fmt)


def _config_echo(cfg: RunConfig, policy: PolicyKind | None = None, seed: int | None = None) -> dict:
    workload = {"file": cfg.workload_file} if cfg.workload_file else {"name": cfg.workload_name}
    return {
        "platform": asdict(cfg.platform),
        "workload": workload,
        "policy": (policy or cfg.policy).value,
        "seed": cfg.seed if seed is None else seed,
        "sim": asdict(cfg.opts),
    }


def _workload_for(cfg: RunConfig, seed: int):
    if cfg.workload_file:
        return load_workload(cfg.workload_file)
    if not cfg.workload_name:
        raise ConfigError("no workload selected: pass --workload NAME or --workload-file PATH")
    params = GenParams(n_vehicles=cfg.platform.vehicles)
    return builtin_workload(cfg.workload_name, params, seed)


def _json_bytes(doc) -> bytes:
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def _write_out(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


# --- run ----------------------------------------------------------------------

def cmd_run(cfg: RunConfig) -> int:
    platform = build_platform(cfg.platform)
    workload = _workload_for(cfg, cfg.seed)
    trace = run(platform, workload, cfg.policy, cfg.seed, cfg.opts)
    report = summarize(trace, platform, cfg.opts)
    doc = {
        "config": _config_echo(cfg),
        "metrics": metrics_to_dict(report),
        "n_outcomes": len(trace.outcomes),
        "outcomes": [outcome_to_dict(o) for o in trace.outcomes],
    }
    if cfg.opts.trace:
        doc["events"] = [[t, label] for t, label in trace.events]
    data = _json_bytes(doc)
    if cfg.out:
        _write_out(cfg.out, data)
        print(f"wrote {cfg.out}")
    else:
        sys.stdout.write(data.decode())
    print(
        f"{workload.name} policy={cfg.policy.value} seed={cfg.seed}: "
        f"qos={report.qos:.6g} qor={report.qor:.6g} cost={report.cost:.6g} "
        f"nmd={report.nmd} privacy={report.privacy_percent:.4g}%",
        file=sys.stderr,
    )
    return EXIT_OK


# --- compare -------------------------------------------------------------------

def _mean(values):
    return sum(values) / len(values)


def compare_doc(cfg: RunConfig, policies, seeds) -> dict:
    """Run the policy x seed cross product and build the comparison document."""
    if not policies:
        raise ConfigError("compare requires at least one policy")
    if not seeds:
        raise ConfigError("compare requires at least one seed")
    platform = build_platform(cfg.platform)
    label = cfg.workload_file if cfg.workload_file else cfg.workload_name
    rows = []
    for policy in policies:
        for seed in seeds:
            workload = _workload_for(cfg, seed)
            trace = run(platform, workload, policy, seed, cfg.opts)
            rep = summarize(trace, platform, cfg.opts)
            rows.append({"workload": workload.name, "policy": policy.value, "seed": seed,
                         **metrics_to_dict(rep)})
    summary = []
    by_policy = {}
    for policy in policies:
        mine = [r for r in rows if r["policy"] == policy.value]
        entry = {"workload": mine[0]["workload"], "policy": policy.value,
                 **{f: _mean([r[f] for r in mine]) for f in _MEAN_FIELDS}}
        summary.append(entry)
        by_policy[policy.value] = entry

    improvements = []
    if "pvec" in by_policy:
        base = by_policy["pvec"]
        for policy in policies:
            other = by_policy[policy.value]
            if policy is PolicyKind.PVEC:
                continue
            entry = {
                "baseline": policy.value,
                "qos_gain_pct": (base["qos"] - other["qos"]) / base["qos"] * 100.0
                if base["qos"] > 0 else None,
                "qos_ratio": base["qos"] / other["qos"] if other["qos"] > 0 else None,
                "cost_reduction_pct": (other["cost"] - base["cost"]) / other["cost"] * 100.0
                if other["cost"] > 0 else None,
            }
            ref = REFERENCE_GAINS.get((cfg.workload_name, policy.value))
            if ref is not None:
                entry["reference_qos_gain_pct"] = ref[0]
                entry["reference_cost_reduction_pct"] = ref[1]
            improvements.append(entry)

    return {
        "workload": label,
        "policies": [p.value for p in policies],
        "seeds": list(seeds),
        "rows": rows,
        "summary": summary,
        "improvements": improvements,
        "conventions": dict(_CONVENTIONS),
        "config": _config_echo(cfg),
    }


def _csv_row(row: dict, extra: dict | None = None) -> list:
    merged = dict(row)
    if extra:
        merged = {**extra, **merged}
    return [merged.get(c, "") for c in (list(extra) if extra else []) + list(_CSV_COLUMNS)]


def compare_csv(doc: dict, prefix: dict | None = None) -> str:
    """Render a comparison document as CSV; summary rows use seed=mean."""
    buf = io.StringIO()
    buf.write("# vecsim comparison\n")
    buf.write(f"# workload={doc['workload']}\n")
    prefix_cols = list(prefix) if prefix else []
    buf.write(f"# columns: {','.join(prefix_cols + list(_CSV_COLUMNS))}\n")
    buf.write("# summary rows use seed=mean\n")
    for key, rule in doc["conventions"].items():
        buf.write(f"# {key} = {rule}\n")
    for imp in doc["improvements"]:
        parts = [f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}"
                 for k, v in imp.items() if k != "baseline" and v is not None]
        buf.write(f"# improvement pvec vs {imp['baseline']}: {' '.join(parts)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(prefix_cols + list(_CSV_COLUMNS))
    for row in doc["rows"]:
        writer.writerow(_csv_row(row, prefix))
    for row in doc["summary"]:
        writer.writerow(_csv_row({**row, "seed": "mean"}, prefix))
    return buf.getvalue()


def _emit_table(cfg: RunConfig, doc: dict, csv_text: str) -> None:
    if cfg.out:
        base = cfg.out
        for suffix in (".json", ".csv"):
            if base.endswith(suffix):
                base = base[: -len(suffix)]
        _write_out(base + ".json", _json_bytes(doc))
        with open(base + ".csv", "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"wrote {base}.json and {base}.csv")
    elif cfg.fmt == "json":
        sys.stdout.write(_json_bytes(doc).decode())
    else:
        sys.stdout.write(csv_text)


def cmd_compare(cfg: RunConfig, policies, seeds) -> int:
    doc = compare_doc(cfg, policies, seeds)
    _emit_table(cfg, doc, compare_csv(doc))
    return EXIT_OK


# --- sweep ---------------------------------------------------------------------

def _apply_sweep_param(cfg: RunConfig, param: str, value: float) -> RunConfig:
    if param == "rsu_count":
        if value != int(value):
            raise ConfigError(f"rsu_count sweep values must be integers, got {value}")
        return replace(cfg, platform=replace(cfg.platform, rsu_count=int(value)))
    if param == "approx_fraction":
        return replace(cfg, opts=replace(cfg.opts, approx_fraction=float(value)))
    if param in ("k_cloud", "latency_cloud", "srp"):
        return replace(cfg, platform=replace(cfg.platform, **{param: float(value)}))
    raise ConfigError(f"unknown sweep parameter {param!r}: valid names are {', '.join(SWEEP_PARAMS)}")


def sweep_doc(cfg: RunConfig, param: str, values, policies, seeds) -> dict:
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}: valid names are {', '.join(SWEEP_PARAMS)}")
    if not values:
        raise ConfigError("sweep requires at least one value")
    runs = []
    for value in values:
        sub = _apply_sweep_param(cfg, param, value)
        runs.append({"value": value, "compare": compare_doc(sub, policies, seeds)})
    return {"parameter": param, "values": list(values), "runs": runs}


def sweep_csv(doc: dict) -> str:
    parts = []
    for i, entry in enumerate(doc["runs"]):
        text = compare_csv(entry["compare"], prefix={"parameter": doc["parameter"],
                                                     "value": entry["value"]})
        if i > 0:
            # keep a single header: drop comment and header lines of later blocks
            text = "".join(
                line + "\n" for line in text.splitlines()
                if not line.startswith("#") and not line.startswith("parameter,")
            )
        parts.append(text)
    return "".join(parts)


def cmd_sweep(cfg: RunConfig, param: str, values, policies, seeds) -> int:
    doc = sweep_doc(cfg, param, values, policies, seeds)
    _emit_table(cfg, doc, sweep_csv(doc))
    return EXIT_OK


# --- oracle / gen ----------------------------------------------------------------

def cmd_oracle(cfg: RunConfig, honor_privacy: bool) -> int:
    platform = build_platform(cfg.platform)
    workload = _workload_for(cfg, cfg.seed)
    try:
        result = brute_force_best(platform, workload, honor_privacy, cfg.opts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    doc = {
        "workload": workload.name,
        "honor_privacy": honor_privacy,
        "best_qos": result.best_qos,
        "evaluated": result.evaluated,
        "assignments": [
            {"task_id": a.task_id, "layer": a.layer.value, "node_id": a.node_id,
             "mode": a.mode.value}
            for a in result.best_assignment
        ],
    }
    data = _json_bytes(doc)
    if cfg.out:
        _write_out(cfg.out, data)
        print(f"wrote {cfg.out}")
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


def cmd_gen(cfg: RunConfig) -> int:
    if not cfg.workload_name:
        raise ConfigError("gen emits builtin workloads: pass --workload NAME")
    if not cfg.out:
        raise ConfigError("gen requires --out PATH")
    workload = _workload_for(cfg, cfg.seed)
    save_workload(workload, cfg.out)
    print(f"wrote {cfg.out} ({len(workload.tasks)} tasks)")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--workload", help=f"builtin workload: {', '.join(sorted(BUILTIN_WORKLOADS))}")
    common.add_argument("--workload-file", help="workload JSON file")
    common.add_argument("--seed", type=int, help="run seed (default 0)")
    common.add_argument("--out", help="output path")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        help="stdout table format for compare/sweep")
    common.add_argument("--trace", action="store_true", default=None,
                        help="embed the event log in the report")

    parser = argparse.ArgumentParser(
        prog="vecsim",
        description="Deterministic task-placement simulator for a three-tier vehicular edge platform.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="execute one simulation and write a JSON report")
    p.add_argument("--policy", choices=[k.value for k in PolicyKind], help="allocation policy")

    p = sub.add_parser("compare", parents=[common], help="compare policies over seeds")
    p.add_argument("--policies", nargs="+", choices=[k.value for k in PolicyKind],
                   help="policies to compare (default: all)")
    p.add_argument("--seeds", nargs="+", type=int, help="seeds (default: the run seed)")

    p = sub.add_parser("sweep", parents=[common], help="sweep one parameter across values")
    p.add_argument("--param", required=True, help=f"parameter: {', '.join(SWEEP_PARAMS)}")
    p.add_argument("--values", nargs="+", type=float, required=True, help="values to sweep")
    p.add_argument("--policies", nargs="+", choices=[k.value for k in PolicyKind])
    p.add_argument("--seeds", nargs="+", type=int)

    p = sub.add_parser("oracle", parents=[common],
                       help="exhaustive best assignment for a tiny workload (<= 12 tasks)")
    p.add_argument("--honor-privacy", action=argparse.BooleanOptionalAction, default=True,
                   help="restrict layers by privacy class (default: on)")

    sub.add_parser("gen", parents=[common], help="emit a builtin workload to a JSON file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "compare":
            policies = [PolicyKind(p) for p in (args.policies or [k.value for k in PolicyKind])]
            seeds = args.seeds if args.seeds else [cfg.seed]
            return cmd_compare(cfg, policies, seeds)
        if args.command == "sweep":
            policies = [PolicyKind(p) for p in (args.policies or [k.value for k in PolicyKind])]
            seeds = args.seeds if args.seeds else [cfg.seed]
            return cmd_sweep(cfg, args.param, args.values, policies, seeds)
        if args.command == "oracle":
            return cmd_oracle(cfg, args.honor_privacy)
        if args.command == "gen":
            return cmd_gen(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
