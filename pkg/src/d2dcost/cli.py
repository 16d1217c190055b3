"""Command-line front end.

Five subcommands share one JSON configuration schema (sections ``network``,
``code``, ``scheme``, ``grid``, ``sim``, plus optional ``search``,
``incoming``, ``golden`` and ``validate`` blocks) and one output discipline:
CSV files are UTF-8 with a header row and LF line endings, floats are written
with 12 significant digits, simulation runs stream one canonical JSON record
per line, and nothing is overwritten unless ``--force`` is given.  The same
manifest and seed always produce byte-identical outputs.

Exit codes: 0 on success, 1 when a validation check fails (including a
corrupted golden file), 2 for configuration problems (including a missing
golden file).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import acceptance
from .analytic import CostQuery, _avail_prob, overall_cost
from .incoming import ChainConfig, effective_rate, incoming_overall_cost, stationary
from .model import (
    CodeConstraintError,
    CodeFamily,
    CodeSpec,
    NetworkParams,
    Scheme,
    derive_code,
)
from .search import SearchSpec, delta_max, enumerate_codes, min_cost_curve
from .simulator import RequestModel, SimConfig, SimResult, run

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2

ANALYTIC_HEADER = (
    "family", "m", "h", "r", "scheme", "delta",
    "repair_bs", "repair_d2d", "download_bs", "download_d2d",
    "total", "normalized",
)
SEARCH_HEADER = ("delta", "family", "m", "h", "r", "cost", "normalized")


class ConfigError(Exception):
    """A manifest or configuration problem; maps to exit code 2."""


# ---------------------------------------------------------------------------
# canonical formatting


def canon(value: float) -> float:
    """Round to the file format's 12 significant digits.

    Values that round-trip through ``%.12g`` compare equal after re-parsing,
    which is what makes emitted tables reproducible byte for byte.
    """
    if not math.isfinite(value):
        return value
    return float(f"{value:.12g}")


def fmt(value) -> str:
    """One CSV cell: floats at 12 significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return canon(value) if math.isfinite(value) else None
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _dumps(record: dict) -> str:
    return json.dumps(_json_safe(record), sort_keys=True,
                      separators=(",", ":"), allow_nan=False)


# ---------------------------------------------------------------------------
# configuration


def parse_override(text: str) -> tuple[list[str], object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    for text in overrides:
        path, value = parse_override(text)
        node = cfg
        for part in path[:-1]:
            if isinstance(node, list):
                node = node[_list_index(node, part)]
            else:
                node = node.setdefault(part, {})
                if not isinstance(node, (dict, list)):
                    raise ConfigError(
                        f"--set {text!r}: {part!r} is not a section")
        leaf = path[-1]
        if isinstance(node, list):
            node[_list_index(node, leaf)] = value
        else:
            node[leaf] = value
    return cfg


def _list_index(node: list, part: str) -> int:
    try:
        index = int(part)
    except ValueError:
        raise ConfigError(f"list index expected, got {part!r}") from None
    if not 0 <= index < len(node):
        raise ConfigError(f"list index {index} out of range")
    return index


def load_config(path: str | None, overrides: list[str],
                required: bool = True) -> dict:
    if path is None:
        if required:
            raise ConfigError("--config is required for this command")
        return apply_overrides({}, overrides)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return apply_overrides(cfg, overrides)


_NETWORK_KEYS = {"M", "mu", "omega", "lam", "lambda_c",
                 "rho_bs", "rho_d2d", "file_size", "phi"}


def build_params(cfg: dict) -> NetworkParams:
    section = cfg.get("network")
    if not isinstance(section, dict):
        raise ConfigError("config needs a 'network' section")
    unknown = sorted(set(section) - _NETWORK_KEYS)
    if unknown:
        raise ConfigError(f"unknown network keys: {', '.join(unknown)}")
    try:
        return NetworkParams(**section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"network: {exc}") from exc


def build_codes(cfg: dict, file_size: float) -> list[CodeSpec]:
    section = cfg.get("code")
    if section is None:
        raise ConfigError("config needs a 'code' section")
    entries = section if isinstance(section, list) else [section]
    codes = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "family" not in entry:
            raise ConfigError(f"code[{i}] must be an object with a 'family'")
        try:
            family = CodeFamily(entry["family"])
            codes.append(derive_code(
                family, m=int(entry["m"]),
                h=entry.get("h"), r=entry.get("r"),
                file_size=file_size,
            ))
        except (KeyError, ValueError, CodeConstraintError) as exc:
            raise ConfigError(f"code[{i}]: {exc}") from exc
    return codes


def build_schemes(cfg: dict) -> list[Scheme]:
    section = cfg.get("scheme", "conventional")
    values = section if isinstance(section, list) else [section]
    try:
        schemes = [Scheme(v) for v in values]
    except ValueError as exc:
        raise ConfigError(f"scheme: {exc}") from exc
    if not schemes:
        raise ConfigError("scheme list must not be empty")
    return schemes


def build_grid(cfg: dict) -> tuple[float, ...]:
    section = cfg.get("grid")
    if not isinstance(section, dict):
        raise ConfigError("config needs a 'grid' section")
    if "delta" in section:
        values = section["delta"]
        if not isinstance(values, list):
            raise ConfigError("grid.delta must be a list of intervals")
    else:
        try:
            start = float(section["start"])
            stop = float(section["stop"])
            points = int(section["points"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(
                "grid needs either 'delta' or start/stop/points") from exc
        if points < 1 or start <= 0 or stop <= start:
            raise ConfigError("grid requires 0 < start < stop and points >= 1")
        space = np.geomspace if section.get("log", True) else np.linspace
        values = list(space(start, stop, points))
        if section.get("include_zero", False):
            values = [0.0] + values
    grid = tuple(float(v) for v in values)
    if not grid:
        raise ConfigError("the delta grid is empty")
    if any(d < 0 or math.isnan(d) for d in grid):
        raise ConfigError("grid intervals must be non-negative numbers")
    return grid


def incoming_enabled(cfg: dict) -> bool:
    section = cfg.get("incoming", False)
    if isinstance(section, dict):
        return bool(section.get("enabled", False))
    return bool(section)


# ---------------------------------------------------------------------------
# output plumbing


def _target(args, name: str) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    if path.exists() and not args.force:
        raise ConfigError(f"refusing to overwrite {path} (pass --force)")
    return path


def write_csv(path: Path, header: tuple[str, ...], rows: list[tuple]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    path.write_text(buffer.getvalue(), encoding="utf-8")


def analytic_row(code: CodeSpec, scheme: Scheme, delta: float, cost) -> tuple:
    return (
        code.family.value, code.m, code.h, code.r, scheme.value, canon(delta),
        canon(cost.repair_bs), canon(cost.repair_d2d),
        canon(cost.download_bs), canon(cost.download_d2d),
        canon(cost.total), canon(cost.normalized),
    )


def simulation_record(config: SimConfig, result: SimResult,
                      analytic=None) -> str:
    """Canonical one-line JSON for one simulation run.

    Keys are sorted and floats rounded to 12 significant digits, so equal
    runs serialize to equal bytes.
    """
    params = config.params
    record = {
        "code": {"family": config.code.family.value, "m": config.code.m,
                 "h": config.code.h, "r": config.code.r},
        "scheme": config.scheme.value,
        "request_model": config.request_model.value,
        "incoming": config.incoming,
        "delta": config.delta,
        "horizon": config.horizon,
        "seed": config.seed,
        "network": {"M": params.M, "mu": params.mu, "omega": params.omega,
                    "lam": params.lam, "lambda_c": params.lambda_c,
                    "rho_bs": params.rho_bs, "rho_d2d": params.rho_d2d,
                    "file_size": params.file_size},
        "cost": result.cost.as_dict(),
        "stderr": dict(result.stderr),
        "event_counts": dict(result.event_counts),
        "skipped_repairs": result.skipped_repairs,
        "population_mean": result.population_mean,
        "n_intervals": result.n_intervals,
    }
    if analytic is not None:
        stderr = result.stderr["total"]
        gap = result.cost.total - analytic.total
        if stderr > 0:
            z = gap / stderr
        else:
            z = 0.0 if gap == 0 else math.inf
        record["analytic"] = analytic.as_dict()
        record["z_total"] = z
        record["flagged"] = not abs(z) <= 3.0
    return _dumps(record)


# ---------------------------------------------------------------------------
# subcommands


def cmd_analytic(args) -> int:
    cfg = load_config(args.config, args.overrides)
    params = build_params(cfg)
    codes = build_codes(cfg, params.file_size)
    schemes = build_schemes(cfg)
    grid = build_grid(cfg)
    use_incoming = incoming_enabled(cfg)
    path = _target(args, "analytic.csv")

    rows = []
    for code in codes:
        for scheme in schemes:
            for delta in grid:
                query = CostQuery(params=params, code=code,
                                  delta=delta, scheme=scheme)
                cost = (incoming_overall_cost(query) if use_incoming
                        else overall_cost(query))
                rows.append(analytic_row(code, scheme, delta, cost))
    write_csv(path, ANALYTIC_HEADER, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.overrides)
    params = build_params(cfg)
    codes = build_codes(cfg, params.file_size)
    schemes = build_schemes(cfg)
    grid = build_grid(cfg)
    use_incoming = incoming_enabled(cfg)
    sim = cfg.get("sim", {})
    if not isinstance(sim, dict) or "horizon" not in sim:
        raise ConfigError("simulate needs a 'sim' section with a horizon")
    seed = args.seed if args.seed is not None else sim.get("seed")
    if seed is None:
        raise ConfigError("simulate needs sim.seed or --seed")
    try:
        request_model = RequestModel(sim.get("request_model", "fixed-aggregate"))
    except ValueError as exc:
        raise ConfigError(f"sim.request_model: {exc}") from exc

    records_path = _target(args, "records.jsonl")
    report_path = _target(args, "report.json")

    lines = []
    flagged = []
    index = 0
    for code in codes:
        for scheme in schemes:
            for delta in grid:
                try:
                    config = SimConfig(
                        params=params, code=code, delta=delta,
                        horizon=float(sim["horizon"]),
                        seed=int(seed) + index, scheme=scheme,
                        request_model=request_model,
                        incoming=use_incoming,
                        trace=bool(sim.get("trace", False)),
                    )
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"sim: {exc}") from exc
                index += 1
                result = run(config)
                query = CostQuery(params=params, code=code,
                                  delta=delta, scheme=scheme)
                analytic = (incoming_overall_cost(query) if use_incoming
                            else overall_cost(query))
                line = simulation_record(config, result, analytic)
                lines.append(line)
                parsed = json.loads(line)
                label = (f"{code.label()} {scheme.value} "
                         f"interval {delta:g} seed {config.seed}")
                z = parsed["z_total"]
                z_text = "inf" if z is None else f"{z:+.2f}"
                flag = parsed["flagged"]
                if flag:
                    flagged.append(label)
                print(f"{label}: empirical {result.cost.total:.6g} "
                      f"analytic {analytic.total:.6g} z {z_text}"
                      + ("  FLAG |z|>3" if flag else ""))

    records_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    report = {"runs": index, "flagged": flagged}
    report_path.write_text(_dumps(report) + "\n", encoding="utf-8")
    print(f"wrote {records_path} ({index} runs, {len(flagged)} flagged)")
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = load_config(args.config, args.overrides)
    params = build_params(cfg)
    schemes = build_schemes(cfg)
    if len(schemes) != 1:
        raise ConfigError("search uses a single scheme")
    grid = build_grid(cfg)
    options = cfg.get("search", {})
    if not isinstance(options, dict):
        raise ConfigError("'search' section must be an object")
    path = _target(args, "winners.csv")
    try:
        spec = SearchSpec(
            params=params, delta_grid=grid, scheme=schemes[0],
            m_max=int(options.get("m_max", 10)),
            gamma_budget=float(options.get("gamma_budget", 3.0)),
            incoming=incoming_enabled(cfg),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"search: {exc}") from exc

    rows = []
    for point in min_cost_curve(spec):
        code = point.code
        rows.append((
            canon(point.delta), code.family.value, code.m, code.h, code.r,
            canon(point.cost.total), canon(point.cost.normalized),
        ))
    write_csv(path, SEARCH_HEADER, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _figure_datasets() -> list[tuple[str, tuple[str, ...], list[tuple]]]:
    """The fixed reference datasets: plot-ready tables, no figures drawn."""
    grid = acceptance.REFERENCE_GRID
    base = acceptance.REFERENCE_PARAMS
    codes = acceptance.reference_codes()
    datasets = []

    def table(params, code_list, schemes, cost_fn=overall_cost, extra=None):
        rows = []
        for code in code_list:
            for scheme in schemes:
                for delta in grid:
                    cost = cost_fn(CostQuery(params=params, code=code,
                                             delta=delta, scheme=scheme))
                    row = analytic_row(code, scheme, delta, cost)
                    rows.append(extra + row if extra else row)
        return rows

    datasets.append(("cost_curves.csv", ANALYTIC_HEADER,
                     table(base, codes, [Scheme.CONVENTIONAL])))

    cheap = replace(base, omega=0.1, rho_bs=10.0)
    datasets.append(("scheme_comparison.csv", ANALYTIC_HEADER,
                     table(cheap, codes,
                           [Scheme.CONVENTIONAL, Scheme.HYBRID])))

    lrc = derive_code(CodeFamily.LRC, 6, 3, 2)
    rows = []
    for omega in (0.01, 0.02, 0.05, 0.1, 0.2, 0.5):
        params = replace(base, omega=omega, rho_bs=20.0)
        rows.extend(table(params, [lrc], [Scheme.CONVENTIONAL],
                          extra=(canon(omega),)))
    datasets.append(("request_ratio_sweep.csv",
                     ("omega",) + ANALYTIC_HEADER, rows))

    msr_set = [derive_code(CodeFamily.MSR, 9, 3, r) for r in range(4, 9)]
    datasets.append(("repair_locality_sweep.csv", ANALYTIC_HEADER,
                     table(base, msr_set, [Scheme.CONVENTIONAL])))

    rows = []
    params_ceiling = replace(base, omega=0.05)
    for code in codes:
        for rho in np.geomspace(1.0, 100.0, 31):
            params = replace(params_ceiling, rho_bs=float(rho))
            ceiling = delta_max(params, code)
            cell = (None if ceiling is None
                    else canon(ceiling) if math.isfinite(ceiling) else ceiling)
            rows.append((code.family.value, code.m, code.h, code.r,
                         canon(float(rho)), cell))
    datasets.append(("interval_ceiling_vs_price.csv",
                     ("family", "m", "h", "r", "rho", "max_beneficial_interval"),
                     rows))

    def winner_rows(spec: SearchSpec) -> list[tuple]:
        rows = []
        for point in min_cost_curve(spec):
            code = point.code
            rows.append((canon(point.delta), code.family.value, code.m,
                         code.h, code.r, canon(point.cost.total),
                         canon(point.cost.normalized)))
        return rows

    datasets.append(("winner_map.csv", SEARCH_HEADER, winner_rows(
        SearchSpec(params=base, delta_grid=grid, gamma_budget=3.0, m_max=10))))
    datasets.append(("winner_map_hybrid.csv", SEARCH_HEADER, winner_rows(
        SearchSpec(params=replace(base, omega=1.0), delta_grid=grid,
                   scheme=Scheme.HYBRID, gamma_budget=3.0, m_max=10))))

    mds = derive_code(CodeFamily.MDS, 9, 3, 3)
    rows = []
    for lambda_c in (0.0, 0.25, 0.5, 1.0):
        params = replace(base, lambda_c=lambda_c)
        rows.extend(table(params, [mds], [Scheme.CONVENTIONAL],
                          cost_fn=incoming_overall_cost,
                          extra=(canon(lambda_c),)))
    datasets.append(("incoming_cost_curves.csv",
                     ("lambda_c",) + ANALYTIC_HEADER, rows))

    datasets.append(("incoming_winner_map.csv", SEARCH_HEADER, winner_rows(
        SearchSpec(params=replace(base, lambda_c=1.0), delta_grid=grid,
                   gamma_budget=3.0, m_max=10, incoming=True))))
    return datasets


def cmd_figures(args) -> int:
    if args.config is not None:
        print("note: figures uses fixed reference configurations; "
              "--config is ignored")
    datasets = _figure_datasets()
    paths = [_target(args, name) for name, _, _ in datasets]
    for path, (_, header, rows) in zip(paths, datasets):
        write_csv(path, header, rows)
        print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# golden-file checks and the validator


def _code_from_tag(tag: str, file_size: float) -> CodeSpec:
    if tag.startswith("rep"):
        return derive_code(CodeFamily.REPLICATION,
                           m=int(tag.split("x")[1].rstrip(")")),
                           file_size=file_size)
    family, rest = tag.split("[")
    m, h, r = (int(x) for x in rest.rstrip("]").split(","))
    return derive_code(CodeFamily(family), m=m, h=h, r=r,
                       file_size=file_size)


def _entry_params(config: dict) -> NetworkParams:
    return NetworkParams(
        M=config["M"], mu=config["mu"], omega=config["omega"],
        rho_bs=config["rho_bs"], rho_d2d=config["rho_d2d"],
        lambda_c=config.get("lambda_c", 0.0),
    )


def _check_rate_entry(name: str, entry: dict) -> acceptance.CheckRow:
    config = entry["config"]
    params = _entry_params(config)
    code = _code_from_tag(config["code"], params.file_size)
    scheme = Scheme.HYBRID if config["hybrid"] else Scheme.CONVENTIONAL
    cost = overall_cost(CostQuery(params=params, code=code,
                                  delta=config["delta"], scheme=scheme))
    if entry["oracle"] == "repair_rate_mc":
        analytic = cost.repair_bs + cost.repair_d2d
    else:
        analytic = cost.download_bs + cost.download_d2d
    gap = abs(entry["total"] - analytic)
    bound = 5.0 * entry["stderr"]
    return acceptance.CheckRow(
        label=f"golden {name}",
        passed=gap <= bound,
        measured=f"stored {entry['total']:.6f} vs analytic {analytic:.6f}",
        target=f"within 5 stderr ({bound:.2e})",
    )


def _check_quadrature_entry(name: str, entry: dict) -> acceptance.CheckRow:
    worst = 0.0
    for row in entry["rows"]:
        value = _avail_prob(row["h"], row["m"], row["mu"], row["delta"])
        worst = max(worst, abs(value - row["value"]))
    return acceptance.CheckRow(
        label=f"golden {name}",
        passed=worst <= 1e-9,
        measured=f"max gap {worst:.2e}",
        target="<= 1e-09",
    )


def _check_stationary_entry(name: str, entry: dict) -> acceptance.CheckRow:
    config = entry["config"]
    dist = stationary(ChainConfig(lambda_c=config["lambda_c"],
                                  mu=config["mu"], delta=config["delta"]))
    gap = abs(entry["q"][0] - float(dist.q[0]))
    bound = 5.0 * entry["stderr_q0"]
    return acceptance.CheckRow(
        label=f"golden {name}",
        passed=gap <= bound,
        measured=f"stored q0 {entry['q'][0]:.6f} vs analytic {dist.q[0]:.6f}",
        target=f"within 5 stderr ({bound:.2e})",
    )


def _check_extinction_entry(name: str, entry: dict) -> acceptance.CheckRow:
    config = entry["config"]
    dist = stationary(ChainConfig(lambda_c=config["lambda_c"],
                                  mu=config["mu"], delta=config["delta"]))
    analytic = 1.0 / effective_rate(dist, config["mu"])
    gap = abs(entry["mean_extinction_time"] - analytic)
    bound = 6.0 * entry["stderr"]
    return acceptance.CheckRow(
        label=f"golden {name}",
        passed=gap <= bound,
        measured=(f"stored {entry['mean_extinction_time']:.6f} "
                  f"vs analytic {analytic:.6f}"),
        target=f"within 6 stderr ({bound:.2e})",
    )


def _check_sim_entry(name: str, entry: dict) -> acceptance.CheckRow:
    config = entry["config"]
    params = _entry_params(config)
    code = _code_from_tag(config["code"], params.file_size)
    sim = SimConfig(params=params, code=code, delta=config["delta"],
                    horizon=config["horizon"], seed=config["seed"],
                    incoming=True)
    result = run(sim)
    worst = 0.0
    for key in ("repair_bs", "repair_d2d", "download_bs", "download_d2d"):
        stored = entry[key]
        fresh = getattr(result.cost, key)
        scale = max(abs(stored), abs(fresh), 1e-12)
        worst = max(worst, abs(stored - fresh) / scale)
    return acceptance.CheckRow(
        label=f"golden {name}",
        passed=worst <= 1e-9,
        measured=f"max relative drift {worst:.2e} on replay",
        target="<= 1e-09 (seeded replay)",
    )


def _check_enumeration_entry(name: str, entry: dict) -> acceptance.CheckRow:
    config = entry["config"]
    spec = SearchSpec(params=acceptance.REFERENCE_PARAMS, delta_grid=(0.0,),
                      gamma_budget=config["gamma_budget"],
                      m_max=config["m_max"])
    codes = enumerate_codes(spec)
    ok = (len(codes) == entry["count"]
          and codes[0].label() == entry["first"]
          and codes[-1].label() == entry["last"])
    return acceptance.CheckRow(
        label=f"golden {name}",
        passed=ok,
        measured=f"{len(codes)} codes ({codes[0].label()} .. {codes[-1].label()})",
        target=f"{entry['count']} codes ({entry['first']} .. {entry['last']})",
    )


_GOLDEN_CHECKS = {
    "repair_rate_mc": _check_rate_entry,
    "download_rate_mc": _check_rate_entry,
    "avail_prob_quad": _check_quadrature_entry,
    "class_chain_mc": _check_stationary_entry,
    "extinction_time_mc": _check_extinction_entry,
    "simulator.run(incoming=True)": _check_sim_entry,
    "enumerate_codes": _check_enumeration_entry,
}


def check_goldens(entries: dict) -> list[acceptance.CheckRow]:
    """Cross-check every stored golden value against a fresh computation."""
    rows = []
    for name in sorted(entries):
        entry = entries[name]
        try:
            checker = _GOLDEN_CHECKS[entry["oracle"]]
            rows.append(checker(name, entry))
        except Exception as exc:  # malformed entries are corruption too
            rows.append(acceptance.CheckRow(
                label=f"golden {name}",
                passed=False,
                measured=f"malformed entry: {exc}",
                target="well-formed golden entry",
            ))
    if not rows:
        rows.append(acceptance.CheckRow(
            label="golden entries",
            passed=False,
            measured="no entries found",
            target="at least one golden entry",
        ))
    return rows


def _load_golden_text(cfg: dict) -> str:
    section = cfg.get("golden", {})
    path_str = section.get("path") if isinstance(section, dict) else None
    if path_str is not None:
        path = Path(path_str)
        if not path.is_file():
            raise ConfigError(f"golden file not found: {path}")
        return path.read_text(encoding="utf-8")
    packaged = resources.files("d2dcost").joinpath("data/goldens.json")
    if not packaged.is_file():
        raise ConfigError("packaged golden file data/goldens.json is missing")
    return packaged.read_text(encoding="utf-8")


def cmd_validate(args) -> int:
    cfg = load_config(args.config, args.overrides, required=False)
    report_path = _target(args, "validation.json")
    text = _load_golden_text(cfg)

    def fail_report(golden_rows: list[acceptance.CheckRow]) -> int:
        for row in golden_rows:
            if not row.passed:
                print(f"FAIL {row.label}: {row.measured}; need {row.target}")
        report = {
            "passed": False,
            "golden_checks": [r.as_dict() for r in golden_rows],
            "criteria": [],
        }
        report_path.write_text(_dumps(report) + "\n", encoding="utf-8")
        print(f"wrote {report_path}")
        print("validation: FAIL (golden checks)")
        return EXIT_VALIDATION

    try:
        payload = json.loads(text)
        entries = payload["entries"]
        if not isinstance(entries, dict):
            raise TypeError("'entries' must be an object")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        return fail_report([acceptance.CheckRow(
            label="golden file",
            passed=False,
            measured=f"corrupted: {exc}",
            target="valid JSON with an 'entries' object",
        )])

    golden_rows = check_goldens(entries)
    for row in golden_rows:
        state = "ok  " if row.passed else "FAIL"
        print(f"{state} {row.label}: {row.measured}")
    if not all(row.passed for row in golden_rows):
        return fail_report(golden_rows)

    validate_opts = cfg.get("validate", {})
    skip_slow = (bool(validate_opts.get("skip_slow", False))
                 if isinstance(validate_opts, dict) else False)
    results = acceptance.run_all(skip_slow=skip_slow, progress=print)
    for result in results:
        for row in result.rows:
            if not row.passed:
                print(f"  FAIL {row.label}: {row.measured}; need {row.target}")
    passed = all(r.passed for r in results)
    report = {
        "passed": passed,
        "golden_checks": [r.as_dict() for r in golden_rows],
        "criteria": [r.as_dict() for r in results],
        "skipped_slow": skip_slow,
    }
    report_path.write_text(_dumps(report) + "\n", encoding="utf-8")
    print(f"wrote {report_path}")
    print(f"validation: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# entry point


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="d2dcost",
        description="Cost analysis, simulation, and code search for "
                    "D2D distributed storage under periodic repair.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "analytic": (cmd_analytic, "closed-form cost table over a delta grid"),
        "simulate": (cmd_simulate, "seeded Monte-Carlo runs plus z-score report"),
        "search": (cmd_search, "cheapest code per grid delta"),
        "figures": (cmd_figures, "emit the reference figure datasets"),
        "validate": (cmd_validate, "golden checks plus the acceptance suite"),
    }
    for name, (func, help_text) in commands.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, help="override the base seed")
        sp.add_argument("--force", action="store_true",
                        help="allow overwriting existing outputs")
        sp.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override a config entry (dotted keys)")
        sp.set_defaults(func=func)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
