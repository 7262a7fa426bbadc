"""Command-line front end: run scenarios, verify the linear suite, export results.

Exit codes: 0 when every scenario contract holds, 2 when a contract check
fails, 1 on usage or I/O errors. Output is deterministic: identical
invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics_nonlinear import Trajectory
from .scenarios import (
    BasisChoice,
    DegenerateConfigError,
    ScenarioConfig,
    ScenarioId,
    ScenarioReport,
    run_scenario,
)

SCENARIOS: dict[str, tuple[ScenarioId, str]] = {
    "sec3": (ScenarioId.LINEAR_BASELINE, "randomized linear-theory suite (alias: linear)"),
    "sec5": (ScenarioId.NO_CORRELATIONS, "uncorrelated preparation; remote measurement changes nothing"),
    "sec6": (ScenarioId.CLASSICAL_CORRELATIONS, "classically correlated preparation vs the uncorrelated baseline"),
    "sec7": (ScenarioId.CHANGED_CORRELATIONS, "two decompositions of the same reduced state, different dynamics"),
    "sec8": (ScenarioId.ENTANGLEMENT, "singlet preparation; remote basis choice selects the dynamics"),
}
ALIASES = {"linear": "sec3"}


class UsageError(Exception):
    """Malformed command line; reported on stderr with exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """Parsed command line: what to run and how to emit it."""

    command: str
    scenario: ScenarioId | None
    config: ScenarioConfig
    out: str | None
    fmt: str
    precision: int


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit(2); route to exit code 1
        raise UsageError(message)


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"value must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"value must be >= 1, got {text}")
    return value


def _precision(text: str) -> int:
    value = int(text)
    if not 6 <= value <= 17:
        raise argparse.ArgumentTypeError(f"precision must lie in [6, 17], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="spinpair",
        description="Two-spin pair simulator: contrast linear dynamics with state-dependent precession.",
    )
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run one scenario and export its report")
    run_p.add_argument("scenario", help="scenario name; see 'spinpair list'")
    run_p.add_argument("--p", type=_probability, default=None, help="mixing weight (default 0.75)")
    run_p.add_argument("--epsilon", type=float, default=None, help="precession scale (default 1.0)")
    run_p.add_argument("--t-max", type=_positive_float, default=None, help="end of the time grid (default 10)")
    run_p.add_argument("--dt", type=_positive_float, default=None, help="grid spacing (default 1e-3)")
    run_p.add_argument(
        "--basis",
        choices=[b.value for b in BasisChoice],
        default=None,
        help="remote basis to feature in the entanglement scenario",
    )
    run_p.add_argument("--seed", type=int, default=None, help="seed for the randomized suite (default 42)")
    run_p.add_argument("--trials", type=_positive_int, default=None, help="trials for the randomized suite (default 1000)")
    run_p.add_argument("--out", default=None, help="output file (default: stdout)")
    run_p.add_argument("--format", choices=["csv", "json"], default="csv")
    run_p.add_argument("--precision", type=_precision, default=12)

    verify_p = sub.add_parser("verify-linear", help="run the randomized linear-theory suite")
    verify_p.add_argument("--trials", type=_positive_int, default=None)
    verify_p.add_argument("--seed", type=int, default=None)
    verify_p.add_argument("--out", default=None)
    verify_p.add_argument("--format", choices=["csv", "json"], default="json")
    verify_p.add_argument("--precision", type=_precision, default=12)

    sub.add_parser("list", help="list scenario names")
    return parser


def _build_scenario_config(ns: argparse.Namespace) -> ScenarioConfig:
    overrides = {}
    for attr, key in (
        ("p", "p"),
        ("epsilon", "epsilon"),
        ("t_max", "t_max"),
        ("dt", "dt"),
        ("seed", "seed"),
        ("trials", "trials"),
    ):
        value = getattr(ns, attr, None)
        if value is not None:
            overrides[key] = value
    basis = getattr(ns, "basis", None)
    if basis is not None:
        overrides["basis_choice"] = BasisChoice(basis)
    try:
        return ScenarioConfig(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_args(argv) -> RunConfig:
    """Parse the command line; raises UsageError on any malformed input."""
    ns = build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError("a command is required: run, verify-linear, or list")
    if ns.command == "list":
        return RunConfig("list", None, ScenarioConfig(), None, "csv", 12)
    if ns.command == "verify-linear":
        return RunConfig(
            "verify-linear",
            ScenarioId.LINEAR_BASELINE,
            _build_scenario_config(ns),
            ns.out,
            ns.format,
            ns.precision,
        )
    name = ALIASES.get(ns.scenario, ns.scenario)
    if name not in SCENARIOS:
        valid = ", ".join(list(SCENARIOS) + list(ALIASES))
        raise UsageError(f"unknown scenario {ns.scenario!r}; valid names: {valid}")
    scenario, _ = SCENARIOS[name]
    return RunConfig("run", scenario, _build_scenario_config(ns), ns.out, ns.format, ns.precision)


def _fmt(value: float, precision: int) -> str:
    return format(float(value), f".{precision}g")


def _round(value: float, precision: int) -> float:
    return float(_fmt(value, precision))


def _jsonable(value, precision: int):
    if isinstance(value, Trajectory):
        return {
            "times": [_round(t, precision) for t in value.times],
            "points": [[_round(c, precision) for c in row] for row in value.points],
        }
    if isinstance(value, dict):
        return {str(k): _jsonable(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v, precision) for v in value]
    if isinstance(value, (float, np.floating)):
        return _round(float(value), precision)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist(), precision)
    return value


def _render_csv(report: ScenarioReport, precision: int) -> str:
    lines = ["t,arm,sigma1,sigma2,sigma3"]
    for arm_name, traj in report.arms.items():
        for i in range(len(traj)):
            lines.append(
                f"{_fmt(traj.times[i], precision)},{arm_name},"
                f"{_fmt(traj.points[i, 0], precision)},"
                f"{_fmt(traj.points[i, 1], precision)},"
                f"{_fmt(traj.points[i, 2], precision)}"
            )
    return "\n".join(lines) + "\n"


def _render_json(report: ScenarioReport, precision: int) -> str:
    doc = {
        "scenario": report.scenario.value,
        "config": {
            "p": _round(report.config.p, precision),
            "epsilon": _round(report.config.epsilon, precision),
            "t_max": _round(report.config.t_max, precision),
            "dt": _round(report.config.dt, precision),
            "basis_choice": report.config.basis_choice.value,
            "seed": report.config.seed,
            "trials": report.config.trials,
        },
        "divergence": _round(report.divergence, precision),
        "contracts_ok": report.contracts_ok,
        "checks": [
            {
                "name": check.name,
                "value": _round(check.value, precision),
                "bound": _round(check.bound, precision),
                "comparison": check.comparison,
                "passed": check.passed,
            }
            for check in report.checks
        ],
        "arms": {name: _jsonable(traj, precision) for name, traj in report.arms.items()},
        "narrative": _jsonable(report.narrative, precision),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_report(report: ScenarioReport, cfg: RunConfig) -> int:
    """Write the report in the configured format; 0 if all contracts hold, else 2."""
    if cfg.fmt == "csv":
        text = _render_csv(report, cfg.precision)
    elif cfg.fmt == "json":
        text = _render_json(report, cfg.precision)
    else:
        raise UsageError(f"unknown format {cfg.fmt!r}")
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text, encoding="utf-8")
    return 0 if report.contracts_ok else 2


def _print_scenario_list() -> None:
    print("available scenarios:")
    for name, (_, description) in SCENARIOS.items():
        print(f"  {name:10s} {description}")
    for alias, target in ALIASES.items():
        print(f"  {alias:10s} alias for {target}")


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if cfg.command == "list":
        _print_scenario_list()
        return 0
    try:
        report = run_scenario(cfg.scenario, cfg.config)
    except (DegenerateConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return emit_report(report, cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
