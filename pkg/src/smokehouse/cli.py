"""Command-line surface.

Subcommands: run, mechanics, tune, summarize, validate. Exit codes: 0 on
success (for `run`: the batch reached Done), 1 on usage and config errors,
2 when the simulated run terminates in Fault.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import engine, mechanics
from .control import PidGains, tune_gains
from .errors import SmokehouseError
from .sequencer import Phase

EXIT_OK = 0
EXIT_ERROR = 1  # usage and config errors
EXIT_FAULT = 2  # the simulated run ended in Fault


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for faulted runs here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _load_scenario(config_path, preset, overrides) -> engine.ScenarioConfig:
    if config_path:
        base = engine.scenario_to_dict(engine.scenario_from_file(config_path))
    elif preset:
        base = engine.scenario_to_dict(engine.preset_scenario(preset))
    else:
        base = engine.scenario_to_dict(engine.default_scenario())
    if overrides:
        base = engine.apply_overrides(base, overrides)
    return engine.scenario_from_dict(base)


def cmd_run(config_path, preset, output_path, overrides, plot=True) -> int:
    """Simulate one batch; write telemetry CSV (plus figures) and print the
    run summary. Exit 0 when the batch reaches Done, 2 when it faults."""
    try:
        config = _load_scenario(config_path, preset, overrides)
        records, summary = engine.run_scenario(config)
        out = Path(output_path) if output_path else Path("run.csv")
        engine.write_telemetry_csv(records, out)
        written = [str(out)]
        if plot:
            from . import plotting  # deferred: matplotlib import is slow

            temps_png = out.with_name(out.stem + "_temperatures.png")
            actuators_png = out.with_name(out.stem + "_actuators.png")
            plotting.plot_temperatures(records, temps_png)
            plotting.plot_actuators(records, actuators_png)
            written += [str(temps_png), str(actuators_png)]
    except SmokehouseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(engine.summary_text(summary, config.preset_name))
    print()
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK if summary.terminal_phase == Phase.Done.value else EXIT_FAULT


def _mechanics_design(config_path, overrides):
    load, drive = mechanics.reference_design()
    data = {
        "load": {
            "mass_kg": load.mass_kg,
            "gravity": load.gravity,
            "pulley_count": load.pulley_count,
        },
        "drive": {
            "driver_diameter_m": drive.driver.diameter_m,
            "driver_rpm": drive.driver.speed_rpm,
            "driven_diameter_m": drive.driven.diameter_m,
            "center_distance_m": drive.center_distance_m,
            "tension_n": drive.tension_n,
        },
    }
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        for section in ("load", "drive"):
            data[section].update(loaded.get(section, {}))
    if overrides:
        data = engine.apply_overrides(data, overrides)
    load = mechanics.LoadSpec(
        mass_kg=data["load"]["mass_kg"],
        gravity=data["load"]["gravity"],
        pulley_count=int(data["load"]["pulley_count"]),
    )
    drive = mechanics.BeltDrive(
        driver=mechanics.PulleySpec(
            diameter_m=data["drive"]["driver_diameter_m"],
            speed_rpm=data["drive"]["driver_rpm"],
        ),
        driven=mechanics.PulleySpec(diameter_m=data["drive"]["driven_diameter_m"]),
        center_distance_m=data["drive"]["center_distance_m"],
        tension_n=data["drive"]["tension_n"],
    )
    return load, drive


def cmd_mechanics(config_path=None, output_path=None, overrides=None) -> int:
    """Print the tray-lift drive design report. Exit 1 on impossible
    geometry (for example a center distance the pulleys cannot span)."""
    try:
        load, drive = _mechanics_design(config_path, overrides)
        report = mechanics.design_report(load, drive)
    except (SmokehouseError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(mechanics.render_report_text(report))
    if output_path:
        Path(output_path).write_text(
            mechanics.render_report_keyvalues(report) + "\n", encoding="ascii"
        )
        print(f"\nwrote {output_path}")
    return EXIT_OK


def cmd_tune(config_path, phase, budget, preset=None, output_path=None, overrides=None) -> int:
    """Search for better PID gains for one phase and write them out as a
    config fragment that can be merged onto the scenario file."""
    if budget < 1:
        print(f"error: budget must be >= 1, got {budget}", file=sys.stderr)
        return EXIT_ERROR
    if phase not in ("cook", "smoke"):
        print(f"error: unknown phase {phase!r}; expected cook or smoke", file=sys.stderr)
        return EXIT_ERROR
    try:
        scenario = _load_scenario(config_path, preset, overrides)
        if phase == "smoke" and not scenario.control.fans_under_pid:
            # the smoke loop runs on hysteresis unless fans_under_pid is set;
            # tuning it anyway would optimize gains nothing consumes
            scenario = replace(
                scenario, control=replace(scenario.control, fans_under_pid=True)
            )
        initial = (
            scenario.control.cook_gains if phase == "cook" else scenario.control.smoke_gains
        )
        baseline = engine.evaluate_gains(scenario, phase, initial)
        gains, objective = tune_gains(scenario, phase, initial, budget)
    except SmokehouseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"phase            {phase}")
    print(f"budget           {budget} runs")
    print(f"initial gains    kp={initial.kp:.6g} ki={initial.ki:.6g} kd={initial.kd:.6g}")
    print(f"initial objective {baseline:.6g}")
    print(f"tuned gains      kp={gains.kp:.6g} ki={gains.ki:.6g} kd={gains.kd:.6g}")
    print(f"tuned objective  {objective:.6g}")
    fragment = {
        "control": {
            f"{phase}_gains": {"kp": gains.kp, "ki": gains.ki, "kd": gains.kd}
        }
    }
    if output_path is None:
        if config_path:
            base = Path(config_path)
            output_path = base.with_name(base.stem + f"_tuned_{phase}.json")
        else:
            output_path = Path(f"tuned_{phase}.json")
    Path(output_path).write_text(json.dumps(fragment, indent=2) + "\n", encoding="ascii")
    print(f"wrote {output_path}")
    return EXIT_OK


def cmd_summarize(telemetry_path, config_path, preset, overrides) -> int:
    """Recompute and print the summary for an existing telemetry CSV."""
    try:
        config = _load_scenario(config_path, preset, overrides)
        records = engine.read_telemetry_csv(telemetry_path)
        summary = engine.summarize(records, config)
    except (SmokehouseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(engine.summary_text(summary, config.preset_name))
    return EXIT_OK


def cmd_validate(config_path, preset=None, overrides=None) -> int:
    """Check every config invariant; print one line per violation with its
    dotted path. Exit 0 only when the config is clean."""
    try:
        config = _load_scenario(config_path, preset, overrides)
    except SmokehouseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    problems = config.violations()
    for path, message in problems:
        print(f"{path}: {message}")
    if problems:
        print(f"{len(problems)} violation(s)")
        return EXIT_ERROR
    print("config ok")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="smokehouse",
        description="Deterministic smoked-fish machine simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def add_scenario_args(p, with_out=True):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--config", help="scenario config JSON")
        group.add_argument(
            "--preset",
            choices=engine.preset_names(),
            help="named batch preset",
        )
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="PATH=VALUE",
            help="override one config value by dotted path (repeatable)",
        )
        if with_out:
            p.add_argument("--out", help="output path")

    p_run = sub.add_parser("run", help="simulate one batch and write telemetry")
    add_scenario_args(p_run)
    p_run.add_argument(
        "--no-plot", action="store_true", help="skip writing the PNG figures"
    )

    p_mech = sub.add_parser("mechanics", help="print the tray-lift design report")
    p_mech.add_argument("--config", help="mechanics parameter JSON")
    p_mech.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="PATH=VALUE",
        help="override one parameter by dotted path (repeatable)",
    )
    p_mech.add_argument("--out", help="also write key=value report here")

    p_tune = sub.add_parser("tune", help="search for better PID gains")
    add_scenario_args(p_tune)
    p_tune.add_argument("--phase", required=True, help="cook or smoke")
    p_tune.add_argument("--budget", type=int, default=200, help="simulation budget")

    p_sum = sub.add_parser("summarize", help="summarize an existing telemetry CSV")
    p_sum.add_argument("telemetry", help="telemetry CSV path")
    add_scenario_args(p_sum, with_out=False)

    p_val = sub.add_parser("validate", help="check a config against all invariants")
    add_scenario_args(p_val, with_out=False)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(
            args.config, args.preset, args.out, args.overrides, plot=not args.no_plot
        )
    if args.command == "mechanics":
        return cmd_mechanics(args.config, args.out, args.overrides)
    if args.command == "tune":
        return cmd_tune(
            args.config, args.phase, args.budget, args.preset, args.out, args.overrides
        )
    if args.command == "summarize":
        return cmd_summarize(args.telemetry, args.config, args.preset, args.overrides)
    if args.command == "validate":
        return cmd_validate(args.config, args.preset, args.overrides)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
