#!/usr/bin/env python
"""
Threshold eigenvalues of a waveguide with a shrinking potential.

Command-line front end of the `wguide` package. The guide Π = Ω × R, the
potential and the experiment are described in `config.yaml` (or the file
named by WGUIDE_CONFIG); flags override single keys.

Subcommands:
- `modes`: transverse mode table of the cross-section.
- `moments`: <V>, <Phi_0 V>, strip moments and the existence conditions.
- `predict`: regime prediction of k and e for every h.
- `solve`: threshold solve (root k_eps, verdict, e) for every h.
- `oracle`: brute-force reference eigenvalue for every h.
- `sweep`: all of the above per h, written as CSV / JSON lines / HTML.
- `verify <tag>`: acceptance checks of one regime fixture.

Exit status: 0 on success, 2 on usage or configuration errors, 1 on any
other failure (and for `verify`, when a check fails).

Usage:
    $ python waveguide.py sweep --alpha 0 --h 0.2 0.1 0.05
    $ python waveguide.py verify main
    $ python waveguide.py solve --potential box --param amplitude=-1 --emit json

Dependencies:
- colorama, prettytable, pandas, pyyaml
- wguide (this package)
"""

import argparse
import os
import sys

import pandas as pd
import yaml
from colorama import Fore, init
from prettytable import PrettyTable

from wguide import (
    ConfigError,
    ExperimentConfig,
    Settings,
    SweepReport,
    ThresholdProblem,
    WaveguideError,
    check_conditions,
    compute_moments,
    mode_table,
    predict,
    run_oracle,
    run_sweep,
    verify,
)
from wguide.experiment import solver_config, write_csv, write_jsonl

# Enable colored terminal output
init(autoreset=True)

USAGE_ERRORS = (ConfigError, yaml.YAMLError)


def _fmt(value):
    if value is None:
        return "-"
    if isinstance(value, complex):
        if value.imag == 0:
            return f"{value.real:.10g}"
        return f"{value.real:.10g}{value.imag:+.3g}j"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _parse_param(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"--param expects key=value, got {text!r}")
    return key, yaml.safe_load(value)


def load_config(args):
    """ExperimentConfig from the config file and the command-line overrides."""
    settings = Settings(config_path=args.config)
    overrides = {
        "alpha": args.alpha,
        "h": args.h,
        "mode": args.mode,
        "j_max": args.j_max,
        "potential": args.potential,
        "output": args.output,
        "emit": args.emit,
    }
    if args.param:
        overrides["params"] = dict(_parse_param(p) for p in args.param)
    return ExperimentConfig.from_settings(settings, overrides)


def emit(config, name, records):
    """Write `records` as <name>.jsonl and/or <name>.csv in the output folder."""
    os.makedirs(config.output_folder, exist_ok=True)
    base = os.path.join(config.output_folder, name)
    if "json" in config.formats:
        write_jsonl(records, base + ".jsonl")
        print(Fore.MAGENTA + f"📂 Written {base}.jsonl")
    if "csv" in config.formats:
        frame = pd.json_normalize(records)
        write_csv(frame[sorted(frame.columns)], base + ".csv")
        print(Fore.MAGENTA + f"📂 Written {base}.csv")


def cmd_modes(args):
    config = load_config(args)
    table = PrettyTable(["j", "tensor index", "mu_j", "phi_j(0)", "grad phi_j(0)", "K_j(0)"])
    for row in mode_table(config.cross_section, args.count):
        table.add_row([
            row["j"], row["tensor_index"], _fmt(row["mu"]), _fmt(row["phi_origin"]),
            ", ".join(_fmt(g) for g in row["gradient_origin"]), _fmt(row["k_rate_at_zero"]),
        ])
    print(Fore.CYAN + f"Cross-section: {config.cross_section.describe()}")
    print(table)
    return 0


def cmd_moments(args):
    config = load_config(args)
    moments = compute_moments(config.potential, config.cross_section, config.quadrature_order)
    report = check_conditions(moments)
    table = PrettyTable(["moment", "value"])
    table.add_row(["<V>", _fmt(moments.m0)])
    table.add_row(["<Phi_0 V>", _fmt(moments.m1)])
    table.add_row(["phi_0(0)", _fmt(moments.phi0_origin)])
    if moments.is_strip:
        table.add_row(["<v>'", _fmt(moments.strip_m0)])
        table.add_row(["int v t_1", _fmt(moments.strip_m1)])
    print(Fore.CYAN + f"Potential: {config.potential_name} {config.potential_params}")
    print(table)
    print(Fore.YELLOW + f"Condition: {report.label}")
    emit(config, "moments", [{"moments": moments.to_record(), "conditions": report.to_record()}])
    return 0


def cmd_predict(args):
    config = load_config(args)
    table = PrettyTable(["h", "regime", "k", "e", "verdict", "remainder"])
    records = []
    for h in config.h_values:
        prediction = predict(config, h)
        table.add_row([_fmt(h), prediction.regime, _fmt(prediction.k), _fmt(prediction.e),
                       prediction.verdict, prediction.remainder])
        records.append(prediction.to_record(**config.inputs(h)))
    print(table)
    emit(config, "predict", records)
    return 0


def cmd_solve(args):
    config = load_config(args)
    table = PrettyTable(["h", "k_eps", "verdict", "e", "residual", "iterations"])
    records = []
    for h in config.h_values:
        print(Fore.YELLOW + f"🔄 Solving h = {h:g} ...")
        problem = ThresholdProblem(
            config.cross_section, config.potential, h, config.alpha, config.solver
        )
        solution = problem.solve()
        table.add_row([_fmt(h), _fmt(solution.k), solution.verdict, _fmt(solution.e),
                       f"{solution.residual:.2e}", solution.iterations])
        records.append(solution.to_record(**config.inputs(h)))
    print(table)
    emit(config, "solve", records)
    return 0


def cmd_oracle(args):
    config = load_config(args)
    table = PrettyTable(["h", "e_oracle", "margin", "error estimate", "decay rate", "size"])
    records = []
    for h in config.h_values:
        print(Fore.YELLOW + f"🔄 Oracle h = {h:g} ...")
        result = run_oracle(config, h, predict(config, h), refined=args.refine)
        table.add_row([_fmt(h), _fmt(result.e), f"{result.margin:.2e}",
                       _fmt(result.error_estimate), _fmt(result.decay_rate), result.size])
        records.append(result.to_record(**config.inputs(h), options=dict(config.oracle)))
        if config.profile_csv:
            path = os.path.join(config.output_folder, f"profile_h{h:.6g}.csv")
            os.makedirs(config.output_folder, exist_ok=True)
            write_csv(pd.DataFrame(result.profile_rows(), columns=["x_n", "c0_re", "c0_im"]), path)
            print(Fore.MAGENTA + f"📂 Written {path}")
    print(table)
    emit(config, "oracle", records)
    return 0


def cmd_sweep(args):
    config = load_config(args)
    print(Fore.CYAN + f"Sweep over h = {list(config.h_values)}")
    rows = run_sweep(config)
    failed = [row for row in rows if row.status != "ok"]
    for row in failed:
        print(Fore.RED + f"h = {row.h:g}: {row.status}")
    report = SweepReport(config, rows)
    for output_format in config.formats:
        print(Fore.YELLOW + report.generate(output_format))
    return 1 if failed else 0


def cmd_verify(args):
    settings = Settings(config_path=args.config) if args.config or not args.tag else None
    tag = args.tag or settings.get("experiment.regime")
    if not tag:
        raise ConfigError("verify needs a regime tag (argument or experiment.regime)")
    cfg = solver_config(settings.section("solver")) if args.config else None
    checks = verify(tag, cfg)
    table = PrettyTable(["check", "result", "measured", "bound"])
    for check in checks:
        table.add_row([check.name, "PASS" if check.passed else "FAIL", check.measured, check.bound])
    print(Fore.CYAN + f"Regime: {tag}")
    print(table)
    for check in checks:
        colour = Fore.GREEN if check.passed else Fore.RED
        print(colour + f"{'✅' if check.passed else '❌'} {check.name}: {check.measured}")
    return 0 if all(check.passed for check in checks) else 1


def build_parser():
    """Build and return the CLI argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: WGUIDE_CONFIG or config.yaml).")
    common.add_argument("--alpha", type=float, help="Exponent alpha < 1.")
    common.add_argument("--h", type=float, nargs="+", help="Scales h in (0, 1).")
    common.add_argument("--mode", choices=["series", "direct"], help="F_eps evaluation mode.")
    common.add_argument("--j-max", dest="j_max", type=int, help="Highest transverse mode index.")
    common.add_argument("--potential", help="Catalog potential id.")
    common.add_argument("--param", action="append", help="Potential parameter key=value.")
    common.add_argument("--emit", choices=["json", "csv", "both"], help="Record formats.")
    common.add_argument("--output", help="Output folder.")

    parser = argparse.ArgumentParser(
        description="Threshold eigenvalues of a waveguide with a shrinking potential."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    modes = sub.add_parser("modes", parents=[common], help="Transverse mode table.")
    modes.add_argument("--count", type=int, default=8, help="Number of modes.")
    sub.add_parser("moments", parents=[common], help="Moments and conditions.")
    sub.add_parser("predict", parents=[common], help="Asymptotic predictions.")
    sub.add_parser("solve", parents=[common], help="Threshold solve.")
    oracle = sub.add_parser("oracle", parents=[common], help="Reference eigensolver.")
    oracle.add_argument("--refine", action="store_true", help="Refine and extrapolate.")
    sub.add_parser("sweep", parents=[common], help="h-sweep with outputs.")
    verify_parser = sub.add_parser("verify", help="Acceptance checks of a regime.")
    verify_parser.add_argument(
        "tag", nargs="?", help="Regime tag (default: experiment.regime of the config)."
    )
    verify_parser.add_argument(
        "--config", help="YAML config file; its solver section replaces the fixture defaults."
    )
    return parser


COMMANDS = {
    "modes": cmd_modes,
    "moments": cmd_moments,
    "predict": cmd_predict,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as exc:
        print(Fore.RED + f"error: {type(exc).__name__}: {exc}")
        return 2
    except (WaveguideError, ValueError, OSError) as exc:
        print(Fore.RED + f"error: {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print(Fore.BLUE + "\n🛑 Stopped by user.")
        sys.exit(1)
