"""
transmon-dephasing - command-line entry point

    python -m app.main spectrum --ej-sum 20 --ec 0.35
    python -m app.main t2 --table2
    python -m app.main sweep --out sweep.csv --svg charge.svg
    python -m app.main validate --config run.json
"""
import sys
import os
# Add parent directory to path so 'app' module can be imported
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.insert(0, parent_dir)

import argparse
import json
from typing import Any, Dict, List, Optional

from app.config.run_config import RunConfig, load_config, overlay_config, serialize_config
from app.config.settings import APP_DESCRIPTION, APP_TITLE
from app.models.errors import AsymptoticError, ConfigError, OutputError, SolverError
from app.models.noise import ChannelKind, ChargeUnit, PlanckConvention, Policy, RateBudget, SlopeMethod
from app.services.cache import SweepCache
from app.services.logger import StatusLogger
from app.services.noise_service import combine_channels, combine_rates, t2_pure
from app.services.spectrum_service import charge_dispersion, converge_ncut, spectrum_at
from app.services.sweep_service import SweepService, reproduce_table2
from app.utils.data_utils import emit_rows, format_number, format_table2_report, write_text
from app.utils.plot_utils import emit_plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _channel_list(text: str) -> List[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    valid = {kind.value for kind in ChannelKind}
    unknown = [name for name in names if name not in valid]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown channel(s): {', '.join(unknown)}")
    return names


def _common_flags() -> argparse.ArgumentParser:
    """Flags shared by every subcommand. Unset flags stay out of the namespace so the config file wins."""
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON run configuration")

    circuit = common.add_argument_group("circuit")
    circuit.add_argument("--ej-sum", dest="ej_sum", type=float, help="EJ1 + EJ2 in GHz")
    circuit.add_argument("--ec", type=float, help="charging energy in GHz")
    circuit.add_argument("--d", type=float, help="junction asymmetry, 0 <= d < 1")
    circuit.add_argument("--ng", type=float, help="offset charge in Cooper pairs")
    circuit.add_argument("--flux", dest="phi_ext", type=float, help="external flux in flux quanta")
    circuit.add_argument("--ncut", type=int, help="charge basis cutoff")

    noise = common.add_argument_group("noise")
    noise.add_argument("--channels", type=_channel_list, help="comma-separated subset of charge,flux,ic")
    for kind in ChannelKind:
        noise.add_argument(f"--amplitude-{kind.value}", dest=f"amplitude_{kind.value}", type=float)
        noise.add_argument(
            f"--policy-{kind.value}", dest=f"policy_{kind.value}", choices=[p.value for p in Policy]
        )
        noise.add_argument(
            f"--method-{kind.value}", dest=f"method_{kind.value}", choices=[m.value for m in SlopeMethod]
        )
        noise.add_argument(
            f"--planck-{kind.value}", dest=f"planck_{kind.value}", choices=[p.value for p in PlanckConvention]
        )
    noise.add_argument(
        "--charge-unit", dest="charge_unit", choices=[u.value for u in ChargeUnit], help="unit of amplitude_charge"
    )
    noise.add_argument("--allow-amplitude-override", dest="allow_amplitude_override", action="store_true")

    output = common.add_argument_group("output")
    output.add_argument("--format", choices=["csv", "json"])
    output.add_argument("--out", help="output file (default: stdout)")
    output.add_argument("--svg", help="write an SVG plot of the sweep")
    output.add_argument("--svg-channel", dest="svg_channel", choices=[kind.value for kind in ChannelKind])
    output.add_argument("--max-workers", dest="max_workers", type=int)
    output.add_argument("--cache-dir", dest="cache_dir", help="reuse sweep rows cached in this directory")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_TITLE, description=APP_DESCRIPTION)
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    spectrum = subparsers.add_parser("spectrum", parents=[common], help="E01, E12 and anharmonicity")
    spectrum.add_argument("--dispersion", action="store_true", default=False, help="also report charge dispersion")

    t2 = subparsers.add_parser("t2", parents=[common], help="1/f dephasing time per channel")
    t2.add_argument("--table2", action="store_true", default=False, help="working-point report against targets")
    t2.add_argument("--t1", dest="t1_seconds", type=float, default=argparse.SUPPRESS, help="T1 in seconds")

    sweep = subparsers.add_parser("sweep", parents=[common], help="T2 against EJ/Ec")
    sweep.add_argument("--ratio-min", dest="ratio_min", type=float, default=argparse.SUPPRESS)
    sweep.add_argument("--ratio-max", dest="ratio_max", type=float, default=argparse.SUPPRESS)
    sweep.add_argument("--points", type=int, default=argparse.SUPPRESS)
    sweep.add_argument("--spacing", choices=["linear", "log"], default=argparse.SUPPRESS)

    subparsers.add_parser("validate", parents=[common], help="print the resolved configuration")
    return parser


# Namespace attributes that are not RunConfig fields
_COMMAND_ONLY = {"command", "config", "dispersion", "table2"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the --config file, then explicit flags."""
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides: Dict[str, Any] = {
        key: value for key, value in vars(args).items() if key not in _COMMAND_ONLY
    }
    return overlay_config(config, overrides)


# =====================
# COMMANDS
# =====================

def run_spectrum(config: RunConfig, args: argparse.Namespace, status: StatusLogger) -> None:
    params, trunc = config.circuit_params(), config.truncation()
    ncut = converge_ncut(params, trunc)
    spectrum = spectrum_at(params, ncut)

    report: Dict[str, Any] = {
        "ratio": params.ratio,
        "ncut": ncut,
        "energies_ghz": spectrum.energies,
        "e01_ghz": spectrum.e01,
        "e12_ghz": spectrum.e12,
        "alpha_ghz": spectrum.anharmonicity,
    }
    if args.dispersion:
        dispersion = charge_dispersion(params, trunc, max_workers=config.max_workers)
        report["epsilon01_ghz"] = dispersion.epsilon01
        report["max_charge_slope_ghz"] = dispersion.max_slope
        report["argmax_ng"] = dispersion.argmax_ng

    if config.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = "".join(
            f"{key},{format_number(value) if isinstance(value, float) else value}\n"
            for key, value in report.items()
            if key != "energies_ghz"
        )
    write_text(text, config.out)


def run_t2(config: RunConfig, args: argparse.Namespace, status: StatusLogger) -> None:
    params, trunc = config.circuit_params(), config.truncation()

    if args.table2:
        report = reproduce_table2(
            params=params,
            trunc=trunc,
            amplitudes=config.amplitudes(),
            policies=config.policies(),
            methods=config.methods(),
            charge_unit=config.charge_unit,
            planck=config.planck(),
            allow_amplitude_override=config.allow_amplitude_override,
        )
        results = list(report.results.values())
        text = format_table2_report(report)
    else:
        results = [
            t2_pure(
                params,
                trunc,
                config.noise_channel(kind),
                config.operating_point(kind),
                method=config.methods()[kind],
                allow_amplitude_override=config.allow_amplitude_override,
            )
            for kind in ChannelKind
            if kind in config.channels
        ]
        lines = ["channel,slope_ghz,t2_s,ng,phi_ext,policy,method,clamped"]
        for result in results:
            lines.append(
                ",".join([
                    result.channel.kind.value,
                    format_number(result.slope),
                    format_number(result.t2_seconds),
                    format_number(result.point.ng),
                    format_number(result.point.phi_ext),
                    result.point.policy.value,
                    result.method.value,
                    str(result.point.clamped).lower(),
                ])
            )
        text = "\n".join(lines) + "\n"

    t_phi = combine_channels(results)
    text += f"t_phi_combined_s,{format_number(t_phi)}\n"
    if config.t1_seconds is not None:
        total = combine_rates(RateBudget(t1_seconds=config.t1_seconds, t_phi_seconds=t_phi))
        text += f"t2_total_s,{format_number(total)}\n"
    write_text(text, config.out)


def run_sweep_command(config: RunConfig, args: argparse.Namespace, status: StatusLogger) -> None:
    cache = SweepCache(config.cache_dir) if config.cache_dir else None
    service = SweepService(max_workers=config.max_workers, status=status, cache=cache)

    rows = service.run_sweep(config.sweep_spec())
    service.fit_summary(rows)

    written = emit_rows(rows, config.format, config.out)
    status.info(f"Wrote {len(rows)} rows ({written} bytes)")
    if config.svg:
        emit_plot(rows, config.svg_channel, config.svg)
        status.info(f"Wrote {config.svg_channel.value} plot to {config.svg}")


def run_validate(config: RunConfig, args: argparse.Namespace, status: StatusLogger) -> None:
    write_text(serialize_config(config), sys.stdout)
    sys.stderr.write(f"EJ/Ec = {config.ratio!r}\n")


COMMANDS = {
    "spectrum": run_spectrum,
    "t2": run_t2,
    "sweep": run_sweep_command,
    "validate": run_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    status = StatusLogger()

    try:
        config = resolve_config(args)
        COMMANDS[args.command](config, args, status)
    except ConfigError as e:
        status.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except (SolverError, AsymptoticError) as e:
        status.error(f"Computation failed: {e}")
        return EXIT_SOLVER
    except (OutputError, OSError) as e:
        status.error(f"I/O failure: {e}")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
