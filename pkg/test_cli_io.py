"""
Tests for config parsing, row/plot serialization and the command line
"""
import json
import math

import pytest

from app.config.run_config import RunConfig, build_config, overlay_config, parse_config, serialize_config
from app.config.settings import CSV_HEADER
from app.main import EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from app.models.errors import ConfigParseError, ConfigValidationError, EmptySeries, OutputError
from app.models.noise import ChannelKind, ChargeUnit, PlanckConvention, Policy, SlopeMethod
from app.models.sweep import ChannelColumns, SweepRow
from app.utils.data_utils import emit_rows, format_number, row_from_dict, row_to_dict, rows_to_text
from app.utils.plot_utils import emit_plot

GOLDEN_HEADER = (
    "ratio,ej_sum_ghz,e01_ghz,alpha_ghz,t2_charge_s,t2_flux_s,t2_ic_s,"
    "t2_charge_asym_s,t2_flux_asym_s,t2_ic_asym_s,err_charge_pct,err_flux_pct,err_ic_pct"
)


def sample_rows():
    rows = []
    for ratio, charge, ic in ((20.0, 1e-3, 4e-5), (40.0, 2e-1, 3e-5), (60.0, 9.0, 2.5e-5)):
        rows.append(SweepRow(
            ratio=ratio,
            ej_sum=ratio * 0.35,
            e01=math.sqrt(8 * ratio) * 0.35,
            anharmonicity=-0.38,
            channels={
                ChannelKind.CHARGE: ChannelColumns(slope=1e-6, t2_seconds=charge, t2_asymptotic=charge * 1.1,
                                                   percent_error=10.0),
                ChannelKind.CRITICAL_CURRENT: ChannelColumns(slope=3.6, t2_seconds=ic, t2_asymptotic=ic,
                                                             percent_error=0.0),
            },
        ))
    return rows


# =====================
# CONFIG
# =====================

def test_empty_config_resolves_defaults():
    config = parse_config("{}")
    assert (config.ec, config.ej_sum, config.d, config.ncut) == (0.35, 20.0, 0.1, 30)
    assert config.amplitudes() == {
        ChannelKind.CHARGE: 1e-4,
        ChannelKind.FLUX: 1e-5,
        ChannelKind.CRITICAL_CURRENT: 1e-6,
    }
    assert config.policies()[ChannelKind.CHARGE] is Policy.WORST_CASE
    assert config.policies()[ChannelKind.CRITICAL_CURRENT] is Policy.FIXED
    assert config.methods()[ChannelKind.CHARGE] is SlopeMethod.HELLMANN_FEYNMAN
    assert config.channels == list(ChannelKind)
    assert config.charge_unit is ChargeUnit.ELECTRON
    assert config.planck() == {
        ChannelKind.CHARGE: PlanckConvention.H,
        ChannelKind.FLUX: PlanckConvention.HBAR,
        ChannelKind.CRITICAL_CURRENT: PlanckConvention.HBAR,
    }


def test_conventions_reach_channels_and_sweeps():
    config = parse_config('{"charge_unit": "cooper_pair", "planck_charge": "hbar"}')
    channel = config.noise_channel(ChannelKind.CHARGE)
    assert channel.lambda_amplitude == 1e-4
    assert channel.planck is PlanckConvention.HBAR

    spec = config.sweep_spec()
    assert spec.charge_unit is ChargeUnit.COOPER_PAIR
    assert spec.cache_payload() != RunConfig().sweep_spec().cache_payload()
    assert parse_config(serialize_config(config)) == config

    with pytest.raises(ConfigValidationError):
        parse_config('{"planck_flux": "dirac"}')


def test_asymmetry_bound_is_reported():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config('{"d": 1.5}')
    assert excinfo.value.problems == ["d must satisfy 0 <= d < 1"]


def test_ratio():
    config = parse_config('{"ej_sum": 20, "ec": 0.35}')
    assert config.ratio == pytest.approx(57.142857142857)


def test_every_unknown_key_is_listed():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config('{"ej": 20, "amplitude": 1e-4, "ec": 0.35}')
    assert "unknown key 'ej'" in excinfo.value.problems
    assert "unknown key 'amplitude'" in excinfo.value.problems


def test_parse_error_has_position():
    with pytest.raises(ConfigParseError) as excinfo:
        parse_config('{\n  "ec": 0.35,\n}')
    assert excinfo.value.line == 3
    assert excinfo.value.column >= 1

    with pytest.raises(ConfigValidationError):
        parse_config("[1, 2]")


def test_amplitude_range_and_override():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config('{"amplitude_flux": 1e-3}')
    assert any("amplitude_flux" in problem for problem in excinfo.value.problems)

    config = parse_config('{"amplitude_flux": 1e-3, "allow_amplitude_override": true}')
    assert config.amplitude_flux == 1e-3


def test_cross_field_bounds():
    with pytest.raises(ConfigValidationError, match="ratio_max > ratio_min"):
        parse_config('{"ratio_min": 80, "ratio_max": 20}')
    with pytest.raises(ConfigValidationError, match="ncut >= 2"):
        parse_config('{"ncut": 1}')


def test_config_round_trip():
    config = parse_config('{"ej_sum": 12.5, "channels": ["flux", "ic"], "policy_ic": "worst_case", "t1_seconds": 5e-5}')
    assert parse_config(serialize_config(config)) == config
    assert parse_config(serialize_config(RunConfig())) == RunConfig()


def test_overlay_beats_config_values():
    config = build_config({"ec": 0.5, "d": 0.05})
    overlaid = overlay_config(config, {"ec": 0.4})
    assert (overlaid.ec, overlaid.d) == (0.4, 0.05)
    assert overlay_config(config, {}) is config


def test_sweep_spec_keeps_canonical_channel_order():
    spec = parse_config('{"channels": ["ic", "charge"]}').sweep_spec()
    assert spec.channels == (ChannelKind.CHARGE, ChannelKind.CRITICAL_CURRENT)


# =====================
# ROWS
# =====================

def test_header_is_frozen():
    assert ",".join(CSV_HEADER) == GOLDEN_HEADER
    assert rows_to_text([], "csv") == GOLDEN_HEADER + "\n"


def test_zero_rows_write_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    written = emit_rows([], "csv", str(path))
    assert path.read_bytes() == (GOLDEN_HEADER + "\n").encode()
    assert written == len(GOLDEN_HEADER) + 1


def test_absent_channels_leave_empty_fields():
    row = SweepRow(
        ratio=20.0, ej_sum=7.0, e01=1.5, anharmonicity=-0.3,
        channels={ChannelKind.CHARGE: ChannelColumns(slope=0.0, t2_seconds=math.inf)},
    )
    lines = rows_to_text([row], "csv").split("\n")
    assert lines[1] == "20.0,7.0,1.5,-0.3,inf" + "," * 8
    assert "\r" not in rows_to_text([row], "csv")


def test_numbers_use_shortest_round_trip_form():
    assert format_number(0.1) == "0.1"
    assert format_number(1.311e-6) == "1.311e-06"
    assert format_number(math.inf) == "inf"
    assert format_number(None) == ""
    assert float(format_number(2 / 3)) == 2 / 3


def test_json_rows(tmp_path):
    rows = sample_rows()
    rows[0].channels[ChannelKind.CHARGE].t2_seconds = math.inf
    text = rows_to_text(rows, "json")
    data = json.loads(text)
    assert data[0]["channels"]["charge"]["t2_s"] == "inf"
    assert set(data[0]["channels"]) == {"charge", "ic"}
    assert [row_to_dict(row_from_dict(item)) for item in data] == [row_to_dict(row) for row in rows]


def test_emit_rows_reports_bytes(tmp_path):
    path = tmp_path / "out" / "rows.csv"
    written = emit_rows(sample_rows(), "csv", str(path))
    assert written == path.stat().st_size
    assert path.read_text().splitlines()[0] == GOLDEN_HEADER


def test_write_failure_is_output_error(tmp_path):
    with pytest.raises(OutputError):
        emit_rows(sample_rows(), "csv", str(tmp_path))
    with pytest.raises(OutputError):
        rows_to_text(sample_rows(), "xml")


# =====================
# PLOTS
# =====================

def test_plot_has_numeric_and_asymptotic_polylines(tmp_path):
    path = tmp_path / "ic.svg"
    document = emit_plot(sample_rows(), ChannelKind.CRITICAL_CURRENT, str(path))
    assert document.startswith("<svg")
    assert document.count("<polyline") == 2
    assert 'stroke-dasharray="6,4"' in document
    assert "EJ/Ec" in document
    assert "critical-current noise" in document
    assert path.read_text() == document


def test_plot_is_deterministic():
    assert emit_plot(sample_rows(), ChannelKind.CHARGE, None) == emit_plot(sample_rows(), ChannelKind.CHARGE, None)


def test_plot_of_absent_channel_is_empty_series():
    with pytest.raises(EmptySeries):
        emit_plot(sample_rows(), ChannelKind.FLUX)


def test_plot_without_overlay_has_one_polyline():
    rows = sample_rows()
    for row in rows:
        row.channels[ChannelKind.CHARGE].t2_asymptotic = None
    assert emit_plot(rows, ChannelKind.CHARGE).count("<polyline") == 1


# =====================
# COMMAND LINE
# =====================

def test_validate_prints_resolved_config(capsys):
    assert main(["validate"]) == EXIT_OK
    captured = capsys.readouterr()
    resolved = json.loads(captured.out)
    assert resolved["ec"] == 0.35
    assert resolved["amplitude_charge"] == 1e-4
    assert f"EJ/Ec = {20.0 / 0.35!r}" in captured.err


def test_flags_beat_config_file(tmp_path, capsys):
    config_path = tmp_path / "run.json"
    config_path.write_text('{"ec": 0.5, "d": 0.05}')

    assert main(["validate", "--config", str(config_path)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ec"] == 0.5

    assert main(["validate", "--config", str(config_path), "--ec", "0.4"]) == EXIT_OK
    resolved = json.loads(capsys.readouterr().out)
    assert (resolved["ec"], resolved["d"]) == (0.4, 0.05)


def test_exit_codes(tmp_path):
    assert main(["validate", "--d", "1.5"]) == EXIT_CONFIG
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == EXIT_IO

    bad = tmp_path / "bad.json"
    bad.write_text('{"ec": }')
    assert main(["validate", "--config", str(bad)]) == EXIT_CONFIG

    with pytest.raises(SystemExit) as excinfo:
        main(["validate", "--format", "xml"])
    assert excinfo.value.code == 2


def test_spectrum_command(capsys):
    assert main(["spectrum", "--ej-sum", "0", "--ng", "0"]) == EXIT_OK
    lines = dict(line.split(",") for line in capsys.readouterr().out.splitlines())
    assert float(lines["e01_ghz"]) == pytest.approx(1.4, abs=1e-12)

    assert main(["spectrum", "--format", "json", "--dispersion"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["e01_ghz"] == pytest.approx(7.1, rel=0.02)
    assert 0 < report["argmax_ng"] < 0.5


def test_t2_command(capsys):
    assert main(["t2", "--channels", "ic", "--t1", "5e-5"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "channel,slope_ghz,t2_s,ng,phi_ext,policy,method,clamped"
    assert lines[1].startswith("ic,")
    t2_ic = float(lines[1].split(",")[2])
    t_phi = float(lines[2].split(",")[1])
    assert t_phi == pytest.approx(t2_ic)
    assert lines[3].startswith("t2_total_s,")


def test_t2_amplitude_out_of_range_is_config_error():
    assert main(["t2", "--channels", "ic", "--amplitude-ic", "1e-3"]) == EXIT_CONFIG


def test_sweep_command_writes_files(tmp_path):
    out, svg = tmp_path / "rows.csv", tmp_path / "ic.svg"
    args = [
        "sweep", "--channels", "ic", "--ratio-min", "20", "--ratio-max", "60", "--points", "3",
        "--out", str(out), "--svg", str(svg), "--svg-channel", "ic", "--max-workers", "2",
    ]
    assert main(args) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == GOLDEN_HEADER
    assert len(lines) == 4
    assert svg.read_text().count("<polyline") == 2


def test_sweep_plot_of_missing_channel_is_io_failure(tmp_path):
    args = [
        "sweep", "--channels", "ic", "--ratio-min", "20", "--ratio-max", "40", "--points", "2",
        "--out", str(tmp_path / "rows.csv"), "--svg", str(tmp_path / "flux.svg"), "--svg-channel", "flux",
    ]
    assert main(args) == EXIT_IO


def test_convention_flags(capsys):
    assert main(["validate", "--charge-unit", "cooper_pair", "--planck-charge", "hbar"]) == EXIT_OK
    resolved = json.loads(capsys.readouterr().out)
    assert (resolved["charge_unit"], resolved["planck_charge"], resolved["planck_flux"]) == ("cooper_pair", "hbar", "hbar")
