"""
Tests for EJ/Ec sweeps, overlays, caching and trend fits
"""
import math

import numpy as np
import pytest

from app.models.errors import AmplitudeOutOfRange, InvalidParameter, SweepRowFailure
from app.models.noise import ChannelKind, Policy
from app.models.sweep import ChannelColumns, SweepRow, SweepSpec
from app.services.cache import SweepCache
from app.services.sweep_service import SweepService, run_sweep
from app.utils.data_utils import row_to_dict, rows_to_text

IC_ONLY = (ChannelKind.CRITICAL_CURRENT,)


def test_ratio_grids():
    log_grid = SweepService.ratios(SweepSpec(ratio_min=10, ratio_max=150, points=81))
    assert len(log_grid) == 81
    assert log_grid[0] == 10 and log_grid[-1] == 150
    assert np.all(np.diff(log_grid) > 0)
    assert np.diff(np.log(log_grid)) == pytest.approx(np.full(80, math.log(15) / 80))

    linear = SweepService.ratios(SweepSpec(ratio_min=20, ratio_max=100, points=5, spacing="linear"))
    assert list(linear) == [20, 40, 60, 80, 100]


def test_spec_validation():
    with pytest.raises(InvalidParameter):
        SweepSpec(ratio_min=0)
    with pytest.raises(InvalidParameter):
        SweepSpec(ratio_min=50, ratio_max=50)
    with pytest.raises(InvalidParameter):
        SweepSpec(points=1)
    with pytest.raises(InvalidParameter):
        SweepSpec(spacing="cubic")


def test_sweep_trends_and_reference_row():
    spec = SweepSpec(ratio_min=20, ratio_max=100, points=5, spacing="linear")
    rows = run_sweep(spec, max_workers=2)

    assert [row.ratio for row in rows] == [20, 40, 60, 80, 100]
    for row in rows:
        assert set(row.channels) == set(ChannelKind)
        assert row.ej_sum == pytest.approx(row.ratio * 0.35)
        assert row.anharmonicity < 0

    charge = [row.channels[ChannelKind.CHARGE].t2_seconds for row in rows]
    flux = [row.channels[ChannelKind.FLUX].t2_seconds for row in rows]
    ic = [row.channels[ChannelKind.CRITICAL_CURRENT].t2_seconds for row in rows]
    assert all(b > a for a, b in zip(charge, charge[1:]))
    assert all(b < a for a, b in zip(flux, flux[1:]))
    assert all(b < a for a, b in zip(ic, ic[1:]))

    # 60 is the row nearest the 20 GHz / 0.35 GHz working ratio
    reference = rows[2]
    for kind in ChannelKind:
        columns = reference.channels[kind]
        assert columns.t2_asymptotic == columns.t2_seconds
        assert columns.percent_error == 0.0
    for row in rows:
        for columns in row.channels.values():
            assert columns.t2_asymptotic is not None
            assert not math.isnan(columns.percent_error)


def test_reference_outside_range_uses_midpoint():
    spec = SweepSpec(ratio_min=100, ratio_max=150, points=3, spacing="linear", channels=IC_ONLY)
    rows = run_sweep(spec, max_workers=1)
    assert rows[1].ratio == 125
    assert rows[1].channels[ChannelKind.CRITICAL_CURRENT].percent_error == 0.0
    assert rows[0].channels[ChannelKind.CRITICAL_CURRENT].percent_error > 0.0


def test_unbounded_channel_has_no_overlay():
    spec = SweepSpec(
        ratio_min=20,
        ratio_max=40,
        points=2,
        channels=(ChannelKind.CHARGE,),
        policies={kind: Policy.FIXED for kind in ChannelKind},
    )
    rows = run_sweep(spec, max_workers=1)
    for row in rows:
        columns = row.channels[ChannelKind.CHARGE]
        assert math.isinf(columns.t2_seconds)
        assert columns.t2_asymptotic is None
        assert columns.percent_error is None


def test_parallel_equals_sequential():
    spec = SweepSpec(ratio_min=15, ratio_max=90, points=4)
    sequential = SweepService(max_workers=1).run_sweep(spec)
    parallel = SweepService(max_workers=4).run_sweep(spec)
    assert rows_to_text(sequential, "csv") == rows_to_text(parallel, "csv")
    assert rows_to_text(sequential, "json") == rows_to_text(parallel, "json")


def test_row_failure_names_the_ratio():
    spec = SweepSpec(
        ratio_min=20,
        ratio_max=40,
        points=3,
        channels=IC_ONLY,
        amplitudes={kind: 1e-3 for kind in ChannelKind},
    )
    with pytest.raises(SweepRowFailure) as excinfo:
        SweepService(max_workers=2).run_sweep(spec)
    assert excinfo.value.ratio == 20
    assert isinstance(excinfo.value.cause, AmplitudeOutOfRange)


def test_cache_returns_identical_rows(tmp_path):
    spec = SweepSpec(ratio_min=20, ratio_max=60, points=3, channels=IC_ONLY)
    cache = SweepCache(str(tmp_path / "cache"))

    fresh = SweepService(max_workers=1, cache=cache).run_sweep(spec)
    assert len(list((tmp_path / "cache").glob("*.json"))) == 1

    cached = cache.get_cached_rows(spec)
    assert [row_to_dict(row) for row in cached] == [row_to_dict(row) for row in fresh]
    assert rows_to_text(cached, "csv") == rows_to_text(fresh, "csv")

    other = SweepSpec(ratio_min=20, ratio_max=60, points=4, channels=IC_ONLY)
    assert cache.get_cached_rows(other) is None
    assert cache.get_cached_rows(spec, max_age_days=0) is None

    cache.clear_cache()
    assert cache.get_cached_rows(spec) is None


def test_fit_summary_on_known_laws():
    ratios = np.geomspace(10, 150, 12)
    rows = [
        SweepRow(
            ratio=float(r),
            ej_sum=float(r) * 0.35,
            e01=1.0,
            anharmonicity=-0.35,
            channels={
                ChannelKind.CHARGE: ChannelColumns(slope=1.0, t2_seconds=1e-3 * math.exp(2 * math.sqrt(r))),
                ChannelKind.FLUX: ChannelColumns(slope=1.0, t2_seconds=1e-6 / math.sqrt(r)),
                ChannelKind.CRITICAL_CURRENT: ChannelColumns(slope=1.0, t2_seconds=3e-4 / math.sqrt(r)),
            },
        )
        for r in ratios
    ]
    summary = SweepService.fit_summary(rows)
    assert summary["charge_exponent"] == pytest.approx(2.0)
    assert summary["charge_r2"] == pytest.approx(1.0)
    assert summary["flux_loglog_slope"] == pytest.approx(-0.5)
    assert summary["ic_loglog_slope"] == pytest.approx(-0.5)


def test_fit_summary_skips_unbounded_values():
    rows = [
        SweepRow(ratio=r, ej_sum=r * 0.35, e01=1.0, anharmonicity=-0.35,
                 channels={ChannelKind.CHARGE: ChannelColumns(slope=0.0, t2_seconds=math.inf)})
        for r in (20.0, 40.0)
    ]
    assert SweepService.fit_summary(rows) == {}
