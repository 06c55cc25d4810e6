import math

import numpy as np
import pytest

from app.errors import InvalidGrid, InvalidTolerance, NonPositiveData, ParamOutOfRange, TooFewPoints
from app.experiments import (
    DEFAULT_GRIDS,
    cex1_lower_bound,
    cex2_lower_bound,
    cex2_max_angle,
    default_spec,
    ds_points,
    fit_rate,
    grid_values,
    make_cex1,
    make_cex2,
    make_f1,
    make_f2,
    make_ngon,
    make_rectangle,
    oracle_grad_iu_cex2,
    oracle_lambda_cex1,
    parse_grid,
    pointwise_bound_check_cex1,
    pointwise_bound_check_cex2,
    region_area_ds,
    region_area_ts,
    run_sweep,
    ts_points,
)
from app.geometry import polygon_area, quality_report, validate_polygon
from app.interperror import interpolate, x_squared
from app.models import Family, FamilySpec
from app.settings import get_settings

SIGMA_CAP = 3.0
MAC_CEX2 = math.pi / 2 + math.atan(8)


# ----- families -----
@pytest.mark.parametrize("make, s", [
    (make_cex1, 0.5), (make_cex1, 1.0), (make_cex2, 0.0625), (make_cex2, 0.0),
    (make_f1, 0.0), (make_f1, 1.0), (make_f2, 0.5), (make_rectangle, 0.0),
    (make_cex1, float("nan")),
])
def test_parameter_ranges(make, s):
    with pytest.raises(ParamOutOfRange):
        make(s)


def test_cex1_geometry():
    assert quality_report(make_cex1(0.75)).d_m >= 0.5
    assert quality_report(make_cex1(0.51)).angles[2] > 17 * math.pi / 18


def test_cex2_geometry():
    s = 0.01
    r = quality_report(make_cex2(s))
    assert r.psi_M == pytest.approx(cex2_max_angle(s), abs=1e-12)
    assert r.angles[2] == pytest.approx(cex2_max_angle(s), abs=1e-12)
    assert r.psi_M > MAC_CEX2
    r = quality_report(make_cex2(0.001))
    assert r.d_m <= 0.002 / r.diam
    assert r.d_m == pytest.approx(0.001 / r.diam, rel=1e-12)


def test_cex2_max_angle_endpoint():
    # the largest angle reaches pi/2 + arctan 8 only at s = 1/16
    assert cex2_max_angle(0.0625 - 1e-15) == pytest.approx(MAC_CEX2, abs=1e-9)
    grid = [4.0 ** -k for k in range(3, 9)]
    assert all(b > a for a, b in zip([cex2_max_angle(s) for s in grid], [cex2_max_angle(s) for s in grid[1:]]))


def test_f1_f2_converse_witnesses():
    f1 = [quality_report(make_f1(2.0 ** -k)) for k in range(1, 9)]
    assert all(r.psi_M == pytest.approx(3 * math.pi / 4, abs=1e-12) for r in f1)
    assert all(r.sigma <= SIGMA_CAP for r in f1)
    assert all(b.d_m < a.d_m for a, b in zip(f1, f1[1:]))
    assert f1[-1].d_m < 0.01

    f2 = [quality_report(make_f2(0.5 + 2.0 ** -k)) for k in range(2, 11)]
    assert all(r.sigma <= SIGMA_CAP for r in f2)
    assert all(r.d_m >= 0.5 for r in f2)
    assert all(b.psi_M > a.psi_M for a, b in zip(f2, f2[1:]))
    assert f2[-1].psi_M > math.pi - 0.01
    assert quality_report(make_f2(0.6)).d_m >= 0.5


def test_rectangle_converse_witness():
    for k in range(0, 7):
        s = 2.0 ** -k
        r = quality_report(make_rectangle(s))
        assert r.psi_m == pytest.approx(math.pi / 2)
        assert r.sigma >= 1 / s


def test_regular_ngon():
    p = make_ngon(0.5, 7)
    assert p.n == 7
    assert quality_report(p).diam <= 0.5


# ----- closed forms -----
def test_lambda_cex1_arithmetic():
    assert oracle_lambda_cex1(0.75, (0.25, 0.25)) == pytest.approx(1 / 15)


def test_region_areas():
    for s in (0.51, 0.6, 0.9):
        tri = validate_polygon([(0.25, 0.75), (0.5, 0.5), (0.5, (3 * s - 1) / (2 * s))])
        assert region_area_ts(s) == pytest.approx(polygon_area(tri), rel=1e-13)
    for s in (1e-2, 1e-4):
        a = 1 - s ** 0.25
        quad = validate_polygon([(0.5, 0.0), (1.0, 0.0), (a, s), (0.5, s)])
        assert region_area_ds(s) == pytest.approx(polygon_area(quad), rel=1e-12)


def test_cex1_bound_values():
    s = 0.75
    expected = 0.75 * 0.25 * math.sqrt(1.25 ** 2 / (2 ** 10 * 0.421875 * 0.5))
    assert cex1_lower_bound(s) == pytest.approx(expected, rel=1e-14)
    grid = [0.5 + 2.0 ** -k for k in range(2, 11)]
    values = [cex1_lower_bound(s) for s in grid]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_cex2_bound_values():
    assert cex2_lower_bound(1e-4) == pytest.approx(math.sqrt(0.729 / 0.08), rel=1e-12)
    assert cex2_lower_bound(1e-4) == pytest.approx(3.019, abs=1e-3)
    grid = np.linspace(1e-6, 0.06, 50)
    values = [cex2_lower_bound(s) for s in grid]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_cex1_bound_rate():
    grid = [0.5 + 2.0 ** -k for k in range(2, 11)]
    fit = fit_rate([2 * s - 1 for s in grid], [cex1_lower_bound(s) for s in grid])
    assert fit.slope == pytest.approx(-0.5, abs=0.02)


@pytest.mark.parametrize("s", [1e-2, 1e-3])
def test_cex2_interpolant_gradient(s):
    p = make_cex2(s)
    pts = ds_points(s, 12)
    got = interpolate(p, x_squared()).gradient(pts)[:, 1]
    ref = np.array([oracle_grad_iu_cex2(s, q) for q in pts])
    assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-9


# ----- pointwise bounds -----
@pytest.mark.parametrize("s", [0.51, 0.55, 0.6])
def test_pointwise_cex1(s):
    assert pointwise_bound_check_cex1(s, 100)


@pytest.mark.parametrize("s", [1e-2, 1e-3, 1e-4])
def test_pointwise_cex2(s):
    assert pointwise_bound_check_cex2(s, 100)


def test_grid_points_stay_inside():
    assert len(ts_points(0.6, 10)) == 55
    assert len(ds_points(1e-3, 10)) == 100
    with pytest.raises(InvalidGrid):
        pointwise_bound_check_cex1(0.6, 0)
    with pytest.raises(InvalidGrid):
        pointwise_bound_check_cex2(1e-3, 0)


# ----- grids / config -----
def test_parse_grid():
    assert parse_grid("0.75, 0.6,0.55") == (0.75, 0.6, 0.55)
    for bad in ("", "a,b", " , "):
        with pytest.raises(InvalidGrid):
            parse_grid(bad)


def test_default_grids():
    spec = default_spec(Family.CEX1)
    assert spec.s_values == tuple(0.5 + 2.0 ** -k for k in range(2, 11))
    assert spec.function == "x(1-x)"
    assert default_spec(Family.CEX2).s_values == tuple(4.0 ** -k for k in range(3, 9))
    assert default_spec(Family.BENIGN_SQUARE).s_values == (1.0, 0.5, 0.25, 0.125)


def test_grid_file_overrides(tmp_path):
    cfg = tmp_path / "grids.yaml"
    cfg.write_text("grids:\n  cex1: {k_max: 4}\n", encoding="utf-8")
    assert default_spec(Family.CEX1, cfg).s_values == (0.75, 0.625, 0.5625)
    assert default_spec(Family.CEX2, cfg).s_values == grid_values(DEFAULT_GRIDS["cex2"])
    assert default_spec(Family.CEX1, tmp_path / "missing.yaml").s_values == grid_values(DEFAULT_GRIDS["cex1"])


def test_bad_grid_entry():
    with pytest.raises(InvalidGrid):
        grid_values({"offset": 0, "base": 1, "k_min": 0, "k_max": 3})


# ----- rate fits -----
def test_fit_rate_identity():
    fit = fit_rate([1, 2, 4, 8], [1, 2, 4, 8])
    assert fit.slope == pytest.approx(1.0)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_rate_errors():
    with pytest.raises(TooFewPoints):
        fit_rate([1, 2], [1, 2])
    with pytest.raises(NonPositiveData):
        fit_rate([1, 2, 3], [1, 0, 3])
    with pytest.raises(NonPositiveData):
        fit_rate([1, -2, 3], [1, 2, 3])


def test_fit_rate_r_squared_in_range():
    rng = np.random.default_rng(7)
    fit = fit_rate(rng.uniform(1, 10, 20), rng.uniform(1, 10, 20))
    assert 0.0 <= fit.r_squared <= 1.0


# ----- sweeps -----
def test_sweep_rows_sorted_and_complete():
    spec = FamilySpec(Family.CEX1, (0.75, 0.6), "x(1-x)")
    rows = run_sweep(spec, tol=1e-7, workers=2)
    assert [r.s for r in rows] == [0.6, 0.75]
    for r in rows:
        assert r.error is None
        assert r.h1_semi_error >= r.paper_lower_bound
        assert r.h2_semi == pytest.approx(2 * math.sqrt(r.s), rel=1e-9)
        assert r.ratio > 0


def test_sweep_without_bound():
    rows = run_sweep(FamilySpec(Family.CEX1, (0.75,), "xy"))
    assert rows[0].paper_lower_bound is None


def test_sweep_records_row_failures(monkeypatch):
    monkeypatch.setattr(get_settings(), "cell_cap", 8)
    rows = run_sweep(FamilySpec(Family.CEX1, (0.6,), "x(1-x)"), tol=1e-12)
    assert rows[0].error.startswith("CellCapExceeded")
    assert rows[0].diam == pytest.approx(math.sqrt(2))
    assert rows[0].ratio is None


def test_sweep_rejects_bad_spec():
    with pytest.raises(ParamOutOfRange):
        run_sweep(FamilySpec(Family.CEX2, (0.1,), "x^2"))
    with pytest.raises(InvalidGrid):
        run_sweep(FamilySpec(Family.CEX1, (), "x^2"))
    with pytest.raises(InvalidTolerance):
        run_sweep(FamilySpec(Family.CEX1, (0.75,), "x^2"), tol=0.0)


@pytest.mark.slow
def test_cex1_sweep_diverges():
    rows = run_sweep(default_spec(Family.CEX1))
    assert all(r.error is None for r in rows)
    # rows come sorted by s, so walk them towards s -> 1/2
    rows = rows[::-1]
    for r in rows:
        assert r.h1_semi_error >= r.paper_lower_bound * (1 - 1e-4)
        assert r.d_m >= 0.5
    ratios = [r.ratio for r in rows]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] >= 4 * ratios[0]
    assert all(b.psi_M > a.psi_M for a, b in zip(rows, rows[1:]))
    assert rows[-1].psi_M > math.pi - 0.01


@pytest.mark.slow
def test_cex2_sweep_diverges():
    rows = run_sweep(default_spec(Family.CEX2))
    assert all(r.error is None for r in rows)
    for r in rows:
        assert r.h1_semi_error >= r.paper_lower_bound * (1 - 1e-4)
        assert r.psi_M >= MAC_CEX2
        assert r.h2_semi == pytest.approx(2 * math.sqrt(r.s * (2 - r.s ** 0.25) / 2), rel=1e-9)
    assert all(b.d_m > a.d_m for a, b in zip(rows, rows[1:]))
    fit = fit_rate([r.s for r in rows], [r.h1_semi_error for r in rows])
    assert fit.slope == pytest.approx(-0.25, abs=0.15)
