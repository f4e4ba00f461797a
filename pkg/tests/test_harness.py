import csv
import io
import json
import math
import os

import pytest

from gammaspaces import harness
from gammaspaces.errors import ParameterError
from gammaspaces.grids import make_log_grid
from gammaspaces.rearrangement import PowerLog, constant

DYADIC_INTEGRAL_CONST = 0.24127229669150008  # scripts/oracles.py: f = 1, lam = 1, q = 3/2, beta = -1


def test_every_statement_has_a_scenario():
    covered = {sc.statement for sc in harness.REGISTRY.values()}
    assert set(harness.STATEMENTS) == covered
    for sc in harness.REGISTRY.values():
        assert sc.kind in ("equivalence", "one-sided", "equality")
        assert sc.defaults, sc.id


def test_statement_must_be_registered():
    with pytest.raises(ValueError):
        harness.scenario("x", "not a statement", "equivalence", [{}])


def test_families():
    fam = harness.default_family(2.0)
    assert len(fam) == 25
    names = [m.name for m in fam]
    assert len(set(names)) == len(names)
    for m in fam:
        if isinstance(m.f, PowerLog):
            assert not (m.f.a == 0 and m.f.b > 0)
            assert m.f.a < 0.5  # borderline exponent excluded
    border = harness.make_family("borderline", 2.0)
    assert any(isinstance(m.f, PowerLog) and m.f.a == 0.5 for m in border)
    with pytest.raises(ParameterError):
        harness.make_family("nope")


def test_dyadic_points_and_depth(grid):
    u = harness.dyadic_points(3)
    assert u[0] == 1.0 and u[1] == pytest.approx(1 + math.log(2))
    # t_k = 2^{1 - 2^k}
    assert math.exp(1 - u[3]) == pytest.approx(2.0 ** (1 - 8))
    k = harness.default_k_max(grid)
    assert harness.dyadic_points(k)[-1] <= grid.u_max < harness.dyadic_points(k + 1)[-1]


def test_dyadic_integral_against_quadrature(grid):
    res = harness.dyadic_check(1.0, 1.5, -1.0, constant(1.0), grid=grid)
    assert res.integral == pytest.approx(DYADIC_INTEGRAL_CONST, rel=1e-11)
    assert math.isfinite(res.side_ratio) and res.side_ratio > 1
    assert all(0 < r < math.inf for r in res.ratios())
    with pytest.raises(ParameterError):
        harness.dyadic_check(0.0, 1.0, 0.0, constant(1.0), grid=grid)


def test_unknown_and_inadmissible(grid):
    with pytest.raises(ParameterError):
        harness.run_scenario("nope", {}, grid=grid)
    with pytest.raises(ParameterError):
        harness.run_scenario("weight-reduce", {"p": 2.0, "m": 1.0, "gamma": -1.0, "beta": 0.0}, grid=grid)
    with pytest.raises(ParameterError):
        harness.run_scenario("weight-reduce", {"p": 2.0, "m": 1.0, "gamma": 0.0, "beta": -4.0}, grid=grid)
    with pytest.raises(ParameterError):
        harness.run_scenario("interpolation-inequality", {"p": 2.0, "alpha": 0.5}, grid=grid)


def test_report_fields_and_determinism(grid):
    a = harness.run_scenario("lambda-collapse", grid=grid)
    b = harness.run_scenario("lambda-collapse", grid=grid)
    assert a.window() == b.window() and a.argmin == b.argmin and a.argmax == b.argmax
    assert a.ok and a.count == 25 and 0 < a.ratio_min <= a.ratio_max < math.inf
    one = harness.run_scenario("holder-duality", grid=grid)
    assert one.kind == "one-sided" and math.isnan(one.ratio_min) and one.argmin == ""


def test_hard_failure_is_reported(grid):
    rep = harness.run_scenario("dyadic-lemma", {"p": 2.0, "lam": 1.0, "q": 1.0, "beta": 0.0,
                                                "bound": 1.01}, grid=grid)
    assert not rep.ok and "leave" in rep.failures[0]


def test_equality_scenario_passes(grid):
    rep = harness.run_scenario("hardy-littlewood-equality", {"p": 2.0}, grid=grid)
    assert rep.ok and rep.count == 100
    assert abs(rep.ratio_min - 1) < 1e-3 and abs(rep.ratio_max - 1) < 1e-3


def test_export_is_order_independent(grid, tmp_path):
    reps = [harness.run_scenario("lambda-collapse", p, grid=grid)
            for p in harness.REGISTRY["lambda-collapse"].defaults]
    reps.append(harness.run_scenario("weight-reduce", grid=grid))
    strip = lambda text: [row[:-1] for row in csv.reader(io.StringIO(text))]  # drop seconds
    fwd, rev = harness.render_report(reps), harness.render_report(reps[::-1])
    assert strip(fwd) == strip(rev)
    rows = list(csv.DictReader(io.StringIO(fwd)))
    assert [r["scenario"] for r in rows] == ["lambda-collapse", "lambda-collapse", "weight-reduce"]
    for col in ("scenario", "params", "ratio_min", "ratio_max", "witness", "seconds"):
        assert col in rows[0]
    out = tmp_path / "r.json"
    harness.export_report(reps, "json", str(out))
    data = json.loads(out.read_text())
    assert len(data) == 3 and data[0]["scenario"] == "lambda-collapse"
    assert os.listdir(tmp_path) == ["r.json"]
    with pytest.raises(ParameterError):
        harness.render_report(reps, "xml")


def test_empty_report_has_header_only():
    assert harness.render_report([]).strip() == ",".join(harness.REPORT_COLUMNS)


def test_pin_windows_round_trip(grid):
    rep = harness.run_scenario("holder-duality", grid=grid)
    pins = json.loads(json.dumps(harness.pin_windows([rep])))
    (lo, hi), = pins["holder-duality"].values()
    assert lo is None and hi == rep.ratio_max


def test_refinement_changes_little():
    coarse = harness.run_scenario("associate-remark", grid=make_log_grid(cells=200))
    fine = harness.run_scenario("associate-remark", grid=make_log_grid(cells=400))
    assert coarse.ratio_max == pytest.approx(fine.ratio_max, rel=1e-6)
