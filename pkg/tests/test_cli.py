import csv
import io
import json
import math

import pytest

from gammaspaces import cli
from gammaspaces.errors import ParameterError


def run(tmp_path, command, config, *extra, capsys=None):
    path = tmp_path / "cfg.json"
    path.write_text(config if isinstance(config, str) else json.dumps(config))
    return cli.main([command, "--config", str(path), *extra])


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_norm_command(tmp_path, capsys):
    cfg = {"function": {"kind": "powerlog", "a": 0.5},
           "space": [{"family": "Lp", "p": 1}, {"family": "GrandLp", "p": 2, "theta": 1}]}
    assert run(tmp_path, "norm", cfg) == 0
    out = rows(capsys.readouterr().out)
    assert float(out[0]["value"]) == pytest.approx(2.0, abs=1e-9)
    assert float(out[1]["value"]) == pytest.approx(1.0, abs=1e-6)


def test_malformed_and_invalid_configs(tmp_path, capsys):
    assert run(tmp_path, "norm", "{not json") == 2
    assert run(tmp_path, "norm", {"function": {"kind": "zero"}, "spaces": []}) == 2  # unknown key
    assert run(tmp_path, "norm", {"function": {"kind": "powerlog", "a": 0.5, "c": 1},
                                  "space": {"family": "Lp", "p": 2}}) == 2
    assert run(tmp_path, "norm", {"function": {"kind": "zero"}}) == 2  # missing space
    assert run(tmp_path, "kfunc", {"command": "norm"}) == 2
    assert cli.main(["norm", "--config", str(tmp_path / "missing.json")]) == 2


def test_kfunc_command(tmp_path, capsys):
    cfg = {"function": {"kind": "powerlog", "a": 0.5}, "couple": {"tag": "weak-classical", "p": 2},
           "t_grid": {"min": 0.05, "max": 0.9, "n": 7}}
    assert run(tmp_path, "kfunc", cfg) == 0
    out = rows(capsys.readouterr().out)
    assert len(out) == 7 and list(out[0]) == ["t", "K_search", "K_closed", "ratio"]
    assert all(float(r["K_closed"]) == pytest.approx(1.0, rel=1e-12) for r in out)


def test_kfunc_zero_and_bad_tag(tmp_path, capsys):
    cfg = {"function": {"kind": "zero"}, "couple": {"tag": "grand-classical", "p": 2}, "t_grid": [0.1, 0.5]}
    assert run(tmp_path, "kfunc", cfg) == 0
    out = rows(capsys.readouterr().out)
    assert all(float(r["K_search"]) == 0.0 and float(r["K_closed"]) == 0.0 for r in out)
    cfg["couple"]["tag"] = "unsupported"
    assert run(tmp_path, "kfunc", cfg) == 2


def test_evaluation_error_exit(tmp_path):
    cfg = {"function": {"kind": "powerlog", "a": 0.8}, "couple": {"tag": "weak-classical", "p": 2},
           "t_grid": [0.5]}
    assert run(tmp_path, "kfunc", cfg) == 3


def test_interp_command(tmp_path, capsys):
    cfg = {"function": {"kind": "indicator", "a": 0.25}, "couple": {"tag": "weak-classical", "p": 2},
           "interp": {"theta": 0.5, "r": 4, "domain": "halfline"}, "k_method": "closed-form"}
    assert run(tmp_path, "interp", cfg, "--format", "json") == 0
    rec = json.loads(capsys.readouterr().out)[0]
    assert rec["value"] == pytest.approx((math.log(2) / 16) ** 0.25, rel=1e-9)


def test_verify_command(tmp_path, capsys):
    out = tmp_path / "report.csv"
    cfg = {"scenarios": [{"scenario": "hardy-littlewood-equality", "params": {"p": 2}}]}
    assert run(tmp_path, "verify", cfg, "--out", str(out)) == 0
    rep = rows(out.read_text())
    assert rep[0]["scenario"] == "hardy-littlewood-equality" and rep[0]["failures"] == ""
    assert run(tmp_path, "verify", {"scenarios": []}) == 0
    assert capsys.readouterr().out.strip().startswith("run,scenario")
    bad = {"scenarios": [{"scenario": "weight-reduce",
                          "params": {"p": 2, "m": 1, "gamma": -1, "beta": 0}}]}
    assert run(tmp_path, "verify", bad) == 2
    failing = {"scenarios": [{"scenario": "dyadic-lemma",
                              "params": {"p": 2, "lam": 1, "q": 1, "beta": 0, "bound": 1.01}}]}
    assert run(tmp_path, "verify", failing) == 1


def test_verify_jobs_give_identical_windows(tmp_path):
    cfg = {"scenarios": [{"scenario": "lambda-collapse"}, {"scenario": "associate-remark"},
                         {"scenario": "weight-reduce"}], "grid": {"cells": 100}}
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(tmp_path, "verify", cfg, "--out", str(a), "--jobs", "1") == 0
    assert run(tmp_path, "verify", cfg, "--out", str(b), "--jobs", "2") == 0
    strip = lambda p: [{k: v for k, v in r.items() if k != "seconds"} for r in rows(p.read_text())]
    assert strip(a) == strip(b)


def test_dump_config_round_trip(tmp_path, capsys):
    cfg = {"function": {"kind": "step", "breaks": [0.5, 1.0], "values": [2, 1]},
           "couple": {"tag": "grand-grand", "p": 2, "alpha": 2, "beta": 1}, "t_grid": [0.1]}
    assert run(tmp_path, "kfunc", cfg, "--dump-config", "--jobs", "3") == 0
    dumped = capsys.readouterr().out
    assert run(tmp_path, "kfunc", dumped, "--dump-config") == 0
    assert capsys.readouterr().out == dumped
    assert cli.RunConfig.from_dict(json.loads(dumped)).jobs == 3


def test_grid_override_precedence():
    env = {cli.ENV_CELLS: "50", cli.ENV_U_MAX: "1e6"}
    g = cli.resolve_grid({}, env)
    assert g.u_max == 1e6
    g = cli.resolve_grid({"u_max": 1e8}, env)
    assert g.u_max == 1e8
    with pytest.raises(ParameterError):
        cli.resolve_grid({}, {cli.ENV_CELLS: "many"})


def test_function_descriptors(tmp_path):
    f = cli.function_from_dict({"kind": "samples", "values": [1, 3, 2, 3]})
    assert f(0.1) == pytest.approx(3.0)
    p = tmp_path / "f.csv"
    p.write_text("# samples\n0.5\n2\n\n1\n")
    g = cli.function_from_dict({"kind": "csv", "path": str(p)})
    assert g(0.1) == pytest.approx(2.0) and g(0.9) == pytest.approx(0.5)
    p.write_text("1\n-2\n")
    with pytest.raises(ParameterError):
        cli.function_from_dict({"kind": "csv", "path": str(p)})
    with pytest.raises(ParameterError):
        cli.function_from_dict({"kind": "mystery"})
    t = cli.function_from_dict({"kind": "tabulated", "u": [1, 2], "values": [1, 2]})
    assert t(1.0) == pytest.approx(1.0)


def test_number_format():
    assert cli._num(1 / 3) == "0.333333333333"
    assert cli._num(math.inf) == "inf" and cli._num(math.nan) == "nan"
