import csv
import io
import json
import math

import numpy as np
import pytest

from cavityeff import sweep
from cavityeff.sweep import SweepSpec, compare_models, run_sweep


def small_spec(**kw):
    base = dict(models=("full_polaron", "effective", "analytic"), lambda_ratios=(0.0, 0.7, 1.3),
                Ns=(4,), betas=(2.0,), omega_ratios=(0.5,), n_ph=8)
    base.update(kw)
    return SweepSpec(**base)


def test_decoupled_point_is_free_spin_for_every_model():
    spec = SweepSpec(models=sweep.SWEEP_MODELS, lambda_ratios=(0.0,), Ns=(6,), betas=(2.0,),
                     omega_ratios=(0.5,), n_ph=12)
    free = 6 * math.log(2 * math.cosh(0.5))
    lz0 = -math.log1p(-math.exp(-2.0))
    for r in run_sweep(spec).rows:
        assert r["error"] == ""
        want = free if r["model"] == "analytic" else free + lz0
        assert r["log_z"] == pytest.approx(want, rel=1e-10)
        assert r["sx2_over_n2"] == pytest.approx(0.0 if r["model"] == "analytic" else 1 / 24, abs=1e-12)


def test_grid_order_and_length():
    spec = small_spec(Ns=(3, 4))
    rows = run_sweep(spec).rows
    assert len(rows) == len(spec) == 18
    assert [r["lambda_over_lambda_c"] for r in rows[:3]] == [0.0, 0.7, 1.3]
    assert [r["N"] for r in rows[:6]] == [3, 3, 3, 4, 4, 4]
    assert rows[0]["model"] == "full_polaron" and rows[-1]["model"] == "analytic"


def test_csv_bit_identical_across_runs_and_workers():
    spec = small_spec()
    a = run_sweep(spec).to_csv()
    assert a == run_sweep(spec).to_csv()
    assert a == run_sweep(spec, workers=2).to_csv()
    assert run_sweep(spec).to_jsonl() == run_sweep(spec, workers=2).to_jsonl()


def test_csv_format():
    text = run_sweep(small_spec(models=("analytic",))).to_csv()
    assert text.endswith("\r\n") and "\n" not in text.replace("\r\n", "")
    rows = list(csv.DictReader(io.StringIO(text, newline="")))
    assert list(rows[0]) == list(sweep.FILE_COLUMNS)
    assert "wall_time_ms" not in rows[0]
    # 17 significant digits round-trip exactly
    res = run_sweep(small_spec(models=("analytic",)))
    for r, parsed in zip(res.rows, rows):
        assert float(parsed["f_per_site"]) == r["f_per_site"]
        assert parsed["hl_lower_slack"] == ""


def test_jsonl_rows():
    res = run_sweep(small_spec(models=("analytic",)))
    lines = res.to_jsonl().splitlines()
    assert len(lines) == 3
    assert json.loads(lines[1])["f_per_site"] == res.rows[1]["f_per_site"]


def test_compare_identical_and_missing_baseline():
    res = run_sweep(small_spec())
    cmp = compare_models(res, "full_polaron")
    assert {r["model"] for r in cmp.rows} == {"effective", "analytic"}
    assert len(cmp.max_over_lambda) == 2
    base = [r for r in res.rows if r["model"] == "full_polaron"]
    same = compare_models(base + [dict(r, model="copy") for r in base], "full_polaron")
    assert len(same.rows) == 3 and all(r["rel_diff"] == 0.0 for r in same.rows)
    assert same.max_over_lambda[0]["max_rel_diff"] == 0.0
    with pytest.raises(KeyError):
        compare_models(res, "sw")


def test_compare_nan_for_failed_rows():
    res = run_sweep(small_spec())
    res.rows[3]["error"] = "boom"
    cmp = compare_models(res, "full_polaron")
    assert any(math.isnan(r["rel_diff"]) for r in cmp.rows)
    assert any(math.isnan(r["max_rel_diff"]) for r in cmp.max_over_lambda)


def test_failures_are_isolated():
    spec = SweepSpec(models=("sw", "analytic"), lambda_ratios=(0.5,), Ns=(4,), betas=(2.0,),
                     omega_ratios=(1.0,), n_ph=8)
    res = run_sweep(spec)
    sw, an = res.rows
    assert sw["error"] and sw["f_per_site"] is None
    assert an["error"] == "" and an["f_per_site"] is not None
    assert res.n_failed == 1


def test_wall_time_cap_produces_error_row():
    spec = small_spec(models=("full_polaron",), Ns=(40,), n_ph=30, lambda_ratios=(1.0,),
                      wall_time_s=1e-6)
    row = run_sweep(spec).rows[0]
    assert "time" in row["error"].lower()


def test_hepp_lieb_columns():
    spec = small_spec(models=("full_polaron", "effective"), n_ph=25, hepp_lieb=True)
    rows = run_sweep(spec).rows
    for r in rows:
        if r["model"] == "full_polaron":
            assert r["hl_lower_slack"] >= 0 and r["hl_upper_slack"] >= 0
            assert np.isfinite(r["log_z_tilde"])
        else:
            assert r["hl_lower_slack"] is None


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(models=("bogus",))
    with pytest.raises(ValueError):
        small_spec(Ns=(0,))
    with pytest.raises(ValueError):
        small_spec(lambda_ratios=())
    with pytest.raises(ValueError):
        small_spec(betas=(-1.0,))
    with pytest.raises(ValueError):
        small_spec(wall_time_s=0.0)


def test_atomic_write(tmp_path):
    f = tmp_path / "sub" / "out.csv"
    sweep.atomic_write(f, "a,b\r\n1,2\r\n")
    assert f.read_bytes() == b"a,b\r\n1,2\r\n"
    sweep.atomic_write(f, "x\r\n")
    assert f.read_bytes() == b"x\r\n"
    assert [p.name for p in f.parent.iterdir()] == ["out.csv"]
