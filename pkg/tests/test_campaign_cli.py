import json
import os

import numpy as np
import pytest

from holderlab.campaign import (
    CampaignConfig,
    constant_one_claim,
    replay,
    run_campaign,
    violates_constant_one,
)
from holderlab.cli import main
from holderlab.errors import ParameterError
from holderlab.verify import VerificationRecord


def small_config(**overrides):
    base = dict(
        verifier="bks",
        thetas=(0.5,),
        ps=(1.0,),
        norms=("schatten:2",),
        dims=(6,),
        trials=40,
        seed=99,
    )
    base.update(overrides)
    return CampaignConfig(**base)


def test_campaign_deterministic_tables():
    cfg = small_config()
    rep1, _ = run_campaign(cfg)
    rep2, _ = run_campaign(cfg)
    assert rep1.to_csv() == rep2.to_csv()
    assert rep1.to_json() == rep2.to_json()


def test_campaign_max_monotone_in_trials():
    r_small, _ = run_campaign(small_config(trials=20))
    r_big, _ = run_campaign(small_config(trials=80))
    assert r_big.cells[0].max_ratio >= r_small.cells[0].max_ratio


def test_campaign_trials_one_matches_single_verify():
    cfg = small_config(trials=1)
    rep, _ = run_campaign(cfg)
    rec = replay(cfg, 0, 0)
    assert rep.cells[0].max_ratio == rec.ratio


def test_replay_reproduces_argmax():
    cfg = small_config(trials=30)
    rep, _ = run_campaign(cfg)
    cell = rep.cells[0]
    trial = int(cell.argmax_digest.split(":")[2])
    rec = replay(cfg, 0, trial)
    assert abs(rec.ratio - cell.max_ratio) <= 1e-15 * max(1.0, cell.max_ratio)


def test_campaign_bks_grid_constant_one():
    cfg = small_config(
        thetas=(0.25, 0.75),
        norms=("schatten:1", "kyfan:3"),
        trials=100,
    )
    rep, cx = run_campaign(cfg)
    assert not cx
    assert all(c.max_ratio <= 1.0 + 1e-10 for c in rep.cells)
    assert len(rep.cells) == 4


def test_campaign_refinement_never_decreases():
    cfg = small_config(verifier="main", function="power:0.5", norms=("-",), trials=15,
                       refine_steps=10)
    rep, _ = run_campaign(cfg)
    cell = rep.cells[0]
    assert cell.refined_max >= cell.max_ratio
    assert list(cell.trajectory) == sorted(cell.trajectory)


def test_dimension_trend_statistic():
    cfg = small_config(
        verifier="main", function="power:0.5", norms=("-",), dims=(2, 4, 8), trials=40
    )
    rep, _ = run_campaign(cfg)
    trends = rep.dimension_trend()
    assert len(trends) == 1
    slope = next(iter(trends.values()))
    assert np.isfinite(slope)
    assert "dimension_trend" in rep.to_dict()


def test_degenerate_records_excluded_from_stats():
    # identical fixed spectra make X = Y impossible, but a commuting fixed
    # pair with equal spectra gives rhs > 0; instead exercise the exclusion
    # directly through a verifier whose inputs force 0/0
    cfg = small_config(
        verifier="absmap",
        norms=("schatten:1",),
        ps=(2.0,),
        trials=5,
        ensemble={"name": "fixed_pair", "eigenvalues": [0.0, 0.0]},
    )
    rep, cx = run_campaign(cfg)
    cell = rep.cells[0]
    assert cell.max_ratio == 0.0 and cell.argmax_digest == "none"
    assert not cx


def test_config_round_trip():
    cfg = small_config(ensemble={"name": "positive_pair", "spectrum_range": [0.0, 2.0]})
    again = CampaignConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg


def test_config_rejects_unknown_and_missing_keys():
    with pytest.raises(ParameterError) as err:
        CampaignConfig.from_dict({"verifier": "bks", "bogus": 1})
    assert "bogus" in str(err.value)
    with pytest.raises(ParameterError) as err2:
        CampaignConfig.from_dict({"verifier": "bks"})
    assert "thetas" in str(err2.value)


def test_constant_one_claim_logic():
    cfg = small_config()
    assert constant_one_claim(cfg, "schatten:2", 1.0)
    cfg_abs = small_config(verifier="absmap")
    assert constant_one_claim(cfg_abs, "schatten:1", 2.0)
    assert not constant_one_claim(cfg_abs, "schatten:1", 1.0)
    cfg_main = small_config(verifier="main", function="power:0.5")
    assert not constant_one_claim(cfg_main, "-", 1.0)

    good = VerificationRecord("bks", 1.0, 1.0, 1.0)
    bad = VerificationRecord("bks", 2.0, 1.0, 2.0)
    assert not violates_constant_one(good, "bks")
    assert violates_constant_one(bad, "bks")
    assert violates_constant_one(VerificationRecord("alt", 1e-6, 1.0, 1e-6), "alt")


# --- command line ---------------------------------------------------------------


def test_cli_verify_bks(capsys):
    code = main(
        ["verify", "--ineq", "bks", "--theta", "0.5", "--norm", "schatten:1",
         "--dim", "6", "--trials", "25", "--seed", "5"]
    )
    out = capsys.readouterr().out.strip()
    rec = json.loads(out)
    assert code == 0
    assert rec["name"] == "bks" and rec["ratio"] <= 1.0 + 1e-10
    # the emitted line round-trips into the record type
    assert VerificationRecord(**rec).ratio == rec["ratio"]


def test_cli_verify_alt_identity_inputs(capsys):
    code = main(
        ["verify", "--ineq", "alt", "--dim", "2", "--spectrum", "1,1", "--seed", "3"]
    )
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["holds_with_constant"] == pytest.approx(0.0, abs=1e-12)


def test_cli_verify_requires_function(capsys):
    code = main(["verify", "--ineq", "main"])
    assert code == 2


def test_cli_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--no-such-flag"])
    assert exc.value.code == 2


def test_cli_bad_norm_spec(capsys):
    code = main(["verify", "--ineq", "bks", "--norm", "banana:1", "--trials", "2"])
    assert code == 2
    assert "banana" in capsys.readouterr().err


def test_cli_campaign_end_to_end(tmp_path, capsys):
    cfg = {
        "verifier": "bks",
        "thetas": [0.5],
        "ps": [1.0],
        "norms": ["schatten:2", "kyfan:2"],
        "dims": [5],
        "trials": 30,
        "seed": 12,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["campaign", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["campaign", str(cfg_path), "--out", str(out2)]) == 0
    csv1 = (out1 / "report.csv").read_bytes()
    csv2 = (out2 / "report.csv").read_bytes()
    assert csv1 == csv2
    rows = csv1.decode().strip().split("\n")
    assert rows[0] == "theta,p,norm,dim,trials,max_ratio,q50,q99,argmax_digest"
    assert len(rows) == 3
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 12
    assert str(out1 / "report.csv") in manifest["outputs"]
    payload = json.loads((out1 / "report.json").read_text())
    again = CampaignConfig.from_dict(payload["config"])
    rep, _ = run_campaign(again)
    assert rep.to_csv().encode() == csv1  # manifest replay reproduces the table
    assert not (out1 / "counterexamples.json").exists()


def test_cli_campaign_malformed_config(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"verifier": "bks", "wrong_key": True}))
    assert main(["campaign", str(cfg_path)]) == 2
    err = capsys.readouterr().err
    assert "wrong_key" in err


def test_symmetric_and_quasicommutator_campaigns_finite():
    cfg = CampaignConfig(
        verifier="symmetric",
        function="log1p",
        thetas=(0.5,),
        ps=(0.5, 1.0),
        norms=("kyfan:3",),
        dims=(5,),
        trials=25,
        seed=31,
    )
    rep, _ = run_campaign(cfg)
    assert all(np.isfinite(c.max_ratio) and c.max_ratio > 0 for c in rep.cells)

    cfg2 = CampaignConfig(
        verifier="quasicommutator",
        function="power:0.5",
        thetas=(0.5,),
        ps=(1.0,),
        norms=("kyfan:4",),
        dims=(3, 5, 7),
        trials=25,
        seed=32,
    )
    rep2, _ = run_campaign(cfg2)
    maxima = [c.max_ratio for c in rep2.cells]
    assert all(np.isfinite(m) and m > 0 for m in maxima)
    assert max(maxima) / min(maxima) <= 3.0  # stable in dimension


def test_campaign_counterexample_persistence(monkeypatch, tmp_path, capsys):
    # force the claim predicate so the persistence and exit-3 machinery runs
    # on honestly computed records
    import holderlab.campaign as camp

    monkeypatch.setattr(camp, "violates_constant_one", lambda rec, v: True)
    from holderlab.cli import main as cli_main

    cfg = {
        "verifier": "bks",
        "thetas": [0.5],
        "ps": [1.0],
        "norms": ["schatten:1"],
        "dims": [4],
        "trials": 3,
        "seed": 77,
    }
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps(cfg))
    code = cli_main(["campaign", str(cfg_path), "--out", str(tmp_path / "out")])
    assert code == 3
    payload = json.loads((tmp_path / "out" / "counterexamples.json").read_text())
    assert len(payload) == 3
    entry = payload[0]
    assert entry["record"]["name"] == "bks"
    mats = entry["inputs"]
    assert len(mats) == 2 and "re" in mats[0]["matrix"] and "im" in mats[0]["matrix"]
    # the persisted inputs replay to the recorded ratio
    x = np.array(mats[0]["matrix"]["re"]) + 1j * np.array(mats[0]["matrix"]["im"])
    y = np.array(mats[1]["matrix"]["re"]) + 1j * np.array(mats[1]["matrix"]["im"])
    from holderlab import verify_bks
    from holderlab.norms import parse_norm_spec

    rec = verify_bks(0.5, parse_norm_spec("schatten:1"), x, y)
    assert rec.ratio == pytest.approx(entry["record"]["ratio"], rel=1e-12)


def test_cli_mpnorm_alpha(capsys):
    code = main(["mpnorm", "--symbol", "alpha", "--p", "1", "--trials", "50", "--seed", "4"])
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["upper"] == pytest.approx(4.0)
    assert rec["lower"] <= rec["upper"]
    assert rec["method"] == "decomposition"


def test_cli_mpnorm_beta(capsys):
    code = main(["mpnorm", "--symbol", "beta", "--p", "1", "--trials", "50", "--seed", "4"])
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["upper"] == pytest.approx(2.0)


def test_cli_mpnorm_b0_fourier_route(capsys):
    code = main(
        ["mpnorm", "--symbol", "b0", "--theta", "0.5", "--p", "1", "--trials", "30",
         "--grid", "64", "--seed", "4"]
    )
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["method"] == "fourier-dyadic"
    assert rec["lower"] <= rec["upper"]


def test_cli_mpnorm_fourier_needs_large_b(capsys):
    code = main(
        ["mpnorm", "--symbol", "b0", "--method", "fourier", "--p", "1", "--b", "1",
         "--trials", "5"]
    )
    assert code == 2


def test_cli_mpnorm_dyadic(capsys):
    code = main(
        ["mpnorm", "--symbol", "dyadic:1", "--f", "power:0.5", "--theta", "0.5",
         "--p", "1", "--trials", "30", "--grid", "64", "--seed", "4"]
    )
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["lower"] <= rec["upper"]


def test_cli_seminorm(capsys):
    code = main(["seminorm", "--f", "power:0.5", "--theta", "0.5", "--d", "2", "--p", "1"])
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["d_of_p"] == 4
    assert np.abs(np.array(rec["per_order"]) - [1.0, 0.5, 0.25]).max() <= 1e-12


def test_cli_seminorm_log_entry_is_finite(capsys):
    code = main(["seminorm", "--f", "log1p", "--theta", "0.5", "--d", "4"])
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    per_order = np.array(rec["per_order"])
    assert per_order.shape == (5,)
    assert np.all(np.isfinite(per_order)) and np.all(per_order > 0)


def test_cli_seminorm_order_too_high(capsys):
    assert main(["seminorm", "--f", "power:0.5", "--theta", "0.5", "--d", "9"]) == 2


def test_cli_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("HOLDERLAB_SEED", "777")
    code = main(["verify", "--ineq", "bks", "--trials", "2"])
    rec = json.loads(capsys.readouterr().out.strip())
    assert code == 0
    assert rec["inputs_digest"].startswith("777:")
