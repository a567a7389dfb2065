import json

import pytest

import sparsebonus as sb

TINY = {
    "env": "point_reach",
    "test_seeds": [1001, 1002],
    "schedule": {"epochs": 2, "cycles": 1, "episodes_per_cycle": 2,
                 "optimizer_steps_per_cycle": 1, "test_episodes": 2},
    "agent": {"hidden": [8]},
    "her": {"batch_size": 16},
}


def test_bonus_parse_and_label():
    cfg = sb.BonusConfig.parse("50:+1:B")
    assert cfg.p == pytest.approx(0.5)
    assert cfg.b == 1
    assert cfg.stage == sb.Stage.B
    assert cfg.label() == "50:+1:B"
    assert sb.BonusConfig.parse("REF") == sb.BonusConfig.reference()
    with pytest.raises(sb.ConfigError):
        sb.BonusConfig.parse("50:+1:X")


def test_episode_expectations():
    ref = sb.BonusConfig.reference()
    assert sb.expected_episode_return(ref, 60, 30) == -30.0
    assert sb.expected_episode_return(sb.BonusConfig.parse("50:+1:B"), 60, 30) == 0.0
    assert sb.expected_training_reward(sb.BonusConfig.parse("50:-5:NG"), achieved=False) == pytest.approx(-3.5)


def test_apply_bonus_is_seeded():
    cfg = sb.BonusConfig.parse("30:-5:B")
    a, b = sb.Rng.seed_root(3), sb.Rng.seed_root(3)
    xs = [sb.apply_bonus(-1.0, False, cfg, a).total for _ in range(100)]
    ys = [sb.apply_bonus(-1.0, False, cfg, b).total for _ in range(100)]
    assert xs == ys
    assert set(xs) <= {-1.0, -6.0}


def test_compute_reward_boundary():
    assert sb.compute_reward([0.0, 0.0], [0.03, 0.04], 0.05) == 0.0
    assert sb.compute_reward([0.0, 0.0], [0.03, 0.0401], 0.05) == -1.0


def test_grid_has_75_rows_with_reference_at_43():
    grid = sb.paper_grid()
    assert len(grid) == 75
    ident, cfg = grid[42]
    assert ident == 43
    assert cfg == sb.BonusConfig.reference()


def test_train_is_deterministic_and_checkpoint_evaluates():
    rows, csv, ckpt = sb.train(json.dumps(TINY))
    rows2, csv2, _ = sb.train(json.dumps(TINY))
    assert csv == csv2
    assert [r.epoch for r in rows] == [0, 1]
    assert csv.startswith("epoch,train_sr,train_return,test_sr,test_return,cum_train_sr\n")
    sr, ret = sb.evaluate_checkpoint(ckpt, [1001, 1002], 2)
    assert sr == rows[-1].test_sr
    assert ret == rows[-1].test_return


def test_grid_and_summary(tmp_path):
    report = sb.run_grid(json.dumps(TINY), ["REF", "0:-1:B"], str(tmp_path), 1)
    assert report == {"ran": 2, "skipped": 0, "failed": 0}
    again = sb.run_grid(json.dumps(TINY), ["REF", "0:-1:B"], str(tmp_path), 1)
    assert again["skipped"] == 2
    rows = sb.summarize(str(tmp_path))
    assert [r["id"] for r in rows] == [19, 43]
    assert rows[1]["stage"] == "REF"


def test_verify_statistics_and_negative_control():
    ok, checks = sb.verify_statistics(100_000, 12345)
    assert ok and all(c["passed"] for c in checks)
    bad, _ = sb.verify_statistics(100_000, 12345, oracle_her_ratio=0.5)
    assert not bad


def test_bad_config_raises():
    with pytest.raises(sb.ConfigError):
        sb.train(json.dumps({"env": "fetch"}))
