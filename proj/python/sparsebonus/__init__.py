"""Stochastic sparse-reward bonus laboratory (DDPG + HER) - Python bindings."""

from ._core import (  # noqa: F401
    BonusConfig,
    ConfigError,
    ContractViolation,
    MetricsRow,
    Rng,
    ShapedReward,
    Stage,
    TrainingDiverged,
    apply_bonus,
    compute_reward,
    evaluate_checkpoint,
    expected_episode_return,
    expected_step_reward,
    expected_training_reward,
    paper_grid,
    run_grid,
    summarize,
    train,
    verify_statistics,
)

__all__ = [name for name in dir() if not name.startswith("_")]
