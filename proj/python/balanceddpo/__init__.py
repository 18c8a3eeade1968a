"""Majority-vote preference aggregation for a toy diffusion model.

Thin re-export of the compiled core; see the project README for the CLI
and file formats.
"""

from balanceddpo._core import (
    Denoiser,
    IoError,
    NumericalError,
    RewardRegistry,
    RngStream,
    Schedule,
    ValidationError,
    bt_probability,
    checkpoint_info,
    consensus,
    counters,
    reset_counters,
    run_pipeline,
    sample_checkpoint,
    vote,
)

__all__ = [
    "Denoiser",
    "IoError",
    "NumericalError",
    "RewardRegistry",
    "RngStream",
    "Schedule",
    "ValidationError",
    "bt_probability",
    "checkpoint_info",
    "consensus",
    "counters",
    "reset_counters",
    "run_pipeline",
    "sample_checkpoint",
    "vote",
]
