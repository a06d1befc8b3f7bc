"""Variance-optimal static hedging with bonds, forwards and vanilla options."""

from ._core import (
    Config,
    ConfigError,
    RedundantInstrumentError,
    StathedgeError,
    fig_config,
    figure,
    hedge_continuous,
    hedge_discrete,
    load_config,
    parse_config,
    profile,
    set_workers,
    solve_continuous,
    solve_discrete,
    validate,
)

__all__ = [
    "Config",
    "ConfigError",
    "RedundantInstrumentError",
    "StathedgeError",
    "fig_config",
    "figure",
    "hedge_continuous",
    "hedge_discrete",
    "load_config",
    "parse_config",
    "profile",
    "set_workers",
    "solve_continuous",
    "solve_discrete",
    "validate",
]
