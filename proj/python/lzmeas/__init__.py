"""Landau-Zener dynamics under continuous weak measurement."""

from ._core import (
    CsvError,
    IntegrationAbort,
    __version__,
    freeze_estimate,
    lz_survival_probability,
    oracle_error,
    projective_zeno_simulate,
    render_svg,
    reproduce_figure,
    run_criterion,
    simulate,
    strong_measurement_rate,
    sweep,
    zeno_projective_survival,
)

__all__ = [
    "CsvError",
    "IntegrationAbort",
    "__version__",
    "freeze_estimate",
    "lz_survival_probability",
    "oracle_error",
    "projective_zeno_simulate",
    "render_svg",
    "reproduce_figure",
    "run_criterion",
    "simulate",
    "strong_measurement_rate",
    "sweep",
    "zeno_projective_survival",
]
