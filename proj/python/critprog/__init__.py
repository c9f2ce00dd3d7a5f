"""Critical-year recognition and forecasting from per-factor value intervals."""

from ._core import (  # noqa: F401
    BacktestResult,
    CriticalLabels,
    CritprogError,
    FactorInterval,
    IntervalProfile,
    RecognitionResult,
    TemporalMatrix,
    Verdict,
    __version__,
    apply_lag,
    build_profile,
    classify_year,
    evaluate_insample,
    generate,
    label_critical,
    oracle_evaluate,
    parse_matrix,
    precision,
    required_hits,
    rolling_backtest,
    select_factors,
    select_threshold,
    serialize_matrix,
    sweep,
)
