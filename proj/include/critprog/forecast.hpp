#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "critprog/matrix.hpp"
#include "critprog/recognizer.hpp"

namespace critprog {

enum class EvalMode { rolling, leave_one_out, in_sample };

std::string_view to_string(EvalMode mode);
/// Throws InvalidConfig.
EvalMode parse_eval_mode(std::string_view text);

struct BacktestConfig {
    QuorumRule rule{0.75};
    CriticalThreshold threshold{};
    std::size_t min_train_years = 5;
    std::size_t min_train_critical = 2;
    EvalMode mode = EvalMode::rolling;
    double widen_eps = 0.0;

    /// Throws InvalidConfig (min_train_critical < 2, min_train_years < 3,
    /// negative widen_eps).
    void validate() const;
};

enum class Prediction { critical, non_critical, no_forecast };

std::string_view to_string(Prediction p);

struct Verdict {
    int year = 0;
    Prediction prediction = Prediction::no_forecast;
    std::optional<std::size_t> membership;
    std::optional<bool> truth;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Forecast {
    Prediction prediction = Prediction::no_forecast;
    std::optional<std::size_t> membership;
};

struct BacktestResult {
    std::vector<Verdict> verdicts;
    std::size_t x = 0;
    std::size_t y = 0;
    std::optional<double> p;
    std::size_t n_no_forecast = 0;

    std::vector<int> flagged_years() const;

    friend bool operator==(const BacktestResult&, const BacktestResult&) = default;
};

/// Largest observed incidence value that still labels >= min_critical years
/// as critical. Throws InvalidConfig (min_critical < 2) or InsufficientYears.
CriticalThreshold select_threshold(const TemporalMatrix& m, std::size_t min_critical);
CriticalThreshold select_threshold(std::span<const double> incidence, std::size_t min_critical);

/// Trains on (train, train_labels) and classifies next_factors, or returns
/// no_forecast when the window holds fewer than min_train_critical critical
/// years.
Forecast forecast_next(const TemporalMatrix& train, const CriticalLabels& train_labels,
                       const FactorSelection& s, const QuorumRule& rule,
                       const FactorValues& next_factors, std::size_t min_train_critical = 2,
                       double widen_eps = 0.0);

/// Applies a trained profile to rows that were not part of training. Truth is
/// filled in when the rows carry incidence.
BacktestResult classify_rows(const IntervalProfile& profile, const QuorumRule& rule,
                             const CriticalThreshold& threshold, const FactorRows& rows);

/// rolling: for each origin t in [min_train_years, n), train on rows [0, t)
/// and forecast row t. leave_one_out: each row against every other row.
/// in_sample: each row against all rows.
BacktestResult rolling_backtest(const TemporalMatrix& m, const CriticalLabels& labels,
                                const FactorSelection& s, const BacktestConfig& cfg);

}  // namespace critprog
