#include "critprog/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "critprog/error.hpp"

namespace critprog {

std::string_view to_string(EvalMode mode) {
    switch (mode) {
        case EvalMode::rolling: return "rolling";
        case EvalMode::leave_one_out: return "leave_one_out";
        case EvalMode::in_sample: return "in_sample";
    }
    return "rolling";
}

EvalMode parse_eval_mode(std::string_view text) {
    if (text == "rolling") return EvalMode::rolling;
    if (text == "leave_one_out") return EvalMode::leave_one_out;
    if (text == "in_sample") return EvalMode::in_sample;
    throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(Prediction p) {
    switch (p) {
        case Prediction::critical: return "critical";
        case Prediction::non_critical: return "non_critical";
        case Prediction::no_forecast: return "no_forecast";
    }
    return "no_forecast";
}

void BacktestConfig::validate() const {
    if (min_train_critical < 2)
        throw Error(ErrorCode::InvalidConfig, "min_train_critical must be >= 2");
    if (min_train_years < 3) throw Error(ErrorCode::InvalidConfig, "min_train_years must be >= 3");
    if (!(widen_eps >= 0.0) || !std::isfinite(widen_eps))
        throw Error(ErrorCode::InvalidConfig, "widen_eps must be finite and >= 0");
}

std::vector<int> BacktestResult::flagged_years() const {
    std::vector<int> out;
    for (const auto& v : verdicts)
        if (v.prediction == Prediction::critical) out.push_back(v.year);
    return out;
}

namespace {

CriticalThreshold threshold_from_values(std::vector<double> values, std::size_t min_critical) {
    if (min_critical < 2) throw Error(ErrorCode::InvalidConfig, "min_critical must be >= 2");
    if (values.size() < min_critical)
        throw Error(ErrorCode::InsufficientYears,
                    std::to_string(values.size()) + " years cannot hold " +
                        std::to_string(min_critical) + " critical years");
    std::nth_element(values.begin(), values.begin() + static_cast<long>(min_critical - 1),
                     values.end(), std::greater<>{});
    return CriticalThreshold::selected(values[min_critical - 1]);
}

Verdict make_verdict(int year, const Forecast& f, bool truth) {
    return {year, f.prediction, f.membership, truth};
}

void tally(BacktestResult& out) {
    for (const auto& v : out.verdicts) {
        if (v.prediction == Prediction::no_forecast) {
            ++out.n_no_forecast;
            continue;
        }
        if (v.prediction != Prediction::critical || !v.truth) continue;
        if (*v.truth)
            ++out.x;
        else
            ++out.y;
    }
    out.p = precision(out.x, out.y);
}

}  // namespace

CriticalThreshold select_threshold(std::span<const double> incidence, std::size_t min_critical) {
    return threshold_from_values({incidence.begin(), incidence.end()}, min_critical);
}

CriticalThreshold select_threshold(const TemporalMatrix& m, std::size_t min_critical) {
    return select_threshold(m.incidence(), min_critical);
}

Forecast forecast_next(const TemporalMatrix& train, const CriticalLabels& train_labels,
                       const FactorSelection& s, const QuorumRule& rule,
                       const FactorValues& next_factors, std::size_t min_train_critical,
                       double widen_eps) {
    if (train_labels.n_critical() < std::max<std::size_t>(min_train_critical, 1)) return {};
    const auto profile = build_profile(train, train_labels, s, widen_eps);
    const auto hits = membership_count(next_factors, profile);
    const bool flagged = hits >= rule.required(profile.n_factors());
    return {flagged ? Prediction::critical : Prediction::non_critical, hits};
}

BacktestResult classify_rows(const IntervalProfile& profile, const QuorumRule& rule,
                             const CriticalThreshold& threshold, const FactorRows& rows) {
    const auto need = rule.required(profile.n_factors());
    BacktestResult out;
    for (std::size_t i = 0; i < rows.years.size(); ++i) {
        const auto hits = membership_count(rows.values[i], profile);
        Verdict v{rows.years[i], hits >= need ? Prediction::critical : Prediction::non_critical,
                  hits, std::nullopt};
        if (rows.incidence) v.truth = (*rows.incidence)[i] >= threshold.value;
        out.verdicts.push_back(v);
    }
    tally(out);
    return out;
}

BacktestResult rolling_backtest(const TemporalMatrix& m, const CriticalLabels& labels,
                                const FactorSelection& s, const BacktestConfig& cfg) {
    cfg.validate();
    if (labels.size() != m.n_years())
        throw Error(ErrorCode::InvalidConfig, "labels do not match matrix rows");
    s.resolve(m);

    const std::size_t n = m.n_years();
    BacktestResult out;

    switch (cfg.mode) {
        case EvalMode::rolling:
            for (std::size_t t = cfg.min_train_years; t < n; ++t) {
                const auto f = forecast_next(m.slice(0, t), labels.slice(0, t), s, cfg.rule,
                                             m.row_values(t), cfg.min_train_critical,
                                             cfg.widen_eps);
                out.verdicts.push_back(make_verdict(m.years()[t], f, labels[t]));
            }
            break;

        case EvalMode::in_sample:
            if (labels.n_critical() < cfg.min_train_critical) {
                for (std::size_t t = 0; t < n; ++t)
                    out.verdicts.push_back({m.years()[t], Prediction::no_forecast, {}, labels[t]});
            } else {
                const auto profile = build_profile(m, labels, s, cfg.widen_eps);
                const auto need = cfg.rule.required(profile.n_factors());
                for (std::size_t t = 0; t < n; ++t) {
                    const auto hits = membership_count(m, t, profile);
                    out.verdicts.push_back(
                        {m.years()[t], hits >= need ? Prediction::critical : Prediction::non_critical,
                         hits, labels[t]});
                }
            }
            break;

        case EvalMode::leave_one_out: {
            std::vector<std::size_t> rows;
            rows.reserve(n);
            for (std::size_t t = 0; t < n; ++t) {
                const std::size_t train_critical = labels.n_critical() - (labels[t] ? 1 : 0);
                if (train_critical < cfg.min_train_critical) {
                    out.verdicts.push_back({m.years()[t], Prediction::no_forecast, {}, labels[t]});
                    continue;
                }
                rows.clear();
                for (std::size_t r = 0; r < n; ++r)
                    if (r != t) rows.push_back(r);
                const auto profile = build_profile(m, labels, s, cfg.widen_eps, rows);
                const auto hits = membership_count(m, t, profile);
                const bool flagged = hits >= cfg.rule.required(profile.n_factors());
                out.verdicts.push_back(
                    {m.years()[t], flagged ? Prediction::critical : Prediction::non_critical, hits,
                     labels[t]});
            }
            break;
        }
    }

    tally(out);
    return out;
}

}  // namespace critprog
