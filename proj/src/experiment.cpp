#include "critprog/experiment.hpp"

#include <algorithm>

#include "critprog/error.hpp"

namespace critprog {

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::factor_subset: return "factor_subset";
        case SweepAxis::quorum: return "quorum";
        case SweepAxis::threshold: return "threshold";
        case SweepAxis::lag: return "lag";
        case SweepAxis::row_length: return "row_length";
    }
    return "quorum";
}

SweepAxis parse_sweep_axis(std::string_view text) {
    for (auto axis : {SweepAxis::factor_subset, SweepAxis::quorum, SweepAxis::threshold,
                      SweepAxis::lag, SweepAxis::row_length})
        if (text == to_string(axis)) return axis;
    throw Error(ErrorCode::InvalidConfig, "unknown sweep axis '" + std::string(text) + "'");
}

SweepRow evaluate_point(const TemporalMatrix& m, const CriticalLabels& labels,
                        const FactorSelection& s, const BacktestConfig& cfg,
                        std::string configuration) {
    SweepRow row;
    row.configuration = std::move(configuration);
    if (labels.n_critical() < cfg.min_train_critical) {
        row.status = RowStatus::skipped;
        row.skip_reason = std::to_string(labels.n_critical()) + " critical years, need " +
                          std::to_string(cfg.min_train_critical);
        return row;
    }
    const auto r = rolling_backtest(m, labels, s, cfg);
    row.x = r.x;
    row.y = r.y;
    row.p = r.p;
    row.n_no_forecast = r.n_no_forecast;
    row.flagged_years = r.flagged_years();
    return row;
}

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += '+';
        out += n;
    }
    return out;
}

void require_grid(bool non_empty) {
    if (!non_empty) throw Error(ErrorCode::InvalidConfig, "sweep grid is empty");
}

}  // namespace

std::vector<FactorSelection> enumerate_subsets(const FactorSelection& base) {
    const std::size_t f = base.size();
    if (f > kMaxSubsetFactors)
        throw Error(ErrorCode::TooManyFactors,
                    std::to_string(f) + " factors exceeds the subset enumeration limit of " +
                        std::to_string(kMaxSubsetFactors));
    auto names = base.names();
    std::sort(names.begin(), names.end());

    std::vector<std::vector<std::string>> subsets;
    subsets.reserve((std::size_t{1} << f) - 1);
    for (std::size_t mask = 1; mask < (std::size_t{1} << f); ++mask) {
        std::vector<std::string> pick;
        for (std::size_t i = 0; i < f; ++i)
            if (mask & (std::size_t{1} << i)) pick.push_back(names[i]);
        subsets.push_back(std::move(pick));
    }
    std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });

    std::vector<FactorSelection> out;
    out.reserve(subsets.size());
    for (auto& s : subsets) out.emplace_back(std::move(s));
    return out;
}

SweepReport subset_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                         const SweepBase& base, const SubsetGrid& grid) {
    const auto selections = std::holds_alternative<AllSubsets>(grid)
                                ? enumerate_subsets(base.selection)
                                : std::get<std::vector<FactorSelection>>(grid);
    require_grid(!selections.empty());
    SweepReport report{SweepAxis::factor_subset, {}};
    for (const auto& s : selections)
        report.rows.push_back(evaluate_point(m, labels, s, base.config, join_names(s.names())));
    return report;
}

SweepReport quorum_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                         const SweepBase& base, std::span<const double> grid) {
    require_grid(!grid.empty());
    SweepReport report{SweepAxis::quorum, {}};
    for (double q : grid) {
        auto cfg = base.config;
        cfg.rule = QuorumRule(q);
        report.rows.push_back(evaluate_point(m, labels, base.selection, cfg, "q=" + format_real(q)));
    }
    return report;
}

SweepReport threshold_sensitivity(const TemporalMatrix& m, const SweepBase& base,
                                  std::span<const double> grid) {
    require_grid(!grid.empty());
    SweepReport report{SweepAxis::threshold, {}};
    for (double c : grid) {
        auto cfg = base.config;
        cfg.threshold = CriticalThreshold::expert(c);
        const auto labels = label_critical(m, cfg.threshold);
        report.rows.push_back(evaluate_point(m, labels, base.selection, cfg, "c=" + format_real(c)));
    }
    return report;
}

SweepReport lag_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                      const SweepBase& base, std::span<const int> grid) {
    require_grid(!grid.empty());
    if (labels.size() != m.n_years())
        throw Error(ErrorCode::InvalidConfig, "labels do not match matrix rows");
    SweepReport report{SweepAxis::lag, {}};
    for (int lag : grid) {
        if (lag < 0) throw Error(ErrorCode::InvalidConfig, "lag must be >= 0");
        std::vector<FactorLag> lags;
        for (const auto& name : base.selection.names()) lags.push_back({name, lag});
        const auto shifted = apply_lags(m, lags);
        const auto shifted_labels = labels.slice(static_cast<std::size_t>(lag), labels.size());
        report.rows.push_back(evaluate_point(shifted, shifted_labels, base.selection, base.config,
                                             "lag=" + std::to_string(lag)));
    }
    return report;
}

SweepReport row_length_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                             const SweepBase& base, std::span<const int> grid) {
    require_grid(!grid.empty());
    if (labels.size() != m.n_years())
        throw Error(ErrorCode::InvalidConfig, "labels do not match matrix rows");
    const std::size_t n = m.n_years();
    SweepReport report{SweepAxis::row_length, {}};
    for (int k : grid) {
        if (k < 0 || static_cast<std::size_t>(k) < base.config.min_train_years)
            throw Error(ErrorCode::WindowTooShort,
                        "window of " + std::to_string(k) + " years is shorter than min_train_years " +
                            std::to_string(base.config.min_train_years));
        const auto len = static_cast<std::size_t>(k);
        if (len > n)
            throw Error(ErrorCode::InvalidConfig, "window of " + std::to_string(k) +
                                                      " years exceeds the " + std::to_string(n) +
                                                      "-year series");
        report.rows.push_back(evaluate_point(m.slice(n - len, n), labels.slice(n - len, n),
                                             base.selection, base.config,
                                             "k=" + std::to_string(k)));
    }
    return report;
}

SweepReport run_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                      const SweepSpec& spec) {
    auto wrong_grid = [&] {
        return Error(ErrorCode::InvalidConfig,
                     "grid type does not fit axis " + std::string(to_string(spec.axis)));
    };
    switch (spec.axis) {
        case SweepAxis::factor_subset:
            if (auto* g = std::get_if<SubsetGrid>(&spec.grid)) return subset_sweep(m, labels, spec.base, *g);
            throw wrong_grid();
        case SweepAxis::quorum:
            if (auto* g = std::get_if<std::vector<double>>(&spec.grid))
                return quorum_sweep(m, labels, spec.base, *g);
            throw wrong_grid();
        case SweepAxis::threshold:
            if (auto* g = std::get_if<std::vector<double>>(&spec.grid))
                return threshold_sensitivity(m, spec.base, *g);
            throw wrong_grid();
        case SweepAxis::lag:
            if (auto* g = std::get_if<std::vector<int>>(&spec.grid))
                return lag_sweep(m, labels, spec.base, *g);
            throw wrong_grid();
        case SweepAxis::row_length:
            if (auto* g = std::get_if<std::vector<int>>(&spec.grid))
                return row_length_sweep(m, labels, spec.base, *g);
            throw wrong_grid();
    }
    throw wrong_grid();
}

}  // namespace critprog
