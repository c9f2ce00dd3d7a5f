#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "critprog/forecast.hpp"
#include "critprog/matrix.hpp"

namespace critprog {

enum class SweepAxis { factor_subset, quorum, threshold, lag, row_length };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);

/// Every non-empty subset of the base selection, size first, then
/// lexicographic by factor name.
struct AllSubsets {
    friend bool operator==(const AllSubsets&, const AllSubsets&) = default;
};

using SubsetGrid = std::variant<AllSubsets, std::vector<FactorSelection>>;
using SweepGrid = std::variant<SubsetGrid, std::vector<double>, std::vector<int>>;

/// Every grid point is evaluated with `config` and `selection` except for
/// the one quantity the axis varies.
struct SweepBase {
    BacktestConfig config;
    FactorSelection selection;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::quorum;
    SweepGrid grid;
    SweepBase base;
};

constexpr std::size_t kMaxSubsetFactors = 16;

enum class RowStatus { ok, skipped };

struct SweepRow {
    std::string configuration;
    RowStatus status = RowStatus::ok;
    std::string skip_reason;
    std::size_t x = 0;
    std::size_t y = 0;
    std::optional<double> p;
    std::size_t n_no_forecast = 0;
    std::vector<int> flagged_years;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
    SweepAxis axis = SweepAxis::quorum;
    std::vector<SweepRow> rows;

    friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

/// Evaluation used by every grid point. A point whose labels hold fewer than
/// min_train_critical critical years becomes a skipped row.
SweepRow evaluate_point(const TemporalMatrix& m, const CriticalLabels& labels,
                        const FactorSelection& s, const BacktestConfig& cfg,
                        std::string configuration);

std::vector<FactorSelection> enumerate_subsets(const FactorSelection& base);

SweepReport subset_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                         const SweepBase& base, const SubsetGrid& grid);
SweepReport quorum_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                         const SweepBase& base, std::span<const double> grid);
SweepReport threshold_sensitivity(const TemporalMatrix& m, const SweepBase& base,
                                  std::span<const double> grid);
SweepReport lag_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                      const SweepBase& base, std::span<const int> grid);
SweepReport row_length_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                             const SweepBase& base, std::span<const int> grid);

/// Dispatches on spec.axis. Throws InvalidConfig when the grid alternative
/// does not fit the axis.
SweepReport run_sweep(const TemporalMatrix& m, const CriticalLabels& labels,
                      const SweepSpec& spec);

}  // namespace critprog
