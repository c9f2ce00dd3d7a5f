#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace critprog {

/// Factor name -> value for a single year.
using FactorValues = std::map<std::string, double, std::less<>>;

/// Years x (incidence + factor columns). Rows are kept in strictly increasing
/// year order; the constructor sorts and validates, so every instance
/// satisfies: unique years, >= 3 rows, >= 1 factor, finite cells,
/// non-negative incidence.
class TemporalMatrix {
public:
    TemporalMatrix(std::vector<int> years, std::vector<double> incidence,
                   std::vector<std::string> factor_names,
                   std::vector<std::vector<double>> factor_columns);

    std::size_t n_years() const noexcept { return years_.size(); }
    std::size_t n_factors() const noexcept { return names_.size(); }

    std::span<const int> years() const noexcept { return years_; }
    std::span<const double> incidence() const noexcept { return incidence_; }
    const std::vector<std::string>& factor_names() const noexcept { return names_; }

    std::optional<std::size_t> find_factor(std::string_view name) const;
    /// Throws UnknownFactor.
    std::size_t factor_index(std::string_view name) const;

    std::span<const double> column(std::size_t factor) const { return columns_.at(factor); }
    std::span<const double> column(std::string_view name) const {
        return columns_[factor_index(name)];
    }
    double value(std::size_t row, std::size_t factor) const { return columns_[factor][row]; }

    FactorValues row_values(std::size_t row) const;

    /// Rows [begin, end). The result must still hold >= 3 rows.
    TemporalMatrix slice(std::size_t begin, std::size_t end) const;

    friend bool operator==(const TemporalMatrix&, const TemporalMatrix&) = default;

private:
    std::vector<int> years_;
    std::vector<double> incidence_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

enum class ThresholdSource { expert, selected };

struct CriticalThreshold {
    double value = 0.0;
    ThresholdSource source = ThresholdSource::expert;

    /// Throws InvalidConfig for non-finite values.
    static CriticalThreshold expert(double value);
    static CriticalThreshold selected(double value);

    friend bool operator==(const CriticalThreshold&, const CriticalThreshold&) = default;
};

/// Per-year is_critical flags. Flag t is set iff incidence[t] >= threshold.
class CriticalLabels {
public:
    CriticalLabels(std::vector<bool> flags, CriticalThreshold threshold);

    std::size_t size() const noexcept { return flags_.size(); }
    bool operator[](std::size_t row) const { return flags_[row]; }
    std::size_t n_critical() const noexcept { return n_critical_; }
    std::size_t n_noncritical() const noexcept { return flags_.size() - n_critical_; }
    const CriticalThreshold& threshold() const noexcept { return threshold_; }
    const std::vector<bool>& flags() const noexcept { return flags_; }

    CriticalLabels slice(std::size_t begin, std::size_t end) const;

    friend bool operator==(const CriticalLabels& a, const CriticalLabels& b) {
        return a.flags_ == b.flags_ && a.threshold_.value == b.threshold_.value;
    }

private:
    std::vector<bool> flags_;
    CriticalThreshold threshold_;
    std::size_t n_critical_ = 0;
};

/// Ordered, duplicate-free, non-empty list of factor names.
class FactorSelection {
public:
    /// Throws EmptySelection or DuplicateFactor.
    explicit FactorSelection(std::vector<std::string> names);

    static FactorSelection all(const TemporalMatrix& m);

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    /// Column indices in selection order. Throws UnknownFactor.
    std::vector<std::size_t> resolve(const TemporalMatrix& m) const;

    friend bool operator==(const FactorSelection&, const FactorSelection&) = default;

private:
    std::vector<std::string> names_;
};

struct FactorLag {
    std::string factor;
    int lag = 0;
};

/// CSV `year,incidence,<factor>...`; rows normalized to increasing year.
TemporalMatrix parse_matrix(std::string_view text);
TemporalMatrix read_matrix(const std::string& path);

/// Rows to classify against a saved profile: header `year[,incidence],<factor>...`,
/// at least one row. Incidence is optional because the years being forecast
/// may not have happened yet.
struct FactorRows {
    std::vector<std::string> factor_names;
    std::vector<int> years;
    std::optional<std::vector<double>> incidence;
    std::vector<FactorValues> values;
};

FactorRows parse_factor_rows(std::string_view text);

/// Shortest round-trip decimal for every cell, so parse_matrix(serialize_matrix(m)) == m.
std::string serialize_matrix(const TemporalMatrix& m);

CriticalLabels label_critical(const TemporalMatrix& m, const CriticalThreshold& c);

/// Pairs the incidence of row t with `factor` taken from row t - lag. The first
/// `lag` rows are dropped. Lags count rows, which equal years for
/// consecutive annual data.
TemporalMatrix apply_lag(const TemporalMatrix& m, std::string_view factor, int lag);

/// Several lags at once; drops max(lag) leading rows.
TemporalMatrix apply_lags(const TemporalMatrix& m, std::span<const FactorLag> lags);

TemporalMatrix select_factors(const TemporalMatrix& m, const FactorSelection& s);

/// Shortest round-trip formatting used by every text emitter in the project.
std::string format_real(double v);

}  // namespace critprog
