#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critprog/matrix.hpp"

namespace critprog {

/// Closed envelope [lo, hi] of one factor over critical training years,
/// optionally widened by widen_eps on both sides.
struct FactorInterval {
    std::string factor;
    double lo = 0.0;
    double hi = 0.0;
    double widen_eps = 0.0;

    bool contains(double v) const noexcept { return lo - widen_eps <= v && v <= hi + widen_eps; }

    friend bool operator==(const FactorInterval&, const FactorInterval&) = default;
};

struct IntervalProfile {
    std::vector<FactorInterval> intervals;
    std::size_t n_critical_train = 0;

    std::size_t n_factors() const noexcept { return intervals.size(); }

    friend bool operator==(const IntervalProfile&, const IntervalProfile&) = default;
};

/// A year is flagged critical when it falls inside at least ceil(q * F) of
/// the F factor intervals. q = 1 is the all-factors rule.
class QuorumRule {
public:
    /// Throws InvalidQuorum unless 0 < q <= 1.
    explicit QuorumRule(double q);

    double q() const noexcept { return q_; }
    std::size_t required(std::size_t n_factors) const;

    friend bool operator==(const QuorumRule&, const QuorumRule&) = default;

private:
    double q_;
};

/// Parses "0.75" or "75%". Throws InvalidQuorum.
QuorumRule parse_quorum(std::string_view text);

struct YearMembership {
    int year = 0;
    std::size_t count = 0;

    friend bool operator==(const YearMembership&, const YearMembership&) = default;
};

struct RecognitionResult {
    std::vector<int> flagged_years;  // increasing
    std::size_t x = 0;               // flagged and critical
    std::size_t y = 0;               // flagged and not critical ("false critical")
    std::optional<double> p;         // x / (x + y), absent when nothing is flagged
    std::vector<YearMembership> membership;

    friend bool operator==(const RecognitionResult&, const RecognitionResult&) = default;
};

std::optional<double> precision(std::size_t x, std::size_t y);

/// Min-max envelopes over every critical year of `m`. Throws NoCriticalYears.
IntervalProfile build_profile(const TemporalMatrix& m, const CriticalLabels& labels,
                              const FactorSelection& s, double widen_eps = 0.0);

/// Same, restricted to the rows listed in `training_rows`.
IntervalProfile build_profile(const TemporalMatrix& m, const CriticalLabels& labels,
                              const FactorSelection& s, double widen_eps,
                              std::span<const std::size_t> training_rows);

/// Throws MissingFactorValue when a profile factor has no value.
std::size_t membership_count(const FactorValues& year_factors, const IntervalProfile& profile);
std::size_t membership_count(const TemporalMatrix& m, std::size_t row,
                             const IntervalProfile& profile);

bool classify_year(const FactorValues& year_factors, const IntervalProfile& profile,
                   const QuorumRule& rule);

/// Classifies every row of `m` against `profile` and tallies x, y, p.
RecognitionResult evaluate_insample(const TemporalMatrix& m, const CriticalLabels& labels,
                                    const IntervalProfile& profile, const QuorumRule& rule);

}  // namespace critprog
