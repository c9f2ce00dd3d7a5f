#include "critprog/recognizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "critprog/error.hpp"

namespace critprog {

QuorumRule::QuorumRule(double q) : q_(q) {
    if (!(q > 0.0 && q <= 1.0))
        throw Error(ErrorCode::InvalidQuorum, "quorum must lie in (0, 1], got " + format_real(q));
}

std::size_t QuorumRule::required(std::size_t n_factors) const {
    // Slack absorbs products such as 0.07 * 100 = 7.000000000000001.
    constexpr double kSlack = 1e-9;
    const double need = std::ceil(q_ * static_cast<double>(n_factors) - kSlack);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(need, 1.0)), 1,
                                   std::max<std::size_t>(n_factors, 1));
}

QuorumRule parse_quorum(std::string_view text) {
    bool percent = false;
    if (!text.empty() && text.back() == '%') {
        percent = true;
        text.remove_suffix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(ErrorCode::InvalidQuorum, "cannot read quorum '" + std::string(text) + "'");
    return QuorumRule(percent ? v / 100.0 : v);
}

std::optional<double> precision(std::size_t x, std::size_t y) {
    if (x + y == 0) return std::nullopt;
    return static_cast<double>(x) / static_cast<double>(x + y);
}

IntervalProfile build_profile(const TemporalMatrix& m, const CriticalLabels& labels,
                              const FactorSelection& s, double widen_eps,
                              std::span<const std::size_t> training_rows) {
    if (!(widen_eps >= 0.0) || !std::isfinite(widen_eps))
        throw Error(ErrorCode::InvalidConfig, "widen_eps must be finite and >= 0");
    if (labels.size() != m.n_years())
        throw Error(ErrorCode::InvalidConfig, "labels do not match matrix rows");
    const auto cols = s.resolve(m);

    IntervalProfile profile;
    profile.intervals.reserve(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k)
        profile.intervals.push_back({s.names()[k], std::numeric_limits<double>::infinity(),
                                     -std::numeric_limits<double>::infinity(), widen_eps});

    for (auto row : training_rows) {
        if (row >= m.n_years()) throw Error(ErrorCode::InvalidConfig, "training row out of range");
        if (!labels[row]) continue;
        ++profile.n_critical_train;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double v = m.value(row, cols[k]);
            auto& iv = profile.intervals[k];
            iv.lo = std::min(iv.lo, v);
            iv.hi = std::max(iv.hi, v);
        }
    }
    if (profile.n_critical_train == 0)
        throw Error(ErrorCode::NoCriticalYears, "no critical years to build intervals from");
    return profile;
}

IntervalProfile build_profile(const TemporalMatrix& m, const CriticalLabels& labels,
                              const FactorSelection& s, double widen_eps) {
    std::vector<std::size_t> rows(m.n_years());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return build_profile(m, labels, s, widen_eps, rows);
}

std::size_t membership_count(const FactorValues& year_factors, const IntervalProfile& profile) {
    std::size_t hits = 0;
    for (const auto& iv : profile.intervals) {
        auto it = year_factors.find(iv.factor);
        if (it == year_factors.end())
            throw Error(ErrorCode::MissingFactorValue, "no value for factor '" + iv.factor + "'");
        if (iv.contains(it->second)) ++hits;
    }
    return hits;
}

std::size_t membership_count(const TemporalMatrix& m, std::size_t row,
                             const IntervalProfile& profile) {
    std::size_t hits = 0;
    for (const auto& iv : profile.intervals) {
        const auto col = m.find_factor(iv.factor);
        if (!col)
            throw Error(ErrorCode::MissingFactorValue, "no value for factor '" + iv.factor + "'");
        if (iv.contains(m.value(row, *col))) ++hits;
    }
    return hits;
}

bool classify_year(const FactorValues& year_factors, const IntervalProfile& profile,
                   const QuorumRule& rule) {
    return membership_count(year_factors, profile) >= rule.required(profile.n_factors());
}

RecognitionResult evaluate_insample(const TemporalMatrix& m, const CriticalLabels& labels,
                                    const IntervalProfile& profile, const QuorumRule& rule) {
    if (labels.size() != m.n_years())
        throw Error(ErrorCode::InvalidConfig, "labels do not match matrix rows");
    const auto need = rule.required(profile.n_factors());

    RecognitionResult r;
    r.membership.reserve(m.n_years());
    for (std::size_t row = 0; row < m.n_years(); ++row) {
        const auto hits = membership_count(m, row, profile);
        const int year = m.years()[row];
        r.membership.push_back({year, hits});
        if (hits < need) continue;
        r.flagged_years.push_back(year);
        if (labels[row])
            ++r.x;
        else
            ++r.y;
    }
    r.p = precision(r.x, r.y);
    return r;
}

}  // namespace critprog
