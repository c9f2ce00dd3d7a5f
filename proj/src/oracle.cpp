// Deliberately self-contained: only the shared data types are used, never the
// recognizer's functions, so the two paths can disagree if either is wrong.

#include "critprog/error.hpp"
#include "critprog/synthgen.hpp"

namespace critprog {

RecognitionResult oracle_evaluate(const TemporalMatrix& m, const CriticalLabels& labels,
                                  const FactorSelection& s, const QuorumRule& rule) {
    const auto& all_names = m.factor_names();
    std::vector<std::size_t> cols;
    for (const auto& wanted : s.names()) {
        std::size_t found = all_names.size();
        for (std::size_t i = 0; i < all_names.size(); ++i)
            if (all_names[i] == wanted) found = i;
        if (found == all_names.size())
            throw Error(ErrorCode::UnknownFactor, "no factor named '" + wanted + "'");
        cols.push_back(found);
    }

    const std::size_t n = m.n_years();
    std::size_t n_critical = 0;
    for (std::size_t t = 0; t < n; ++t)
        if (labels[t]) ++n_critical;
    if (n_critical == 0) throw Error(ErrorCode::NoCriticalYears, "no critical years");

    std::vector<double> lo(cols.size()), hi(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        bool first = true;
        for (std::size_t t = 0; t < n; ++t) {
            if (!labels[t]) continue;
            const double v = m.column(cols[k])[t];
            if (first || v < lo[k]) lo[k] = v;
            if (first || v > hi[k]) hi[k] = v;
            first = false;
        }
    }

    // Flag when hits >= q * F; hits is an integer so this equals the ceiling
    // rule. The same 1e-9 slack is applied to the product.
    const double bar = rule.q() * static_cast<double>(cols.size()) - 1e-9;

    RecognitionResult r;
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t hits = 0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double v = m.column(cols[k])[t];
            if (!(v < lo[k]) && !(v > hi[k])) ++hits;
        }
        r.membership.push_back({m.years()[t], hits});
        if (hits > 0 && static_cast<double>(hits) >= bar) {
            r.flagged_years.push_back(m.years()[t]);
            if (labels[t])
                ++r.x;
            else
                ++r.y;
        }
    }
    if (r.x + r.y > 0) r.p = static_cast<double>(r.x) / static_cast<double>(r.x + r.y);
    return r;
}

}  // namespace critprog
