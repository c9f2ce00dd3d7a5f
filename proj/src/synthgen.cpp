#include "critprog/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "critprog/error.hpp"

namespace critprog {

namespace {

// Factor domain on a 0.01 grid: ticks [0, kDomainTicks).
constexpr std::int64_t kDomainTicks = 10000;
constexpr double kTicksPerUnit = 100.0;
constexpr std::size_t kMaxColumns = 4096;

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n)); }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

struct TickInterval {
    std::int64_t lo;
    std::int64_t hi;
};

double to_value(std::int64_t tick) { return static_cast<double>(tick) / kTicksPerUnit; }

std::int64_t draw_uniform(Stream& rng, std::int64_t lo, std::int64_t hi) {
    return lo + rng.below(hi - lo + 1);
}

std::int64_t draw_outside(Stream& rng, const TickInterval& iv) {
    const std::int64_t below = iv.lo;
    const std::int64_t above = kDomainTicks - 1 - iv.hi;
    const std::int64_t r = rng.below(below + above);
    return r < below ? r : iv.hi + 1 + (r - below);
}

}  // namespace

void PlantSpec::validate() const {
    auto bad = [](const std::string& what) { return Error(ErrorCode::InvalidSpec, what); };
    if (n_years < 5) throw bad("n_years must be >= 5");
    if (n_factors < 1) throw bad("n_factors must be >= 1");
    if (n_factors + n_decoy_factors > kMaxColumns) throw bad("too many factor columns");
    if (!(critical_fraction >= 0.0 && critical_fraction <= 1.0))
        throw bad("critical_fraction must lie in [0, 1]");
    if (!(noise_prob >= 0.0 && noise_prob <= 1.0)) throw bad("noise_prob must lie in [0, 1]");
    if (lag_shift < 0 || static_cast<std::size_t>(lag_shift) >= n_years)
        throw bad("lag_shift must lie in [0, n_years)");
    if (!(threshold > 0.0) || !std::isfinite(threshold)) throw bad("threshold must be finite and > 0");
    if (!intervals.empty()) {
        if (intervals.size() != n_factors) throw bad("need one planted interval per factor");
        for (const auto& iv : intervals) {
            const auto lo = std::ceil(iv.lo * kTicksPerUnit);
            const auto hi = std::floor(iv.hi * kTicksPerUnit);
            if (!(lo <= hi) || lo < 0 || hi >= static_cast<double>(kDomainTicks))
                throw bad("planted interval must satisfy 0 <= lo <= hi < 100");
            if (lo == 0 && hi == static_cast<double>(kDomainTicks - 1))
                throw bad("planted interval leaves no room outside it");
        }
    }
}

PlantSpec PlantSpec::region(RegionPreset preset, std::uint64_t seed) {
    PlantSpec spec;
    spec.seed = seed;
    switch (preset) {
        case RegionPreset::south: spec.noise_prob = 0.05; break;
        case RegionPreset::middle: spec.noise_prob = 0.15; break;
        case RegionPreset::north: spec.noise_prob = 0.25; break;
    }
    return spec;
}

SyntheticDataset generate(const PlantSpec& spec) {
    spec.validate();
    Stream rng(spec.seed);
    const std::size_t n = spec.n_years;
    const auto lag = static_cast<std::size_t>(spec.lag_shift);

    std::vector<TickInterval> planted;
    planted.reserve(spec.n_factors);
    if (spec.intervals.empty()) {
        for (std::size_t f = 0; f < spec.n_factors; ++f) {
            const std::int64_t lo = 2000 + rng.below(3001);
            const std::int64_t width = 1500 + rng.below(1501);
            planted.push_back({lo, lo + width});
        }
    } else {
        for (const auto& iv : spec.intervals)
            planted.push_back({static_cast<std::int64_t>(std::ceil(iv.lo * kTicksPerUnit)),
                               static_cast<std::int64_t>(std::floor(iv.hi * kTicksPerUnit))});
    }

    // Slots [0, n) are the emitted years; slots [n, n + lag) are unseen years
    // whose factor values show up at the tail because factors lead incidence.
    std::vector<bool> critical(n + lag, false);
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(i + 1)))]);
        const auto k = static_cast<std::size_t>(
            std::lround(spec.critical_fraction * static_cast<double>(n)));
        for (std::size_t i = 0; i < std::min(k, n); ++i) critical[order[i]] = true;
        for (std::size_t i = n; i < n + lag; ++i) critical[i] = rng.chance(spec.critical_fraction);
    }
    std::vector<double> severity(n + lag);
    for (auto& s : severity) s = rng.unit();

    std::vector<int> years(n);
    std::vector<double> incidence(n);
    const std::size_t n_cols = spec.n_factors + spec.n_decoy_factors;
    std::vector<std::vector<double>> cols(n_cols, std::vector<double>(n));

    // The first two critical rows of the informative regime take the planted
    // endpoints (unless noise moves them out), so any window holding both
    // recovers the planted intervals exactly.
    int anchors_left = 2;

    for (std::size_t t = 0; t < n; ++t) {
        years[t] = spec.first_year + static_cast<int>(t);

        const double u = rng.unit();
        if (critical[t]) {
            double v = std::ceil(spec.threshold * 10.0 * (1.0 + severity[t])) / 10.0;
            while (v < spec.threshold) v += 0.1;
            incidence[t] = v;
        } else {
            incidence[t] = std::floor(u * spec.threshold * 9.0) / 10.0;
        }

        const std::size_t slot = t + lag;
        const bool pre_regime = spec.regime_change_year && years[t] < *spec.regime_change_year;
        const bool anchor = !pre_regime && critical[slot] && anchors_left > 0;
        const bool low_first = anchors_left == 2;
        if (anchor) --anchors_left;
        for (std::size_t f = 0; f < spec.n_factors; ++f) {
            const auto& iv = planted[f];
            std::int64_t tick = 0;
            if (pre_regime) {
                tick = rng.below(kDomainTicks);
            } else if (critical[slot]) {
                if (rng.chance(spec.noise_prob)) {
                    tick = draw_outside(rng, iv);
                } else {
                    tick = draw_uniform(rng, iv.lo, iv.hi);
                    if (anchor) tick = (low_first == (f % 2 == 0)) ? iv.lo : iv.hi;
                }
            } else {
                tick = rng.chance(spec.noise_prob) ? draw_uniform(rng, iv.lo, iv.hi)
                                                   : draw_outside(rng, iv);
            }
            cols[f][t] = to_value(tick);
        }
        for (std::size_t d = 0; d < spec.n_decoy_factors; ++d)
            cols[spec.n_factors + d][t] = to_value(rng.below(kDomainTicks));
    }

    std::vector<std::string> names;
    names.reserve(n_cols);
    for (std::size_t f = 0; f < spec.n_factors; ++f) names.push_back("f" + std::to_string(f + 1));
    for (std::size_t d = 0; d < spec.n_decoy_factors; ++d) names.push_back("d" + std::to_string(d + 1));

    GroundTruth truth;
    truth.years = years;
    truth.is_critical.assign(critical.begin(), critical.begin() + static_cast<long>(n));
    truth.lag = spec.lag_shift;
    truth.threshold = spec.threshold;
    for (const auto& iv : planted) truth.intervals.push_back({to_value(iv.lo), to_value(iv.hi)});

    return {TemporalMatrix(std::move(years), std::move(incidence), std::move(names), std::move(cols)),
            std::move(truth)};
}

std::string serialize_truth(const GroundTruth& truth) {
    std::string out = "year,is_critical\n";
    for (std::size_t i = 0; i < truth.years.size(); ++i) {
        out += std::to_string(truth.years[i]);
        out += truth.is_critical[i] ? ",1\n" : ",0\n";
    }
    return out;
}

}  // namespace critprog
