#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "critprog/matrix.hpp"
#include "critprog/recognizer.hpp"

namespace critprog {

// Synthetic stand-in data with planted interval rules.
//
// Randomness comes from std::mt19937_64 (its output sequence is fixed by the
// C++ standard). Uniform draws are mapped by hand rather than through
// <random> distributions, whose algorithms are implementation-defined:
//   integer in [0, n): next() % n
//   real in [0, 1):    (next() >> 11) * 2^-53
// so a given (spec, seed) produces identical bytes on every conforming
// toolchain.
//
// Factor values live on a 0.01 grid in [0, 100). Incidence lives on a 0.1
// grid; critical years sit at or above the planted threshold, the rest
// strictly below 0.9 * threshold.

struct PlantedInterval {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const PlantedInterval&, const PlantedInterval&) = default;
};

enum class RegionPreset { south, middle, north };

struct PlantSpec {
    std::size_t n_years = 30;
    std::size_t n_factors = 8;
    /// Extra columns drawn uniformly over the domain, unrelated to criticality.
    std::size_t n_decoy_factors = 0;
    /// One per informative factor; empty means drawn from the seed.
    std::vector<PlantedInterval> intervals;
    double critical_fraction = 0.3;
    /// Per-cell probability that a critical year's value escapes its interval,
    /// and that a non-critical year's value enters it.
    double noise_prob = 0.0;
    /// Factor values lead incidence by this many rows.
    int lag_shift = 0;
    /// Rows before this calendar year carry factor values unrelated to
    /// criticality.
    std::optional<int> regime_change_year;
    int first_year = 1990;
    double threshold = 100.0;
    std::uint64_t seed = 1;

    /// Throws InvalidSpec.
    void validate() const;

    /// 30 x 8 defaults with region-specific noise (south 0.05, middle 0.15,
    /// north 0.25).
    static PlantSpec region(RegionPreset preset, std::uint64_t seed);
};

struct GroundTruth {
    std::vector<int> years;
    std::vector<bool> is_critical;
    std::vector<PlantedInterval> intervals;
    int lag = 0;
    double threshold = 0.0;
};

struct SyntheticDataset {
    TemporalMatrix matrix;
    GroundTruth truth;
};

SyntheticDataset generate(const PlantSpec& spec);

/// `year,is_critical` sidecar, one row per year, flags as 0/1.
std::string serialize_truth(const GroundTruth& truth);

/// Brute-force re-derivation of evaluate_insample: recomputes envelopes,
/// per-year hit counts, x, y and p with plain loops, sharing no helper code
/// with the recognizer. Throws NoCriticalYears.
RecognitionResult oracle_evaluate(const TemporalMatrix& m, const CriticalLabels& labels,
                                  const FactorSelection& s, const QuorumRule& rule);

}  // namespace critprog
