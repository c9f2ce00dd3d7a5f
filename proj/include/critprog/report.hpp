#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "critprog/experiment.hpp"
#include "critprog/forecast.hpp"
#include "critprog/recognizer.hpp"

namespace critprog {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// A trained profile plus everything `classify` needs to reuse it.
struct SavedProfile {
    IntervalProfile profile;
    QuorumRule rule{1.0};
    CriticalThreshold threshold{};
    int first_train_year = 0;
    int last_train_year = 0;

    friend bool operator==(const SavedProfile&, const SavedProfile&) = default;
};

std::string profile_to_json(const SavedProfile& saved);
/// Throws InvalidProfile.
SavedProfile profile_from_json(std::string_view text);

struct FitReport {
    SavedProfile model;
    std::size_t n_critical = 0;
    RecognitionResult result;
};

struct ClassifyReport {
    SavedProfile model;
    BacktestResult result;
};

using ReportBody = std::variant<FitReport, ClassifyReport, BacktestResult, SweepReport>;

struct RunMetadata {
    std::string command;
    std::string input_digest;
    /// Configuration echo in emission order.
    std::vector<std::pair<std::string, std::string>> config;
};

struct ReportDocument {
    RunMetadata meta;
    ReportBody body;
};

enum class ReportFormat { text, json, plot_csv };

ReportFormat parse_report_format(std::string_view text);

/// Canonical bytes: fixed key order, shortest round-trip reals, '\n' endings.
std::string emit_report(const ReportDocument& doc, ReportFormat format);

/// 64-bit FNV-1a rendered as "fnv1a64:<16 hex digits>".
std::string digest_bytes(std::string_view bytes);

}  // namespace critprog
