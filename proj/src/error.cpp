#include "critprog/error.hpp"

namespace critprog {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateYear: return "DuplicateYear";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::InvalidCell: return "InvalidCell";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::NoFactors: return "NoFactors";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::UnknownFactor: return "UnknownFactor";
        case ErrorCode::EmptySelection: return "EmptySelection";
        case ErrorCode::DuplicateFactor: return "DuplicateFactor";
        case ErrorCode::NoCriticalYears: return "NoCriticalYears";
        case ErrorCode::MissingFactorValue: return "MissingFactorValue";
        case ErrorCode::InvalidQuorum: return "InvalidQuorum";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InsufficientYears: return "InsufficientYears";
        case ErrorCode::InsufficientCriticalYears: return "InsufficientCriticalYears";
        case ErrorCode::TooManyFactors: return "TooManyFactors";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::optional<CellLocation>& where) {
    std::string out{to_string(code)};
    out += ": ";
    out += message;
    if (where) {
        out += " (row " + std::to_string(where->row);
        if (!where->column.empty()) out += ", column '" + where->column + "'";
        out += ")";
    }
    return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<CellLocation> where)
    : std::runtime_error(compose(code, message, where)), code_(code), where_(std::move(where)) {}

}  // namespace critprog
