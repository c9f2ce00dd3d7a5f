#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace critprog {

enum class ErrorCode {
    DuplicateYear,
    NonNumericCell,
    MissingCell,
    InvalidCell,
    TooFewRows,
    NoFactors,
    BadHeader,
    LagTooLarge,
    UnknownFactor,
    EmptySelection,
    DuplicateFactor,
    NoCriticalYears,
    MissingFactorValue,
    InvalidQuorum,
    InvalidConfig,
    InsufficientYears,
    InsufficientCriticalYears,
    TooManyFactors,
    WindowTooShort,
    InvalidSpec,
    InvalidProfile,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Location of a data problem inside a CSV document. Rows are 1-based and
/// count the header as row 1, matching what an editor shows.
struct CellLocation {
    std::size_t row = 0;
    std::string column;
};

/// The one exception type the library throws. Callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<CellLocation> where = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    const std::optional<CellLocation>& where() const noexcept { return where_; }

private:
    ErrorCode code_;
    std::optional<CellLocation> where_;
};

}  // namespace critprog
