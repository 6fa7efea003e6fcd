#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nathedge {

/// Failure codes raised by the library. Each code belongs to one of three
/// categories (configuration, data, numerical) which the CLI maps onto its
/// exit status.
enum class Errc {
    // data ingestion
    MalformedRow,
    MissingCell,
    EmptySelection,
    // models and scenarios
    DegenerateMatrix,
    AgeOutOfRange,
    HorizonExceeded,
    TooFewYears,
    // valuation and calibration
    CoverageError,
    ZeroVarianceInstrument,
    ZeroDurationInstrument,
    NegativeRate,
    ZeroDeltaInstrument,
    // evaluation and geometry
    EmptySample,
    DegenerateCovariance,
    EmptyScene,
    // harness
    ConfigError,
    ParseError,
    DataError,
};

enum class ErrorCategory { Config, Data, Numerical };

ErrorCategory category_of(Errc code) noexcept;
std::string_view to_string(Errc code) noexcept;

/// Process exit status used by the CLI for each category.
int exit_code_for(ErrorCategory cat) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    Errc code_;
};

}  // namespace nathedge
