#include "nathedge/error.hpp"

namespace nathedge {

ErrorCategory category_of(Errc code) noexcept {
    switch (code) {
        case Errc::MalformedRow:
        case Errc::MissingCell:
        case Errc::EmptySelection:
        case Errc::TooFewYears:
        case Errc::DataError:
            return ErrorCategory::Data;
        case Errc::ConfigError:
        case Errc::ParseError:
        case Errc::CoverageError:
        case Errc::AgeOutOfRange:
        case Errc::HorizonExceeded:
        case Errc::EmptyScene:
            return ErrorCategory::Config;
        default:
            return ErrorCategory::Numerical;
    }
}

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::MalformedRow: return "MalformedRow";
        case Errc::MissingCell: return "MissingCell";
        case Errc::EmptySelection: return "EmptySelection";
        case Errc::DegenerateMatrix: return "DegenerateMatrix";
        case Errc::AgeOutOfRange: return "AgeOutOfRange";
        case Errc::HorizonExceeded: return "HorizonExceeded";
        case Errc::TooFewYears: return "TooFewYears";
        case Errc::CoverageError: return "CoverageError";
        case Errc::ZeroVarianceInstrument: return "ZeroVarianceInstrument";
        case Errc::ZeroDurationInstrument: return "ZeroDurationInstrument";
        case Errc::NegativeRate: return "NegativeRate";
        case Errc::ZeroDeltaInstrument: return "ZeroDeltaInstrument";
        case Errc::EmptySample: return "EmptySample";
        case Errc::DegenerateCovariance: return "DegenerateCovariance";
        case Errc::EmptyScene: return "EmptyScene";
        case Errc::ConfigError: return "ConfigError";
        case Errc::ParseError: return "ParseError";
        case Errc::DataError: return "DataError";
    }
    return "Unknown";
}

int exit_code_for(ErrorCategory cat) noexcept {
    switch (cat) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::Data: return 3;
        case ErrorCategory::Numerical: return 4;
    }
    return 1;
}

}  // namespace nathedge
