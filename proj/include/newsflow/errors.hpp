#pragma once

#include <stdexcept>
#include <string>

namespace newsflow {

// Error families map onto the CLI exit-code contract:
// ConfigError -> 2 (validation), DataError -> 3, NumericError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ingest
struct ParseError : DataError {
  using DataError::DataError;
};
struct NonPositivePrice : DataError {
  using DataError::DataError;
};
struct DuplicateDate : DataError {
  using DataError::DataError;
};
struct EmptyCalendar : DataError {
  using DataError::DataError;
};
struct AllSeriesDropped : DataError {
  using DataError::DataError;
};

// sentiment
struct NoLexiconHit : DataError {
  using DataError::DataError;
};

// rmt
struct DegenerateSeries : DataError {
  using DataError::DataError;
};
struct ZeroVariance : DataError {
  using DataError::DataError;
};
struct InvalidRatio : ConfigError {
  using ConfigError::ConfigError;
};
struct ConvergenceFailure : NumericError {
  using NumericError::NumericError;
};
struct NotNormalized : DataError {
  using DataError::DataError;
};
struct WindowTooLong : ConfigError {
  using ConfigError::ConfigError;
};

// cwoe
struct ShapeMismatch : DataError {
  using DataError::DataError;
};
struct CalendarMismatch : DataError {
  using DataError::DataError;
};
struct NotPSD : NumericError {
  using NumericError::NumericError;
};
struct DegenerateBaseline : DataError {
  using DataError::DataError;
};

// infoflow
struct InvalidInput : ConfigError {
  using ConfigError::ConfigError;
};
struct SeriesTooShort : DataError {
  using DataError::DataError;
};
struct AllSamplesSkipped : NumericError {
  using NumericError::NumericError;
};

// network
struct DegenerateRange : DataError {
  using DataError::DataError;
};

// fetch
struct NetworkError : DataError {
  using DataError::DataError;
};
struct AuthError : NetworkError {
  using NetworkError::NetworkError;
};
struct RateLimited : NetworkError {
  using NetworkError::NetworkError;
};

}  // namespace newsflow
