#ifndef EVFACT_ERRORS_HPP
#define EVFACT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evfact {

// Common base so callers can catch everything from this library in one arm.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- data loading / validation ----

struct MissingColumnError : Error {
  explicit MissingColumnError(const std::string& column)
      : Error("column not found in header: '" + column + "'") {}
};

struct NonBinaryValueError : Error {
  NonBinaryValueError(const std::string& column, std::size_t row)
      : Error("column '" + column + "' must be 0/1 but row " +
              std::to_string(row) + " is not") {}
};

struct MissingValueError : Error {
  MissingValueError(const std::string& column, std::size_t row)
      : Error("missing or non-numeric value in column '" + column +
              "', row " + std::to_string(row)) {}
};

struct EmptyFileError : Error {
  EmptyFileError() : Error("input has a header but no data rows") {}
};

struct SpecRequiresMediatorError : Error {
  SpecRequiresMediatorError()
      : Error("front-door model requested but no mediator column is mapped") {}
};

struct SpecRequiresInstrumentError : Error {
  SpecRequiresInstrumentError()
      : Error("instrumental model requested but no instrument column is mapped") {}
};

struct UnknownCovariateError : Error {
  explicit UnknownCovariateError(const std::string& name)
      : Error("adjustment set names unknown covariate '" + name + "'") {}
};

// ---- regression fitting ----

struct SingularDesignError : Error {
  using Error::Error;
};

struct NoConvergenceError : Error {
  using Error::Error;
};

struct DegenerateCovariateError : Error {
  explicit DegenerateCovariateError(const std::string& name)
      : Error("covariate '" + name +
              "' is constant; spline knots would be degenerate") {}
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

// ---- estimators ----

struct AllTreatedOrAllControlError : Error {
  AllTreatedOrAllControlError()
      : Error("treatment column is constant; both arms are required") {}
};

struct MediatorConstantError : Error {
  MediatorConstantError()
      : Error("mediator column is constant; front-door ratio is undefined") {}
};

struct InstrumentConstantError : Error {
  InstrumentConstantError()
      : Error("instrument column is constant; both arms are required") {}
};

struct WeakInstrumentDegenerateError : Error {
  WeakInstrumentDegenerateError()
      : Error("first-stage arm means coincide; Wald ratio is undefined") {}
};

struct DegenerateVarianceError : Error {
  using Error::Error;
};

// ---- combination ----

struct LengthMismatchError : Error {
  using Error::Error;
};

struct DuplicateLabelError : Error {
  explicit DuplicateLabelError(const std::string& label)
      : Error("two estimator outputs share the label '" + label + "'") {}
};

struct TooFewModelsError : Error {
  TooFewModelsError()
      : Error("combined test needs at least two estimator outputs") {}
};

// ---- simulation ----

struct UnknownScenarioError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace evfact

#endif
