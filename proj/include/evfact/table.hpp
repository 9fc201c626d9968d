#ifndef EVFACT_TABLE_HPP
#define EVFACT_TABLE_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "evfact/regression.hpp"

namespace evfact {

enum class ModelKind { kBackdoor, kFrontDoor, kInstrumental };

std::string to_string(ModelKind kind);

// Names the roles played by columns of an input file. Instrument and
// mediator are optional; covariates may be empty. All names must be distinct.
struct ColumnMapping {
  std::string outcome = "y";
  std::string treatment = "a";
  std::optional<std::string> instrument;
  std::optional<std::string> mediator;
  std::vector<std::string> covariates;

  void validate() const;
};

// Column-oriented dataset with the binary/finite invariants already checked:
// treatment (and instrument/mediator when present) are exactly 0/1, all
// values are finite, and there is at least one row.
class ObservationTable {
 public:
  static ObservationTable from_columns(
      ColumnMapping mapping, Eigen::VectorXd outcome, Eigen::VectorXd treatment,
      std::optional<Eigen::VectorXd> instrument,
      std::optional<Eigen::VectorXd> mediator, Eigen::MatrixXd covariates);

  Eigen::Index n_rows() const { return outcome_.size(); }
  const Eigen::VectorXd& outcome() const { return outcome_; }
  const Eigen::VectorXd& treatment() const { return treatment_; }
  bool has_instrument() const { return instrument_.has_value(); }
  bool has_mediator() const { return mediator_.has_value(); }
  const Eigen::VectorXd& instrument() const;  // throws if absent
  const Eigen::VectorXd& mediator() const;    // throws if absent
  const Eigen::MatrixXd& covariates() const { return covariates_; }
  const ColumnMapping& mapping() const { return mapping_; }
  const std::vector<std::string>& covariate_names() const {
    return mapping_.covariates;
  }

  // Columns for an adjustment set, in the order requested.
  Eigen::MatrixXd covariate_subset(const std::vector<std::string>& names) const;

  bool operator==(const ObservationTable& other) const;

 private:
  ObservationTable() = default;
  ColumnMapping mapping_;
  Eigen::VectorXd outcome_, treatment_;
  std::optional<Eigen::VectorXd> instrument_, mediator_;
  Eigen::MatrixXd covariates_;
};

// Reads a comma-separated file with a header row. Columns not named by the
// mapping are ignored. Row numbers in errors are 1-based over data rows.
ObservationTable load_csv(const std::string& path, const ColumnMapping& mapping);

// Canonical column order: outcome, treatment, instrument, mediator,
// covariates. Values print with round-trip precision, so load(write(t))
// reproduces t bit for bit.
void write_csv(const ObservationTable& table, const std::string& path);

// One candidate causal model to fit: estimator kind, adjustment-set
// covariate names, and the basis used for its regressions. The instrumental
// estimator adjusts for nothing and ignores `basis`.
struct ModelSpec {
  ModelKind kind = ModelKind::kBackdoor;
  std::vector<std::string> adjustment;
  BasisSpec basis;

  // Stable display label, e.g. "backdoor[c1,c2]", "iv".
  std::string label() const;
};

// Checks a spec against a table: adjustment names must exist, a front-door
// spec needs a mediator column, an instrumental spec needs an instrument.
void validate_spec(const ObservationTable& table, const ModelSpec& spec);

}  // namespace evfact

#endif
