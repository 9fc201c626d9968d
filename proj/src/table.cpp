#include "evfact/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "evfact/errors.hpp"

namespace evfact {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBackdoor: return "backdoor";
    case ModelKind::kFrontDoor: return "frontdoor";
    case ModelKind::kInstrumental: return "iv";
  }
  return "?";
}

void ColumnMapping::validate() const {
  std::unordered_set<std::string> seen;
  auto add = [&seen](const std::string& name) {
    if (name.empty())
      throw DimensionMismatchError("column mapping contains an empty name");
    if (!seen.insert(name).second)
      throw DimensionMismatchError("column name '" + name +
                                   "' mapped to more than one role");
  };
  add(outcome);
  add(treatment);
  if (instrument) add(*instrument);
  if (mediator) add(*mediator);
  for (const auto& c : covariates) add(c);
}

namespace {

void require_binary(const Eigen::VectorXd& col, const std::string& name) {
  for (Eigen::Index i = 0; i < col.size(); ++i)
    if (col[i] != 0.0 && col[i] != 1.0)
      throw NonBinaryValueError(name, static_cast<std::size_t>(i) + 1);
}

void require_finite(const Eigen::VectorXd& col, const std::string& name) {
  for (Eigen::Index i = 0; i < col.size(); ++i)
    if (!std::isfinite(col[i]))
      throw MissingValueError(name, static_cast<std::size_t>(i) + 1);
}

}  // namespace

ObservationTable ObservationTable::from_columns(
    ColumnMapping mapping, Eigen::VectorXd outcome, Eigen::VectorXd treatment,
    std::optional<Eigen::VectorXd> instrument,
    std::optional<Eigen::VectorXd> mediator, Eigen::MatrixXd covariates) {
  mapping.validate();
  if (instrument.has_value() != mapping.instrument.has_value() ||
      mediator.has_value() != mapping.mediator.has_value())
    throw DimensionMismatchError("mapped roles and provided columns disagree");

  const Eigen::Index n = outcome.size();
  if (n == 0) throw EmptyFileError();
  if (n < 2) throw DimensionMismatchError("table needs at least 2 rows");
  auto check_len = [n](Eigen::Index got, const std::string& name) {
    if (got != n)
      throw DimensionMismatchError("column '" + name + "' has " +
                                   std::to_string(got) + " rows, expected " +
                                   std::to_string(n));
  };
  check_len(treatment.size(), mapping.treatment);
  if (instrument) check_len(instrument->size(), *mapping.instrument);
  if (mediator) check_len(mediator->size(), *mapping.mediator);
  if (covariates.size() > 0) check_len(covariates.rows(), "covariates");
  if (static_cast<std::size_t>(covariates.cols()) != mapping.covariates.size())
    throw DimensionMismatchError("covariate matrix width does not match names");

  require_finite(outcome, mapping.outcome);
  require_binary(treatment, mapping.treatment);
  if (instrument) require_binary(*instrument, *mapping.instrument);
  if (mediator) require_binary(*mediator, *mapping.mediator);
  for (Eigen::Index j = 0; j < covariates.cols(); ++j)
    require_finite(covariates.col(j),
                   mapping.covariates[static_cast<std::size_t>(j)]);

  ObservationTable table;
  table.mapping_ = std::move(mapping);
  table.outcome_ = std::move(outcome);
  table.treatment_ = std::move(treatment);
  table.instrument_ = std::move(instrument);
  table.mediator_ = std::move(mediator);
  table.covariates_ = std::move(covariates);
  return table;
}

const Eigen::VectorXd& ObservationTable::instrument() const {
  if (!instrument_) throw SpecRequiresInstrumentError();
  return *instrument_;
}

const Eigen::VectorXd& ObservationTable::mediator() const {
  if (!mediator_) throw SpecRequiresMediatorError();
  return *mediator_;
}

Eigen::MatrixXd ObservationTable::covariate_subset(
    const std::vector<std::string>& names) const {
  Eigen::MatrixXd out(n_rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto it = std::find(mapping_.covariates.begin(),
                              mapping_.covariates.end(), names[j]);
    if (it == mapping_.covariates.end()) throw UnknownCovariateError(names[j]);
    out.col(static_cast<Eigen::Index>(j)) =
        covariates_.col(it - mapping_.covariates.begin());
  }
  return out;
}

bool ObservationTable::operator==(const ObservationTable& other) const {
  auto same_opt = [](const std::optional<Eigen::VectorXd>& a,
                     const std::optional<Eigen::VectorXd>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
  };
  return mapping_.outcome == other.mapping_.outcome &&
         mapping_.treatment == other.mapping_.treatment &&
         mapping_.instrument == other.mapping_.instrument &&
         mapping_.mediator == other.mapping_.mediator &&
         mapping_.covariates == other.mapping_.covariates &&
         outcome_ == other.outcome_ && treatment_ == other.treatment_ &&
         same_opt(instrument_, other.instrument_) &&
         same_opt(mediator_, other.mediator_) &&
         covariates_ == other.covariates_;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace and stray carriage returns.
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string()
                         : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_cell(const std::string& cell, const std::string& column,
                  std::size_t row) {
  if (cell.empty()) throw MissingValueError(column, row);
  // from_chars instead of stod: stod raises out_of_range on subnormals,
  // which would reject values write_csv legitimately produced.
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;  // from_chars takes only a minus sign
  double v = 0.0;
  const auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || end != last || !std::isfinite(v))
    throw MissingValueError(column, row);
  return v;
}

}  // namespace

ObservationTable load_csv(const std::string& path,
                          const ColumnMapping& mapping) {
  mapping.validate();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) throw EmptyFileError();
  const std::vector<std::string> header = split_line(line);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < header.size(); ++j) index.emplace(header[j], j);
  auto column_index = [&index](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) throw MissingColumnError(name);
    return it->second;
  };

  const std::size_t iy = column_index(mapping.outcome);
  const std::size_t ia = column_index(mapping.treatment);
  std::optional<std::size_t> iz, im;
  if (mapping.instrument) iz = column_index(*mapping.instrument);
  if (mapping.mediator) im = column_index(*mapping.mediator);
  std::vector<std::size_t> ic;
  for (const auto& c : mapping.covariates) ic.push_back(column_index(c));

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_line(line));
    if (rows.back().size() != header.size())
      throw IoError("row " + std::to_string(rows.size()) + " has " +
                    std::to_string(rows.back().size()) +
                    " fields, header has " + std::to_string(header.size()));
  }
  if (rows.empty()) throw EmptyFileError();

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(n), a(n);
  std::optional<Eigen::VectorXd> z, m;
  if (iz) z = Eigen::VectorXd(n);
  if (im) m = Eigen::VectorXd(n);
  Eigen::MatrixXd c(n, static_cast<Eigen::Index>(ic.size()));

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const std::size_t rownum = static_cast<std::size_t>(i) + 1;
    y[i] = parse_cell(row[iy], mapping.outcome, rownum);
    a[i] = parse_cell(row[ia], mapping.treatment, rownum);
    if (iz) (*z)[i] = parse_cell(row[*iz], *mapping.instrument, rownum);
    if (im) (*m)[i] = parse_cell(row[*im], *mapping.mediator, rownum);
    for (std::size_t j = 0; j < ic.size(); ++j)
      c(i, static_cast<Eigen::Index>(j)) =
          parse_cell(row[ic[j]], mapping.covariates[j], rownum);
  }

  return ObservationTable::from_columns(mapping, std::move(y), std::move(a),
                                        std::move(z), std::move(m),
                                        std::move(c));
}

void write_csv(const ObservationTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  const auto& map = table.mapping();
  out << map.outcome << ',' << map.treatment;
  if (map.instrument) out << ',' << *map.instrument;
  if (map.mediator) out << ',' << *map.mediator;
  for (const auto& c : map.covariates) out << ',' << c;
  out << '\n';

  char buf[32];
  auto put = [&out, &buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < table.n_rows(); ++i) {
    put(table.outcome()[i]);
    out << ',';
    put(table.treatment()[i]);
    if (map.instrument) {
      out << ',';
      put(table.instrument()[i]);
    }
    if (map.mediator) {
      out << ',';
      put(table.mediator()[i]);
    }
    for (Eigen::Index j = 0; j < table.covariates().cols(); ++j) {
      out << ',';
      put(table.covariates()(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string ModelSpec::label() const {
  if (kind == ModelKind::kInstrumental) return "iv";
  std::string s = to_string(kind) + "[";
  for (std::size_t j = 0; j < adjustment.size(); ++j) {
    if (j) s += ',';
    s += adjustment[j];
  }
  return s + "]";
}

void validate_spec(const ObservationTable& table, const ModelSpec& spec) {
  for (const auto& name : spec.adjustment) {
    const auto& known = table.covariate_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw UnknownCovariateError(name);
  }
  if (spec.kind == ModelKind::kFrontDoor && !table.has_mediator())
    throw SpecRequiresMediatorError();
  if (spec.kind == ModelKind::kInstrumental && !table.has_instrument())
    throw SpecRequiresInstrumentError();
  spec.basis.validate();
}

}  // namespace evfact
