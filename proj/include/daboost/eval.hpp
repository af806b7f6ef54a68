#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "daboost/core.hpp"

namespace daboost {

/// Fraction of samples where the ensemble vote disagrees with the label.
inline double zero_one_error(const Ensemble& ensemble, const Dataset& data) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (ensemble.predict(data.features(i)) != data.label(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

/// Product of the per-round normalizers Z_t; upper-bounds the training
/// zero-one error of the run that produced the records.
inline double loss_bound(std::span<const RoundRecord> records) {
  double bound = 1.0;
  for (const RoundRecord& r : records) {
    if (r.z) bound *= *r.z;
  }
  return bound;
}

struct CurveRow {
  std::size_t round = 0;
  double epsilon = 0.0;
  double step = 0.0;
  std::optional<double> z;
  double train_error = 0.0;
  std::optional<double> test_error;
  double exp_loss = 0.0;
  std::optional<double> bound;  // running product of z, where z is defined
};

inline std::vector<CurveRow> curve_table(std::span<const RoundRecord> records) {
  if (records.empty()) throw std::invalid_argument("curve_table: no records");
  std::vector<CurveRow> rows;
  rows.reserve(records.size());
  double bound = 1.0;
  for (const RoundRecord& r : records) {
    CurveRow row;
    row.round = r.round;
    row.epsilon = r.epsilon;
    row.step = r.step;
    row.z = r.z;
    row.train_error = r.train_error;
    row.test_error = r.test_error;
    row.exp_loss = r.exp_loss;
    if (r.z) {
      bound *= *r.z;
      row.bound = bound;
    }
    rows.push_back(row);
  }
  return rows;
}

inline constexpr const char* kCurveCsvHeader =
    "round,epsilon,step,z,train_error,test_error,exp_loss,bound";

/// CSV with the documented column list; empty cell where a value is undefined.
inline void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows) {
  const auto cell = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string();
  };
  out << kCurveCsvHeader << '\n';
  for (const CurveRow& row : rows) {
    out << row.round << ',' << detail::format_double(row.epsilon) << ','
        << detail::format_double(row.step) << ',' << cell(row.z) << ','
        << detail::format_double(row.train_error) << ',' << cell(row.test_error) << ','
        << detail::format_double(row.exp_loss) << ',' << cell(row.bound) << '\n';
  }
}

}  // namespace daboost
