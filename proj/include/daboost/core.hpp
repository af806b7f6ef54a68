#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace daboost {

namespace detail {

// Neumaier-compensated summation. Distribution normalization promises
// |sum - 1| <= 1e-12 regardless of n, which a plain left fold cannot give.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double sum(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

// Shortest round-trip text for a double ("0.25", "1e-10", "inf").
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace detail

inline constexpr double kDistributionTolerance = 1e-12;

/// Binary class label, stored strictly as -1 or +1.
class Label {
 public:
  constexpr explicit Label(int value) : value_(static_cast<std::int8_t>(value)) {
    if (value != -1 && value != 1) {
      throw std::invalid_argument("Label: value must be -1 or +1");
    }
  }
  static constexpr Label positive() { return Label(1); }
  static constexpr Label negative() { return Label(-1); }
  // sign(0) maps to +1 so every score has a well-defined label.
  static constexpr Label from_sign(double s) { return s >= 0.0 ? positive() : negative(); }

  constexpr int value() const { return value_; }
  constexpr double as_real() const { return static_cast<double>(value_); }
  constexpr Label flipped() const { return Label(-value_); }

  friend constexpr bool operator==(Label, Label) = default;

 private:
  std::int8_t value_;
};

struct Sample {
  std::vector<double> features;
  Label label;
};

/// Immutable table of samples with a fixed feature dimensionality.
class Dataset {
 public:
  explicit Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("Dataset: at least one sample required");
    dim_ = samples_.front().features.size();
    if (dim_ == 0) throw std::invalid_argument("Dataset: at least one feature required");
    for (const Sample& s : samples_) {
      if (s.features.size() != dim_) {
        throw std::invalid_argument("Dataset: inconsistent feature count");
      }
      for (double v : s.features) {
        if (!std::isfinite(v)) throw std::invalid_argument("Dataset: features must be finite");
      }
    }
  }

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return dim_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const double> features(std::size_t i) const { return samples_[i].features; }
  Label label(std::size_t i) const { return samples_[i].label; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

 private:
  std::vector<Sample> samples_;
  std::size_t dim_;
};

/// Probability weights over the samples of a dataset.
class Distribution {
 public:
  explicit Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("Distribution: empty weight vector");
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("Distribution: weights must be finite and non-negative");
      }
    }
    const double total = detail::sum(weights_);
    if (std::abs(total - 1.0) > kDistributionTolerance) {
      throw std::invalid_argument("Distribution: weights must sum to 1");
    }
  }

  static Distribution uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Distribution: empty weight vector");
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  /// Scales a non-negative weight vector so it sums to 1.
  static Distribution normalized(std::vector<double> weights) {
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("Distribution: weights must be finite and non-negative");
      }
    }
    const double total = detail::sum(weights);
    if (!(total > 0.0)) throw std::invalid_argument("Distribution: total weight must be positive");
    for (double& w : weights) w /= total;
    return Distribution(std::move(weights));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// A binary classifier; implementations must be deterministic.
class Hypothesis {
 public:
  virtual ~Hypothesis() = default;
  virtual Label predict(std::span<const double> features) const = 0;
};

using HypothesisPtr = std::shared_ptr<const Hypothesis>;

struct EnsembleTerm {
  double coefficient;
  HypothesisPtr hypothesis;
};

/// Weighted vote f(x) = sum_s coefficient_s * h_s(x).
class Ensemble {
 public:
  Ensemble() = default;

  void add(double coefficient, HypothesisPtr hypothesis) {
    if (!std::isfinite(coefficient)) {
      throw std::invalid_argument("Ensemble: coefficient must be finite");
    }
    if (!hypothesis) throw std::invalid_argument("Ensemble: null hypothesis");
    terms_.push_back({coefficient, std::move(hypothesis)});
  }

  double score(std::span<const double> features) const {
    double s = 0.0;
    for (const EnsembleTerm& term : terms_) {
      s += term.coefficient * term.hypothesis->predict(features).as_real();
    }
    return s;
  }

  Label predict(std::span<const double> features) const {
    return Label::from_sign(score(features));
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const EnsembleTerm& operator[](std::size_t i) const { return terms_[i]; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

 private:
  std::vector<EnsembleTerm> terms_;
};

/// Mass of misclassified examples: sum of d(i) over i with h(x_i) != y_i.
inline double weighted_error(const Hypothesis& h, const Dataset& data, const Distribution& d) {
  if (d.size() != data.size()) {
    throw std::invalid_argument("weighted_error: distribution/dataset size mismatch");
  }
  detail::CompensatedSum err;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (h.predict(data.features(i)) != data.label(i)) err.add(d[i]);
  }
  return err.value();
}

/// Correlation with the labels under d: 1 - 2*weighted_error, in [-1, 1].
inline double edge(const Hypothesis& h, const Dataset& data, const Distribution& d) {
  return 1.0 - 2.0 * weighted_error(h, data, d);
}

/// (1/n) sum_i f[i]*g[i].
inline double empirical_inner_product(std::span<const double> f_vals,
                                      std::span<const double> g_vals) {
  if (f_vals.size() != g_vals.size() || f_vals.empty()) {
    throw std::invalid_argument("empirical_inner_product: vectors must have equal length n >= 1");
  }
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < f_vals.size(); ++i) s.add(f_vals[i] * g_vals[i]);
  return s.value() / static_cast<double>(f_vals.size());
}

/// Mean exponential loss (1/n) sum_i exp(-y_i f(x_i)).
inline double exponential_loss(const Ensemble& ensemble, const Dataset& data) {
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.add(std::exp(-data.label(i).as_real() * ensemble.score(data.features(i))));
  }
  return s.value() / static_cast<double>(data.size());
}

/// Per-round telemetry. z and test_error are absent where undefined
/// (z for dual-averaging rounds, test_error for train-only runs).
struct RoundRecord {
  std::size_t round = 0;
  double epsilon = 0.0;
  double step = 0.0;
  std::optional<double> z;
  double train_error = 0.0;
  std::optional<double> test_error;
  double exp_loss = 0.0;
};

}  // namespace daboost
