#pragma once

#include <algorithm>
#include <limits>
#include <utility>

#include "daboost/core.hpp"

namespace daboost {

/// One-level decision tree: polarity if x[feature_index] <= threshold, else -polarity.
class Stump final : public Hypothesis {
 public:
  Stump(std::size_t feature_index, double threshold, int polarity)
      : feature_index_(feature_index), threshold_(threshold), polarity_(polarity) {
    if (std::isnan(threshold)) throw std::invalid_argument("Stump: threshold must not be NaN");
  }

  Label predict(std::span<const double> features) const override {
    if (feature_index_ >= features.size()) {
      throw std::invalid_argument("Stump: feature index out of range");
    }
    return features[feature_index_] <= threshold_ ? polarity_ : polarity_.flipped();
  }

  std::size_t feature_index() const { return feature_index_; }
  double threshold() const { return threshold_; }
  int polarity() const { return polarity_.value(); }

 private:
  std::size_t feature_index_;
  double threshold_;
  Label polarity_;
};

struct StumpFit {
  Stump stump;
  double error;
};

// Threshold candidates for one feature: a sentinel below every value (the
// stump degenerates to a constant classifier) plus the midpoint of each pair
// of consecutive distinct values. A midpoint that rounds up onto the larger
// value would misplace that value's group, so it is skipped.
inline constexpr double kSentinelThreshold = -std::numeric_limits<double>::infinity();

inline double midpoint_threshold(double lo, double hi) {
  return lo + (hi - lo) / 2.0;
}

/// Exact minimizer of weighted_error over all (feature, threshold, polarity)
/// stumps. Ties break on lowest feature, then smallest threshold, then
/// polarity +1. Cost O(dim * n log n) via per-feature sort and prefix sums.
inline StumpFit train_stump(const Dataset& data, const Distribution& dist) {
  if (dist.size() != data.size()) {
    throw std::invalid_argument("train_stump: distribution/dataset size mismatch");
  }
  const std::size_t n = data.size();

  // Label masses: for a stump predicting the constant c on everything,
  // the weighted error is the mass of the opposite label.
  detail::CompensatedSum pos_mass, neg_mass;
  for (std::size_t i = 0; i < n; ++i) {
    (data.label(i) == Label::positive() ? pos_mass : neg_mass).add(dist[i]);
  }
  const double w_pos = pos_mass.value();
  const double w_neg = neg_mass.value();

  struct Candidate {
    double error;
    double threshold;
    int polarity;
  };

  std::optional<StumpFit> best;
  std::vector<std::pair<double, std::size_t>> order(n);

  for (std::size_t j = 0; j < data.dim(); ++j) {
    for (std::size_t i = 0; i < n; ++i) order[i] = {data.features(i)[j], i};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Sentinel first: everything sits right of the threshold.
    Candidate feature_best{w_pos, kSentinelThreshold, 1};
    if (w_neg < feature_best.error) feature_best = {w_neg, kSentinelThreshold, -1};

    // Sweep ascending; g = sum of d(i)*y(i) over the left block.  With the
    // split at theta, error(+1) = w_pos - g and error(-1) = w_neg + g.
    detail::CompensatedSum signed_prefix;
    std::size_t i = 0;
    while (i < n) {
      const double value = order[i].first;
      std::size_t k = i;
      while (k < n && order[k].first == value) {
        const std::size_t idx = order[k].second;
        signed_prefix.add(dist[idx] * data.label(idx).as_real());
        ++k;
      }
      if (k < n) {
        const double theta = midpoint_threshold(value, order[k].first);
        if (theta < order[k].first) {
          const double g = signed_prefix.value();
          const double err_pos = w_pos - g;
          const double err_neg = w_neg + g;
          if (err_pos < feature_best.error) feature_best = {err_pos, theta, 1};
          if (err_neg < feature_best.error) feature_best = {err_neg, theta, -1};
        }
      }
      i = k;
    }

    // Re-measure the per-feature winner by direct summation so cross-feature
    // ties compare identical floating-point values.
    Stump candidate(j, feature_best.threshold, feature_best.polarity);
    const double direct_error = weighted_error(candidate, data, dist);
    if (!best || direct_error < best->error) {
      best = StumpFit{std::move(candidate), direct_error};
    }
  }
  return *best;
}

/// Weak learner adapter for the boosting engines.
inline HypothesisPtr stump_weak_learner(const Dataset& data, const Distribution& dist) {
  return std::make_shared<Stump>(train_stump(data, dist).stump);
}

}  // namespace daboost
