#pragma once

#include <algorithm>
#include <functional>
#include <utility>

#include "daboost/core.hpp"
#include "daboost/random.hpp"
#include "daboost/stump.hpp"

namespace daboost {

enum class Algorithm { adaboost, gradient_projection, daboost };
enum class WeightingMode { reweight, resample };
enum class StepRule { log_rule, sqrt_rule };

struct BoostConfig {
  std::size_t rounds = 100;
  Algorithm algorithm = Algorithm::adaboost;
  WeightingMode weighting_mode = WeightingMode::reweight;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  StepRule step_rule = StepRule::log_rule;
  double epsilon_clamp = 1e-10;
  bool stop_on_zero_error = true;

  void validate() const {
    if (rounds < 1) throw std::invalid_argument("BoostConfig: rounds must be >= 1");
    if (!(epsilon_clamp > 0.0 && epsilon_clamp < 0.5)) {
      throw std::invalid_argument("BoostConfig: epsilon_clamp must lie in (0, 0.5)");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("BoostConfig: lambda must be positive and finite");
    }
    if (algorithm == Algorithm::gradient_projection &&
        weighting_mode == WeightingMode::resample) {
      throw std::invalid_argument(
          "BoostConfig: gradient projection supports reweight mode only");
    }
  }
};

/// Step size from the clamped weighted error.
/// log_rule: (1/2) ln((1-e)/e); sqrt_rule: (1/2) sqrt((1-e)/e).
inline double step_size(double epsilon, StepRule rule, double epsilon_clamp = 1e-10) {
  const double e = std::clamp(epsilon, epsilon_clamp, 1.0 - epsilon_clamp);
  const double ratio = (1.0 - e) / e;
  return rule == StepRule::log_rule ? 0.5 * std::log(ratio) : 0.5 * std::sqrt(ratio);
}

/// One multiplicative reweighting step:
/// D'(i) = D(i) exp(-eta y_i h(x_i)) / Z with the empirical normalizer Z.
/// Steps large enough to overflow the plain sum (the sqrt rule at tiny
/// epsilon) fall back to a max-shifted update; Z is then reported as the
/// overflowed/underflowed double it truly is.
inline std::pair<Distribution, double> adaboost_update(const Distribution& d, double eta,
                                                       const Hypothesis& h,
                                                       const Dataset& data) {
  if (d.size() != data.size()) {
    throw std::invalid_argument("adaboost_update: distribution/dataset size mismatch");
  }
  if (!std::isfinite(eta)) throw std::invalid_argument("adaboost_update: eta must be finite");
  const std::size_t n = data.size();
  std::vector<double> exponent(n);
  for (std::size_t i = 0; i < n; ++i) {
    exponent[i] = -eta * data.label(i).as_real() * h.predict(data.features(i)).as_real();
  }
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) next[i] = d[i] * std::exp(exponent[i]);
  const double z = detail::sum(next);
  if (z > 0.0 && std::isfinite(z)) {
    for (double& w : next) w /= z;
    return {Distribution(std::move(next)), z};
  }
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0.0) shift = std::max(shift, std::log(d[i]) + exponent[i]);
  }
  if (shift == -std::numeric_limits<double>::infinity()) {
    throw std::runtime_error("adaboost_update: no probability mass to reweight");
  }
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = d[i] > 0.0 ? std::exp(std::log(d[i]) + exponent[i] - shift) : 0.0;
  }
  return {Distribution::normalized(std::move(next)), z};
}

namespace detail {

inline double log_sum_exp(double a, double b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (a == -inf) return b;
  if (b == -inf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace detail

/// Dual-averaging state: per example, log of S_t(i) = sum_k lambda_k exp(-m_k(i))
/// where m_k(i) = y_i f_k(x_i) is the margin under the round-k ensemble.
/// Kept in log space so margins of any magnitude stay finite.
class DualState {
 public:
  explicit DualState(std::size_t n)
      : log_accum_(n, -std::numeric_limits<double>::infinity()) {
    if (n == 0) throw std::invalid_argument("DualState: empty state");
  }

  void accumulate(double lambda, std::span<const double> margins) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("DualState: lambda must be positive and finite");
    }
    if (margins.size() != log_accum_.size()) {
      throw std::invalid_argument("DualState: margin vector size mismatch");
    }
    for (double m : margins) {
      if (!std::isfinite(m)) throw std::invalid_argument("DualState: margins must be finite");
    }
    const double log_lambda = std::log(lambda);
    for (std::size_t i = 0; i < margins.size(); ++i) {
      log_accum_[i] = detail::log_sum_exp(log_accum_[i], log_lambda - margins[i]);
    }
    ++rounds_;
  }

  /// D(i) proportional to S_t(i), exp-normalized with a max shift.
  Distribution distribution() const {
    if (rounds_ == 0) throw std::logic_error("DualState: no accumulated rounds");
    const double shift = *std::max_element(log_accum_.begin(), log_accum_.end());
    std::vector<double> w(log_accum_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_accum_[i] - shift);
    return Distribution::normalized(std::move(w));
  }

  std::size_t rounds() const { return rounds_; }
  std::span<const double> log_accum() const { return log_accum_; }

 private:
  std::vector<double> log_accum_;
  std::size_t rounds_ = 0;
};

/// n independent draws with replacement, sample i chosen with probability d(i).
inline Dataset resample(const Dataset& data, const Distribution& d, Rng& rng) {
  if (d.size() != data.size()) {
    throw std::invalid_argument("resample: distribution/dataset size mismatch");
  }
  const std::size_t n = data.size();
  std::vector<double> cdf(n);
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += d[i];
    cdf[i] = running;
  }
  std::vector<Sample> drawn;
  drawn.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = uniform_unit(rng);
    std::size_t idx =
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx == n) {
      // u fell past a cdf that rounded below 1; take the last positive-weight entry.
      idx = n - 1;
      while (idx > 0 && d[idx] == 0.0) --idx;
    }
    drawn.push_back(data[idx]);
  }
  return Dataset(std::move(drawn));
}

enum class RunStatus { running, completed, zero_error_stop, weak_learner_exhausted };

using WeakLearner = std::function<HypothesisPtr(const Dataset&, const Distribution&)>;

struct BoostResult {
  Ensemble ensemble;
  std::vector<RoundRecord> records;
  RunStatus status = RunStatus::completed;
};

/// One boosting run driven round by round. Holds references to the datasets;
/// they must outlive the run. State is confined to this object, so a run can
/// be advanced from any one thread at a time.
class BoostRun {
 public:
  BoostRun(BoostConfig config, const Dataset& train, const Dataset* test = nullptr,
           WeakLearner weak_learner = stump_weak_learner)
      : config_(config),
        train_(train),
        test_(test),
        learner_(std::move(weak_learner)),
        dist_(Distribution::uniform(train.size())),
        dual_(train.size()),
        rng_(make_rng(config.seed)),
        train_scores_(train.size(), 0.0),
        test_scores_(test ? test->size() : 0, 0.0) {
    config_.validate();
    if (!learner_) throw std::invalid_argument("BoostRun: null weak learner");
    if (test_ && test_->dim() != train_.dim()) {
      throw std::invalid_argument("BoostRun: train/test dimensionality mismatch");
    }
  }

  /// Runs one round. Returns true if a round was recorded; false once the
  /// run is over (round budget, zero-error stop, or weak-learner exhaustion).
  bool step() {
    if (status_ != RunStatus::running) return false;
    switch (config_.algorithm) {
      case Algorithm::adaboost:
        return adaboost_round();
      case Algorithm::gradient_projection:
        return gradient_projection_round();
      case Algorithm::daboost:
        return daboost_round();
    }
    return false;
  }

  RunStatus status() const { return status_; }
  bool finished() const { return status_ != RunStatus::running; }
  const Ensemble& ensemble() const { return ensemble_; }
  const std::vector<RoundRecord>& records() const { return records_; }
  /// Distribution the next round would train on (D_{t+1} after t rounds).
  const Distribution& distribution() const { return dist_; }

 private:
  bool adaboost_round() {
    const HypothesisPtr h = train_per_mode();
    const double eps = weighted_error(*h, train_, dist_);
    if (eps >= 0.5) {
      status_ = RunStatus::weak_learner_exhausted;
      return false;
    }
    const double eta = step_size(eps, config_.step_rule, config_.epsilon_clamp);
    append_term(eta, h);
    double z;
    if (eps == 0.0 && config_.stop_on_zero_error) {
      z = 0.0;  // 2*sqrt(eps*(1-eps)) at eps = 0; no further distribution needed
      status_ = RunStatus::zero_error_stop;
    } else {
      auto [next, normalizer] = adaboost_update(dist_, eta, *h, train_);
      dist_ = std::move(next);
      z = normalizer;
    }
    push_record(eps, eta, z);
    return true;
  }

  bool gradient_projection_round() {
    // dist_ already holds the normalized negative-gradient magnitudes
    // exp(-y_i f_{t-1}(x_i)) / sum (uniform at round 1 where f_0 = 0), so the
    // projection argmax over the inner product is the weighted-error argmin.
    const HypothesisPtr h = train_per_mode();
    const double eps = weighted_error(*h, train_, dist_);
    if (eps >= 0.5) {
      status_ = RunStatus::weak_learner_exhausted;
      return false;
    }
    // Closed-form line search on the exponential risk; always the log rule.
    const double eta = step_size(eps, StepRule::log_rule, config_.epsilon_clamp);
    double z;
    if (eps == 0.0 && config_.stop_on_zero_error) {
      append_term(eta, h);
      z = 0.0;  // as in the multiplicative engine's stopping round
      status_ = RunStatus::zero_error_stop;
    } else {
      // Normalizer of the implied reweighting, reported for the error bound.
      detail::CompensatedSum zsum;
      for (std::size_t i = 0; i < train_.size(); ++i) {
        zsum.add(dist_[i] * std::exp(-eta * train_.label(i).as_real() *
                                     h->predict(train_.features(i)).as_real()));
      }
      append_term(eta, h);
      dist_ = distribution_from_margins();
      z = zsum.value();
    }
    push_record(eps, eta, z);
    return true;
  }

  bool daboost_round() {
    const HypothesisPtr h = train_per_mode();
    const double eps = weighted_error(*h, train_, dist_);
    if (eps >= 0.5) {
      status_ = RunStatus::weak_learner_exhausted;
      return false;
    }
    const double coefficient = step_size(eps, config_.step_rule, config_.epsilon_clamp);
    append_term(coefficient, h);
    // The dual accumulator takes the margins of the full ensemble after this
    // round's term is in, i.e. the cumulative classifier f_t.
    std::vector<double> margins(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) {
      margins[i] = train_.label(i).as_real() * train_scores_[i];
    }
    dual_.accumulate(config_.lambda, margins);
    dist_ = dual_.distribution();
    if (eps == 0.0 && config_.stop_on_zero_error) status_ = RunStatus::zero_error_stop;
    push_record(eps, coefficient, std::nullopt);
    return true;
  }

  HypothesisPtr train_per_mode() {
    if (config_.weighting_mode == WeightingMode::reweight) {
      return learner_(train_, dist_);
    }
    const Dataset bootstrap = resample(train_, dist_, rng_);
    return learner_(bootstrap, Distribution::uniform(bootstrap.size()));
  }

  void append_term(double coefficient, const HypothesisPtr& h) {
    ensemble_.add(coefficient, h);
    for (std::size_t i = 0; i < train_.size(); ++i) {
      train_scores_[i] += coefficient * h->predict(train_.features(i)).as_real();
    }
    if (test_) {
      for (std::size_t i = 0; i < test_->size(); ++i) {
        test_scores_[i] += coefficient * h->predict(test_->features(i)).as_real();
      }
    }
  }

  Distribution distribution_from_margins() const {
    // exp(-m_i) normalized, shifted by the max to stay finite for any |f|.
    double max_neg_margin = -std::numeric_limits<double>::infinity();
    std::vector<double> neg_margins(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) {
      neg_margins[i] = -train_.label(i).as_real() * train_scores_[i];
      max_neg_margin = std::max(max_neg_margin, neg_margins[i]);
    }
    std::vector<double> w(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) {
      w[i] = std::exp(neg_margins[i] - max_neg_margin);
    }
    return Distribution::normalized(std::move(w));
  }

  static double error_from_scores(std::span<const double> scores, const Dataset& data) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (Label::from_sign(scores[i]) != data.label(i)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
  }

  void push_record(double eps, double step, std::optional<double> z) {
    RoundRecord record;
    record.round = records_.size() + 1;
    record.epsilon = eps;
    record.step = step;
    record.z = z;
    record.train_error = error_from_scores(train_scores_, train_);
    if (test_) record.test_error = error_from_scores(test_scores_, *test_);
    detail::CompensatedSum loss;
    for (std::size_t i = 0; i < train_.size(); ++i) {
      loss.add(std::exp(-train_.label(i).as_real() * train_scores_[i]));
    }
    record.exp_loss = loss.value() / static_cast<double>(train_.size());
    records_.push_back(std::move(record));
    if (status_ == RunStatus::running && records_.size() == config_.rounds) {
      status_ = RunStatus::completed;
    }
  }

  BoostConfig config_;
  const Dataset& train_;
  const Dataset* test_;
  WeakLearner learner_;
  Distribution dist_;
  DualState dual_;
  Ensemble ensemble_;
  Rng rng_;
  std::vector<double> train_scores_;
  std::vector<double> test_scores_;
  std::vector<RoundRecord> records_;
  RunStatus status_ = RunStatus::running;
};

/// Runs the configured engine for up to config.rounds rounds.
inline BoostResult run_boosting(const BoostConfig& config, const Dataset& train,
                                const Dataset* test = nullptr,
                                WeakLearner weak_learner = stump_weak_learner) {
  BoostRun run(config, train, test, std::move(weak_learner));
  while (run.step()) {
  }
  return {run.ensemble(), run.records(), run.status()};
}

}  // namespace daboost
