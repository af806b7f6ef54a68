#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "daboost/daboost.hpp"
#include "test_support.hpp"

using namespace daboost;

namespace {

HypothesisPtr constant_hypothesis(int sign) {
  // sentinel threshold: every sample falls on the "greater" side
  return std::make_shared<Stump>(0, kSentinelThreshold, -sign);
}

Dataset tiny_dataset(const std::vector<int>& labels, std::size_t dim = 1) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    samples.push_back({std::vector<double>(dim, static_cast<double>(i)), Label(labels[i])});
  }
  return Dataset(std::move(samples));
}

}  // namespace

TEST_CASE("Label stores only +1/-1") {
  CHECK(Label(1).value() == 1);
  CHECK(Label(-1).value() == -1);
  CHECK_THROWS_AS(Label(0), std::invalid_argument);
  CHECK_THROWS_AS(Label(2), std::invalid_argument);
  CHECK(Label::from_sign(0.0) == Label::positive());
  CHECK(Label::from_sign(-1e-300) == Label::negative());
  CHECK(Label(1).flipped() == Label::negative());
}

TEST_CASE("Dataset validates shape and finiteness") {
  CHECK_THROWS_AS(Dataset({}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{{1.0}, Label(1)}, {{1.0, 2.0}, Label(-1)}}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{{std::nan("")}, Label(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{{std::numeric_limits<double>::infinity()}, Label(1)}}),
                  std::invalid_argument);
  const Dataset data({{{1.0, 2.0}, Label(1)}, {{3.0, 4.0}, Label(-1)}});
  CHECK(data.size() == 2);
  CHECK(data.dim() == 2);
  CHECK(data.label(1) == Label::negative());
}

TEST_CASE("Distribution invariants") {
  CHECK_THROWS_AS(Distribution({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution(std::vector<double>{}), std::invalid_argument);

  const auto u = Distribution::uniform(3);
  CHECK(u[0] == Catch::Approx(1.0 / 3));

  const auto d = Distribution::normalized({1.0, 2.0, 5.0});
  CHECK(d[2] == Catch::Approx(0.625));
  CHECK(std::abs(detail::sum(d.weights()) - 1.0) <= kDistributionTolerance);

  // normalization stays within 1e-12 even for large n
  std::vector<double> big(100000, 0.3);
  const auto dn = Distribution::normalized(std::move(big));
  CHECK(std::abs(detail::sum(dn.weights()) - 1.0) <= kDistributionTolerance);
}

TEST_CASE("ensemble score and predict") {
  const std::vector<double> x{0.0};
  Ensemble empty;
  CHECK(empty.score(x) == 0.0);
  CHECK(empty.predict(x) == Label::positive());  // zero-score tie maps to +1

  Ensemble single;
  single.add(0.5, constant_hypothesis(+1));
  CHECK(single.score(x) == Catch::Approx(0.5));

  Ensemble two;
  two.add(0.5, constant_hypothesis(+1));
  two.add(0.3, constant_hypothesis(-1));
  CHECK(two.score(x) == Catch::Approx(0.2));  // 0.5 - 0.3
  CHECK(two.predict(x) == Label::positive());

  Ensemble tie;
  tie.add(1.0, constant_hypothesis(+1));
  tie.add(1.0, constant_hypothesis(-1));
  CHECK(tie.score(x) == 0.0);
  CHECK(tie.predict(x) == Label::positive());

  Ensemble bad;
  CHECK_THROWS_AS(bad.add(std::nan(""), constant_hypothesis(+1)), std::invalid_argument);
  CHECK_THROWS_AS(bad.add(std::numeric_limits<double>::infinity(), constant_hypothesis(+1)),
                  std::invalid_argument);
}

TEST_CASE("hypothesis dimension mismatch is an error") {
  const Stump stump(3, 0.5, 1);
  const std::vector<double> too_short{1.0, 2.0};
  CHECK_THROWS_AS(stump.predict(too_short), std::invalid_argument);
}

TEST_CASE("weighted_error sums the misclassified mass") {
  const Dataset data = tiny_dataset({-1, +1, -1, +1});
  const Distribution d({0.1, 0.2, 0.3, 0.4});

  // constant +1 errs exactly on the two -1 samples (weights 0.1 and 0.3)
  CHECK(weighted_error(*constant_hypothesis(+1), data, d) == Catch::Approx(0.4).margin(1e-12));

  const Dataset all_pos = tiny_dataset({+1, +1, +1, +1});
  CHECK(weighted_error(*constant_hypothesis(+1), all_pos, d) == 0.0);
  CHECK(weighted_error(*constant_hypothesis(-1), all_pos, d) ==
        Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(weighted_error(*constant_hypothesis(+1), data, Distribution::uniform(3)),
                  std::invalid_argument);
}

TEST_CASE("edge is 1 - 2 error and flips with the hypothesis") {
  const Dataset data = tiny_dataset({-1, +1, -1, +1});
  const Distribution d({0.1, 0.2, 0.3, 0.4});
  CHECK(edge(*constant_hypothesis(+1), data, d) == Catch::Approx(0.2).margin(1e-12));

  const Dataset half = tiny_dataset({+1, -1});
  const Distribution u2 = Distribution::uniform(2);
  CHECK(edge(*constant_hypothesis(+1), half, u2) == Catch::Approx(0.0).margin(1e-12));

  const Dataset all_pos = tiny_dataset({+1, +1});
  CHECK(edge(*constant_hypothesis(+1), all_pos, u2) == Catch::Approx(1.0).margin(1e-12));

  // label-flipped hypothesis negates the edge, for random stumps and weights
  Rng rng = make_rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Dataset data2 = testsupport::random_dataset(rng, 20, 3);
    const Distribution d2 = testsupport::random_distribution(rng, 20);
    const auto j = static_cast<std::size_t>(uniform_below(rng, 3));
    const double theta = uniform_in(rng, -1.0, 1.0);
    const Stump h(j, theta, 1);
    const Stump h_flipped(j, theta, -1);
    CHECK(edge(h, data2, d2) == Catch::Approx(-edge(h_flipped, data2, d2)).margin(1e-12));
  }
}

TEST_CASE("empirical_inner_product") {
  CHECK(empirical_inner_product(std::vector<double>{1, 1}, std::vector<double>{1, 1}) == 1.0);
  CHECK(empirical_inner_product(std::vector<double>{1, -1}, std::vector<double>{1, 1}) == 0.0);
  CHECK(empirical_inner_product(std::vector<double>{2, 0, 1}, std::vector<double>{1, 5, 2}) ==
        Catch::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(empirical_inner_product(std::vector<double>{1}, std::vector<double>{1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(empirical_inner_product(std::vector<double>{}, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("exponential_loss mean convention") {
  const Dataset one_pos = tiny_dataset({+1});
  Ensemble empty;
  CHECK(exponential_loss(empty, one_pos) == Catch::Approx(1.0));

  Ensemble correct;
  correct.add(std::log(2.0), constant_hypothesis(+1));
  CHECK(exponential_loss(correct, one_pos) == Catch::Approx(0.5));

  const Dataset one_neg = tiny_dataset({-1});
  CHECK(exponential_loss(correct, one_neg) == Catch::Approx(2.0));
}

TEST_CASE("exponential loss dominates zero-one error") {
  Rng rng = make_rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const Dataset data = testsupport::random_dataset(rng, 40, 4);
    Ensemble ensemble;
    const int terms = 1 + static_cast<int>(uniform_below(rng, 4));
    for (int t = 0; t < terms; ++t) {
      ensemble.add(uniform_in(rng, -1.0, 1.0),
                   std::make_shared<Stump>(static_cast<std::size_t>(uniform_below(rng, 4)),
                                           uniform_in(rng, -1.0, 1.0),
                                           uniform_unit(rng) < 0.5 ? 1 : -1));
    }
    CHECK(zero_one_error(ensemble, data) <= exponential_loss(ensemble, data) + 1e-12);
  }
}

TEST_CASE("prediction is invariant under positive rescaling") {
  Rng rng = make_rng(22);
  const Dataset data = testsupport::random_dataset(rng, 30, 3);
  for (int rep = 0; rep < 20; ++rep) {
    Ensemble base, scaled;
    const double scale = std::exp(uniform_in(rng, -3.0, 3.0));
    const int terms = 1 + static_cast<int>(uniform_below(rng, 5));
    for (int t = 0; t < terms; ++t) {
      const double coef = uniform_in(rng, -1.0, 1.0);
      const auto h = std::make_shared<Stump>(static_cast<std::size_t>(uniform_below(rng, 3)),
                                             uniform_in(rng, -1.0, 1.0),
                                             uniform_unit(rng) < 0.5 ? 1 : -1);
      base.add(coef, h);
      scaled.add(scale * coef, h);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      REQUIRE(base.predict(data.features(i)) == scaled.predict(data.features(i)));
    }
  }
}
