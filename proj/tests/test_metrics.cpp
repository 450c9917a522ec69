#include <doctest.h>

#include <cmath>

#include "papml/common.hpp"
#include "papml/metrics.hpp"
#include "papml/rng.hpp"

using namespace papml;

namespace {

constexpr BinaryLabel N = BinaryLabel::Normal;
constexpr BinaryLabel A = BinaryLabel::Abnormal;

// independent per-sample recount used as the oracle
ConfusionMatrix brute_force(const std::vector<BinaryLabel>& pred,
                            const std::vector<BinaryLabel>& truth, BinaryLabel positive) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == positive) {
      (pred[i] == positive ? cm.tp : cm.fn)++;
    } else {
      (pred[i] == positive ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

}  // namespace

TEST_CASE("the worked confusion matrix reproduces the published arithmetic") {
  const MetricsReport m = compute_metrics(ConfusionMatrix{50, 30, 10, 10});
  CHECK(*m.accuracy == doctest::Approx(0.8000).epsilon(1e-12));
  CHECK(*m.recall == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(*m.precision == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(*m.specificity == doctest::Approx(0.7500).epsilon(1e-12));
  CHECK(*m.f1 == doctest::Approx(0.8333).epsilon(1e-4));
}

TEST_CASE("degenerate predictors produce the expected corners") {
  SUBCASE("perfect predictions have no false counts") {
    const std::vector<BinaryLabel> truth = {A, N, A, N, N, A};
    const ConfusionMatrix cm = confusion(truth, truth);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);
    CHECK(cm.tp == 3);
    CHECK(cm.tn == 3);
  }
  SUBCASE("constant positive predictor") {
    const std::vector<BinaryLabel> pred(5, A);
    const std::vector<BinaryLabel> truth = {A, A, A, N, N};
    const ConfusionMatrix cm = confusion(pred, truth);
    CHECK(cm.tp == 3);
    CHECK(cm.fp == 2);
    CHECK(cm.tn == 0);
    CHECK(cm.fn == 0);
  }
  SUBCASE("inverted predictor has no true counts") {
    const std::vector<BinaryLabel> truth = {A, N, A, N};
    std::vector<BinaryLabel> pred;
    for (BinaryLabel l : truth) pred.push_back(l == A ? N : A);
    const ConfusionMatrix cm = confusion(pred, truth);
    CHECK(cm.tp == 0);
    CHECK(cm.tn == 0);
  }
}

TEST_CASE("zero denominators mark metrics undefined instead of inventing numbers") {
  SUBCASE("all-positive truth: specificity undefined, the rest are 1") {
    const MetricsReport m = compute_metrics(ConfusionMatrix{7, 0, 0, 0});
    CHECK(*m.accuracy == 1.0);
    CHECK(*m.recall == 1.0);
    CHECK(*m.precision == 1.0);
    CHECK(*m.f1 == 1.0);
    CHECK_FALSE(m.specificity.has_value());
    const auto j = m.to_json();
    CHECK(j.at("specificity").is_null());
    CHECK(j.at("accuracy_percent") == 100);
  }
  SUBCASE("precision and recall both zero leaves f1 undefined") {
    const MetricsReport m = compute_metrics(ConfusionMatrix{0, 0, 3, 4});
    CHECK(*m.precision == 0.0);
    CHECK(*m.recall == 0.0);
    CHECK_FALSE(m.f1.has_value());
  }
}

TEST_CASE("symmetric half-right matrix scores accuracy one half") {
  const MetricsReport m = compute_metrics(ConfusionMatrix{5, 5, 5, 5});
  CHECK(*m.accuracy == 0.5);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(confusion(std::vector<BinaryLabel>{A}, std::vector<BinaryLabel>{A, N}),
                  ValidationError);
  CHECK_THROWS_AS(confusion(std::vector<BinaryLabel>{}, std::vector<BinaryLabel>{}),
                  ValidationError);
  CHECK_THROWS_AS(compute_metrics(ConfusionMatrix{}), ValidationError);
}

TEST_CASE("random matrices satisfy range, F1 betweenness, and the accuracy identity") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const ConfusionMatrix cm{1 + rng.below(500), 1 + rng.below(500), 1 + rng.below(500),
                             1 + rng.below(500)};
    const MetricsReport m = compute_metrics(cm);
    for (const auto& v : {m.accuracy, m.recall, m.precision, m.specificity, m.f1}) {
      REQUIRE(v.has_value());
      CHECK(*v >= 0.0);
      CHECK(*v <= 1.0);
    }
    CHECK(*m.f1 >= std::min(*m.precision, *m.recall) - 1e-12);
    CHECK(*m.f1 <= std::max(*m.precision, *m.recall) + 1e-12);

    const double pos = double(cm.tp + cm.fn), neg = double(cm.tn + cm.fp);
    const double identity = (*m.recall * pos + *m.specificity * neg) / double(cm.total());
    CHECK(*m.accuracy == doctest::Approx(identity).epsilon(1e-12));
  }
}

TEST_CASE("confusion agrees exactly with per-sample brute-force counting") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(500);
    std::vector<BinaryLabel> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform() < 0.5 ? A : N;
      truth[i] = rng.uniform() < 0.5 ? A : N;
    }
    const ConfusionMatrix got = confusion(pred, truth);
    const ConfusionMatrix want = brute_force(pred, truth, A);
    CHECK(got.tp == want.tp);
    CHECK(got.tn == want.tn);
    CHECK(got.fp == want.fp);
    CHECK(got.fn == want.fn);
  }
}

TEST_CASE("swapping the positive class swaps recall/specificity and tp/tn, fp/fn") {
  Rng rng(5);
  std::vector<BinaryLabel> pred(200), truth(200);
  for (std::size_t i = 0; i < 200; ++i) {
    pred[i] = rng.uniform() < 0.6 ? A : N;
    truth[i] = rng.uniform() < 0.4 ? A : N;
  }
  const ConfusionMatrix as_abnormal = confusion(pred, truth, A);
  const ConfusionMatrix as_normal = confusion(pred, truth, N);
  CHECK(as_normal.tp == as_abnormal.tn);
  CHECK(as_normal.tn == as_abnormal.tp);
  CHECK(as_normal.fp == as_abnormal.fn);
  CHECK(as_normal.fn == as_abnormal.fp);

  const MetricsReport ma = compute_metrics(as_abnormal);
  const MetricsReport mn = compute_metrics(as_normal);
  CHECK(*ma.recall == *mn.specificity);
  CHECK(*ma.specificity == *mn.recall);
  CHECK(*ma.accuracy == *mn.accuracy);
}

TEST_CASE("percent rounding is half away from zero") {
  CHECK(to_percent(0.845) == 85);
  CHECK(to_percent(0.844) == 84);
  CHECK(to_percent(0.005) == 1);
  CHECK(to_percent(1.0) == 100);
  CHECK(to_percent(0.0) == 0);
}
