#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "papml/classifiers/svm.hpp"
#include "papml/common.hpp"

using namespace papml;

TEST_CASE("rbf kernel values") {
  const std::vector<double> a{1.0, 2.0}, b{1.0, 1.0};
  CHECK(rbf_kernel(a, a, 0.7) == 1.0);
  CHECK(rbf_kernel(a, b, 0.0) == 1.0);
  CHECK(rbf_kernel(a, b, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));  // 0.36788
  CHECK_THROWS_AS(rbf_kernel(a, std::vector<double>{1.0}, 1.0), ValidationError);
}

namespace {

FeatureTable two_point_set() {
  FeatureTable t;
  t.column_names = {"x", "y"};
  t.add(Sample{{-1.0, 0.0}, CellClass::Columnar, BinaryLabel::Normal});
  t.add(Sample{{1.0, 0.0}, CellClass::MildDysplasia, BinaryLabel::Abnormal});
  return t;
}

// 4-variable dual solve by projected gradient ascent: maximize
// sum(a) - 0.5 a'Qa over the box [0,C] intersected with sum(a*y) = 0.
std::vector<double> dense_dual_solve(const std::vector<std::vector<double>>& x,
                                     const std::vector<int>& y, double c, double gamma,
                                     std::size_t iters = 400000) {
  const std::size_t n = x.size();
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      q[i * n + j] = double(y[i] * y[j]) * rbf_kernel(x[i], x[j], gamma);
    }
  }
  std::vector<double> alpha(n, 0.0);
  const double step = 0.05;
  for (std::size_t it = 0; it < iters; ++it) {
    std::vector<double> grad(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) grad[i] -= q[i * n + j] * alpha[j];
    }
    for (std::size_t i = 0; i < n; ++i) alpha[i] += step * grad[i];
    // alternating projection onto the equality constraint and the box
    for (int rounds = 0; rounds < 60; ++rounds) {
      double viol = 0.0;
      for (std::size_t i = 0; i < n; ++i) viol += alpha[i] * double(y[i]);
      for (std::size_t i = 0; i < n; ++i) alpha[i] -= viol * double(y[i]) / double(n);
      for (std::size_t i = 0; i < n; ++i) alpha[i] = std::clamp(alpha[i], 0.0, c);
    }
  }
  return alpha;
}

double oracle_decision(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                       const std::vector<double>& alpha, double gamma, double c,
                       std::span<const double> probe) {
  // bias from a free support vector: y_i - sum_j a_j y_j K(x_j, x_i)
  double bias = 0.0;
  int counted = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (alpha[i] > 1e-6 && alpha[i] < c - 1e-6) {
      double f = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        f += alpha[j] * double(y[j]) * rbf_kernel(x[j], x[i], gamma);
      }
      bias += double(y[i]) - f;
      ++counted;
    }
  }
  if (counted > 0) bias /= double(counted);
  double f = bias;
  for (std::size_t j = 0; j < x.size(); ++j) {
    f += alpha[j] * double(y[j]) * rbf_kernel(x[j], probe, gamma);
  }
  return f;
}

}  // namespace

TEST_CASE("two opposite points: both become support vectors, boundary at the midpoint") {
  const FeatureTable t = two_point_set();
  const Params params{{"C", 10.0}, {"gamma", 0.5}, {"tol", 1e-6}};
  SvmFitInfo info;
  const SvmModel model = fit_svm(t, params, &info);
  CHECK(model.support_vectors.size() == 2);
  CHECK(model.converged);
  CHECK(std::abs(model.decision(std::vector<double>{0.0, 0.0})) < 1e-9);
  CHECK(model.decision(std::vector<double>{0.5, 0.0}) > 0.0);
  CHECK(model.decision(std::vector<double>{-0.5, 0.0}) < 0.0);
  CHECK(predict_svm(model, std::vector<double>{0.9, 0.1}) == BinaryLabel::Abnormal);

  double alpha_dot_y = 0.0;
  for (std::size_t i = 0; i < info.alphas.size(); ++i) {
    alpha_dot_y += info.alphas[i] * info.y[i];
  }
  CHECK(std::abs(alpha_dot_y) < 1e-6);
}

TEST_CASE("XOR with the rbf kernel reaches perfect training accuracy and matches a dense solve") {
  FeatureTable t;
  t.column_names = {"x", "y"};
  t.add(Sample{{0.0, 0.0}, CellClass::Columnar, BinaryLabel::Normal});
  t.add(Sample{{1.0, 1.0}, CellClass::Columnar, BinaryLabel::Normal});
  t.add(Sample{{0.0, 1.0}, CellClass::MildDysplasia, BinaryLabel::Abnormal});
  t.add(Sample{{1.0, 0.0}, CellClass::MildDysplasia, BinaryLabel::Abnormal});

  const double c = 10.0, gamma = 1.0;
  SvmFitInfo info;
  const SvmModel model = fit_svm(t, {{"C", c}, {"gamma", gamma}, {"tol", 1e-6}}, &info);
  for (const Sample& s : t.rows) {
    CHECK(predict_svm(model, s.features) == s.label);
  }

  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const Sample& s : t.rows) {
    x.push_back(s.features);
    y.push_back(s.label == BinaryLabel::Abnormal ? 1 : -1);
  }
  const std::vector<double> alpha = dense_dual_solve(x, y, c, gamma);

  // oracle optimum satisfies KKT and agrees with the SMO model's decisions
  Rng rng(17);
  for (int i = 0; i < 40; ++i) {
    const std::vector<double> probe{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
    const double oracle_f = oracle_decision(x, y, alpha, gamma, c, probe);
    const double model_f = model.decision(probe);
    if (std::abs(oracle_f) > 1e-3 || std::abs(model_f) > 1e-3) {
      CHECK((oracle_f >= 0) == (model_f >= 0));
    }
  }
}

TEST_CASE("separable blobs train with zero errors and satisfy KKT at the solution") {
  const FeatureTable raw = synth_blobs(40, 3, 6.0, 23);
  const Scaler sc = Scaler::fit(raw, ScalerKind::ZScore);
  const FeatureTable t = sc.transform(raw);
  const double c = 1.0, tol = 1e-4;
  SvmFitInfo info;
  const SvmModel model = fit_svm(t, {{"C", c}, {"tol", tol}}, &info);
  CHECK(model.converged);
  CHECK(info.converged);

  std::size_t errors = 0;
  for (const Sample& s : t.rows) errors += predict_svm(model, s.features) != s.label;
  CHECK(errors == 0);

  // KKT: alpha=0 -> y f >= 1-tol; 0<alpha<C -> |y f - 1| <= tol; alpha=C -> y f <= 1+tol
  double alpha_dot_y = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double yi = t.rows[i].label == BinaryLabel::Abnormal ? 1.0 : -1.0;
    const double yf = yi * model.decision(t.rows[i].features);
    const double a = info.alphas[i];
    alpha_dot_y += a * yi;
    CHECK(a >= -1e-12);
    CHECK(a <= c + 1e-12);
    if (a < 1e-10) {
      CHECK(yf >= 1.0 - 10 * tol);
    } else if (a > c - 1e-10) {
      CHECK(yf <= 1.0 + 10 * tol);
    } else {
      CHECK(std::abs(yf - 1.0) <= 10 * tol);
    }
  }
  CHECK(std::abs(alpha_dot_y) < 1e-6);
}

TEST_CASE("removing a non-support vector leaves the decision function unchanged") {
  const FeatureTable raw = synth_blobs(25, 2, 8.0, 31);
  const Params params{{"C", 5.0}, {"gamma", 0.3}, {"tol", 1e-8}, {"max_passes", 500}};
  SvmFitInfo info;
  const SvmModel model = fit_svm(raw, params, &info);
  REQUIRE(model.converged);

  std::size_t drop = raw.size();
  for (std::size_t i = 0; i < info.alphas.size(); ++i) {
    if (info.alphas[i] < 1e-12) {
      drop = i;
      break;
    }
  }
  REQUIRE(drop < raw.size());

  FeatureTable reduced;
  reduced.column_names = raw.column_names;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i != drop) reduced.add(raw.rows[i]);
  }
  const SvmModel refit = fit_svm(reduced, params);

  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> probe{rng.gaussian(4.0, 4.0), rng.gaussian(4.0, 4.0)};
    CHECK(model.decision(probe) == doctest::Approx(refit.decision(probe)).epsilon(1e-6));
  }
}

TEST_CASE("the linear kernel splits a 1-d set at the exact midpoint plane") {
  FeatureTable t;
  t.column_names = {"x"};
  t.add(Sample{{1.0}, CellClass::Columnar, BinaryLabel::Normal});
  t.add(Sample{{3.0}, CellClass::MildDysplasia, BinaryLabel::Abnormal});
  const SvmModel model = fit_svm(t, {{"C", 100.0}, {"kernel", 1}, {"tol", 1e-8}});
  CHECK(std::abs(model.decision(std::vector<double>{2.0})) < 1e-6);
  CHECK(predict_svm(model, std::vector<double>{2.5}) == BinaryLabel::Abnormal);
  CHECK(predict_svm(model, std::vector<double>{1.5}) == BinaryLabel::Normal);
}
