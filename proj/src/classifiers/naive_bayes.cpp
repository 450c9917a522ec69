#include "papml/classifiers/naive_bayes.hpp"

#include <cmath>
#include <limits>

#include "papml/common.hpp"

namespace papml {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

GnbModel fit_gnb(const FeatureTable& train, const Params& raw_params) {
  if (train.rows.empty()) throw ValidationError("fit_gnb: empty training set");
  const Params params = validate_params(ClassifierKind::Gnb, raw_params);

  const std::size_t d = train.n_features();
  GnbModel model;
  model.var_floor = param(params, "var_floor");
  if (model.var_floor <= 0.0) model.var_floor = 1e-9;

  std::array<std::size_t, 2> counts{};
  for (int c = 0; c < 2; ++c) {
    model.mean[c].assign(d, 0.0);
    model.variance[c].assign(d, 0.0);
  }
  for (const Sample& s : train.rows) {
    const auto c = static_cast<std::size_t>(s.label);
    counts[c]++;
    for (std::size_t j = 0; j < d; ++j) model.mean[c][j] += s.features[j];
  }
  for (int c = 0; c < 2; ++c) {
    if (counts[c] > 0) {
      for (std::size_t j = 0; j < d; ++j) model.mean[c][j] /= static_cast<double>(counts[c]);
    }
  }
  for (const Sample& s : train.rows) {
    const auto c = static_cast<std::size_t>(s.label);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = s.features[j] - model.mean[c][j];
      model.variance[c][j] += diff * diff;
    }
  }
  const double n = static_cast<double>(train.size());
  for (int c = 0; c < 2; ++c) {
    model.log_prior[c] = counts[c] > 0
                             ? std::log(static_cast<double>(counts[c]) / n)
                             : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d; ++j) {
      const double var =
          counts[c] > 0 ? model.variance[c][j] / static_cast<double>(counts[c]) : 0.0;
      model.variance[c][j] = std::max(var, model.var_floor);
    }
  }
  return model;
}

double gnb_log_joint(const GnbModel& model, BinaryLabel label, std::span<const double> x) {
  const auto c = static_cast<std::size_t>(label);
  if (x.size() != model.mean[c].size()) throw ValidationError("gnb: dimension mismatch");
  double ll = model.log_prior[c];
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double var = model.variance[c][j];
    const double diff = x[j] - model.mean[c][j];
    ll += -0.5 * (kLog2Pi + std::log(var) + diff * diff / var);
  }
  return ll;
}

double gnb_posterior_abnormal(const GnbModel& model, std::span<const double> x) {
  const double a = gnb_log_joint(model, BinaryLabel::Abnormal, x);
  const double n = gnb_log_joint(model, BinaryLabel::Normal, x);
  const double m = std::max(a, n);
  const double ea = std::exp(a - m);
  const double en = std::exp(n - m);
  return ea / (ea + en);
}

BinaryLabel predict_gnb(const GnbModel& model, std::span<const double> x) {
  return gnb_log_joint(model, BinaryLabel::Abnormal, x) >=
                 gnb_log_joint(model, BinaryLabel::Normal, x)
             ? BinaryLabel::Abnormal
             : BinaryLabel::Normal;
}

}  // namespace papml
