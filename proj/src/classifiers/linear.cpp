#include "papml/classifiers/linear.hpp"

#include <cmath>

#include "papml/common.hpp"

namespace papml {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogRegModel fit_logreg(const FeatureTable& train, const Params& raw_params,
                       std::vector<double>* loss_history) {
  if (train.rows.empty()) throw ValidationError("fit_logreg: empty training set");
  const Params params = validate_params(ClassifierKind::LogReg, raw_params);
  const double lr = param(params, "lr");
  const std::size_t epochs = param_size(params, "epochs");
  const double l2 = param(params, "l2");

  const std::size_t n = train.size();
  const std::size_t d = train.n_features();
  const double inv_n = 1.0 / static_cast<double>(n);

  LogRegModel model;
  model.weights.assign(d, 0.0);
  model.bias = 0.0;
  if (loss_history) loss_history->clear();

  std::vector<double> grad(d);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    double loss = 0.0;
    for (const Sample& s : train.rows) {
      const double y = s.label == BinaryLabel::Abnormal ? 1.0 : 0.0;
      const double m = logreg_margin(model, s.features);
      // stable form of -[y ln p + (1-y) ln(1-p)]
      loss += std::max(m, 0.0) - m * y + std::log1p(std::exp(-std::abs(m)));
      const double residual = sigmoid(m) - y;
      for (std::size_t j = 0; j < d; ++j) grad[j] += residual * s.features[j];
      grad_bias += residual;
    }
    loss *= inv_n;
    double w2 = 0.0;
    for (double w : model.weights) w2 += w * w;
    loss += 0.5 * l2 * w2;
    if (!std::isfinite(loss)) {
      throw RuntimeError("fit_logreg: non-finite loss at epoch " + std::to_string(epoch));
    }
    if (loss_history) loss_history->push_back(loss);

    for (std::size_t j = 0; j < d; ++j) {
      model.weights[j] -= lr * (grad[j] * inv_n + l2 * model.weights[j]);
    }
    model.bias -= lr * grad_bias * inv_n;
  }
  return model;
}

double logreg_margin(const LogRegModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size()) throw ValidationError("logreg: dimension mismatch");
  double m = model.bias;
  for (std::size_t j = 0; j < x.size(); ++j) m += model.weights[j] * x[j];
  return m;
}

double logreg_proba(const LogRegModel& model, std::span<const double> x) {
  return sigmoid(logreg_margin(model, x));
}

BinaryLabel predict_logreg(const LogRegModel& model, std::span<const double> x) {
  return logreg_margin(model, x) >= 0.0 ? BinaryLabel::Abnormal : BinaryLabel::Normal;
}

}  // namespace papml
