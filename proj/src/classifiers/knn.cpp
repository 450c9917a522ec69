#include "papml/classifiers/knn.hpp"

#include <algorithm>
#include <cmath>

#include "papml/common.hpp"

namespace papml {

namespace {

// sum |a_i - b_i|^p, which ranks identically to the full distance
double minkowski_pow(std::span<const double> a, std::span<const double> b, double p) {
  double acc = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double diff = a[i] - b[i];
      acc += diff * diff;
    }
  } else if (p == 1.0) {
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
  }
  return acc;
}

}  // namespace

double minkowski(std::span<const double> a, std::span<const double> b, double p) {
  if (a.size() != b.size()) throw ValidationError("minkowski: dimension mismatch");
  if (p < 1.0) throw ValidationError("minkowski: p must be >= 1");
  const double acc = minkowski_pow(a, b, p);
  if (p == 1.0) return acc;
  if (p == 2.0) return std::sqrt(acc);
  return std::pow(acc, 1.0 / p);
}

KnnModel fit_knn(const FeatureTable& train, const Params& raw_params) {
  if (train.rows.empty()) throw ValidationError("fit_knn: empty training set");
  const Params params = validate_params(ClassifierKind::Knn, raw_params);

  KnnModel model;
  model.k = param_size(params, "k");
  model.p = param(params, "p");
  model.n = train.size();
  model.d = train.n_features();
  if (model.k > model.n) {
    throw ValidationError("fit_knn: k = " + std::to_string(model.k) + " exceeds training size " +
                          std::to_string(model.n));
  }
  model.features.reserve(model.n * model.d);
  model.labels.reserve(model.n);
  for (const Sample& s : train.rows) {
    model.features.insert(model.features.end(), s.features.begin(), s.features.end());
    model.labels.push_back(s.label);
  }
  return model;
}

BinaryLabel predict_knn(const KnnModel& model, std::span<const double> x) {
  if (x.size() != model.d) throw ValidationError("predict_knn: dimension mismatch");

  std::vector<std::pair<double, std::size_t>> dist(model.n);
  for (std::size_t i = 0; i < model.n; ++i) {
    dist[i] = {minkowski_pow(model.row(i), x, model.p), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k),
                    dist.end());

  std::size_t abnormal = 0;
  for (std::size_t i = 0; i < model.k; ++i) {
    abnormal += model.labels[dist[i].second] == BinaryLabel::Abnormal;
  }
  return 2 * abnormal >= model.k ? BinaryLabel::Abnormal : BinaryLabel::Normal;
}

}  // namespace papml
