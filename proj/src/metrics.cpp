#include "papml/metrics.hpp"

#include <cmath>

#include "papml/common.hpp"

namespace papml {

ConfusionMatrix confusion(std::span<const BinaryLabel> predicted,
                          std::span<const BinaryLabel> truth, BinaryLabel positive) {
  if (predicted.size() != truth.size()) {
    throw ValidationError("confusion: predicted and truth lengths differ (" +
                          std::to_string(predicted.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  }
  if (predicted.empty()) throw ValidationError("confusion: empty input");

  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool pred_pos = predicted[i] == positive;
    const bool true_pos = truth[i] == positive;
    if (pred_pos && true_pos) ++cm.tp;
    else if (pred_pos && !true_pos) ++cm.fp;
    else if (!pred_pos && true_pos) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("compute_metrics: empty confusion matrix");

  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) {
      j[name] = *v;
      j[std::string(name) + "_percent"] = to_percent(*v);
    } else {
      j[name] = nullptr;
    }
  };
  put("accuracy", accuracy);
  put("recall", recall);
  put("precision", precision);
  put("specificity", specificity);
  put("f1", f1);
  return j;
}

int to_percent(double fraction) {
  return static_cast<int>(std::llround(fraction * 100.0));
}

}  // namespace papml
