#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <json.hpp>

#include "papml/labels.hpp"

namespace papml {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
};

// Counts with `positive` as the positive class. The disease class
// (abnormal) is positive throughout this project.
ConfusionMatrix confusion(std::span<const BinaryLabel> predicted,
                          std::span<const BinaryLabel> truth,
                          BinaryLabel positive = BinaryLabel::Abnormal);

// A metric with a zero denominator is left unset rather than forced to a
// number; nullopt means "undefined for this matrix".
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> specificity;
  std::optional<double> f1;

  nlohmann::json to_json() const;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm);

// Whole-percent rounding used by report tables, half away from zero.
int to_percent(double fraction);

}  // namespace papml
