#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "papml/metrics.hpp"

namespace papml {

struct ModelColumn {
  std::string name;  // display name, e.g. "k-NN" or "CNN (train)"
  MetricsReport metrics;
  double wall_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t dataset_rows = 0;
  std::size_t image_count = 0;
  std::string features_csv;
  std::string images_dir;
};

// Five metric rows by model columns, the shape of the published comparison.
struct ComparisonTable {
  std::vector<ModelColumn> columns;
  Provenance provenance;

  std::string render(const std::string& format) const;  // markdown | csv | json
  std::string render_markdown() const;
  std::string render_csv() const;
  std::string render_json() const;

  // lossless persisted form (run.json); re-rendering from it is byte-stable
  nlohmann::json to_json() const;
  static ComparisonTable from_json(const nlohmann::json& j);
};

inline constexpr const char* kMetricRowNames[5] = {"Accuracy", "Recall", "Precision",
                                                   "Specificity", "F1 Score"};

}  // namespace papml
