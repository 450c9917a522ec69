#include "papml/bench/table.hpp"

#include <array>
#include <optional>

#include "papml/common.hpp"

namespace papml {

namespace {

std::array<std::optional<double>, 5> metric_values(const MetricsReport& m) {
  return {m.accuracy, m.recall, m.precision, m.specificity, m.f1};
}

std::string cell_text(const ModelColumn& column, std::size_t metric_row) {
  if (column.failed) return "failed";
  const auto v = metric_values(column.metrics)[metric_row];
  if (!v) return "-";
  return std::to_string(to_percent(*v));
}

}  // namespace

std::string ComparisonTable::render(const std::string& format) const {
  if (format == "markdown") return render_markdown();
  if (format == "csv") return render_csv();
  if (format == "json") return render_json();
  throw ValidationError("unknown report format: " + format);
}

std::string ComparisonTable::render_markdown() const {
  std::string out = "| Metric |";
  for (const ModelColumn& c : columns) out += " " + c.name + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  for (std::size_t row = 0; row < 5; ++row) {
    out += "| " + std::string(kMetricRowNames[row]) + " (%) |";
    for (const ModelColumn& c : columns) out += " " + cell_text(c, row) + " |";
    out += "\n";
  }
  out += "\nseed=" + std::to_string(provenance.seed) + " config=" + provenance.config_hash +
         " rows=" + std::to_string(provenance.dataset_rows);
  if (provenance.image_count > 0) {
    out += " images=" + std::to_string(provenance.image_count);
  }
  out += "\n";
  return out;
}

std::string ComparisonTable::render_csv() const {
  std::string out = "metric";
  for (const ModelColumn& c : columns) out += "," + c.name;
  out += "\n";
  for (std::size_t row = 0; row < 5; ++row) {
    out += kMetricRowNames[row];
    for (const ModelColumn& c : columns) out += "," + cell_text(c, row);
    out += "\n";
  }
  return out;
}

std::string ComparisonTable::render_json() const { return to_json().dump(2) + "\n"; }

nlohmann::json ComparisonTable::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const ModelColumn& c : columns) {
    cols.push_back({{"name", c.name},
                    {"metrics", c.metrics.to_json()},
                    {"wall_seconds", c.wall_seconds},
                    {"failed", c.failed},
                    {"error", c.error}});
  }
  return {{"columns", std::move(cols)},
          {"provenance",
           {{"seed", provenance.seed},
            {"config_hash", provenance.config_hash},
            {"dataset_rows", provenance.dataset_rows},
            {"image_count", provenance.image_count},
            {"features_csv", provenance.features_csv},
            {"images_dir", provenance.images_dir}}}};
}

ComparisonTable ComparisonTable::from_json(const nlohmann::json& j) {
  ComparisonTable t;
  for (const auto& jc : j.at("columns")) {
    ModelColumn c;
    c.name = jc.at("name");
    c.wall_seconds = jc.at("wall_seconds");
    c.failed = jc.at("failed");
    c.error = jc.at("error");
    const auto& m = jc.at("metrics");
    auto get = [&](const char* name) -> std::optional<double> {
      if (m.at(name).is_null()) return std::nullopt;
      return m.at(name).get<double>();
    };
    c.metrics.accuracy = get("accuracy");
    c.metrics.recall = get("recall");
    c.metrics.precision = get("precision");
    c.metrics.specificity = get("specificity");
    c.metrics.f1 = get("f1");
    t.columns.push_back(std::move(c));
  }
  const auto& p = j.at("provenance");
  t.provenance.seed = p.at("seed");
  t.provenance.config_hash = p.at("config_hash");
  t.provenance.dataset_rows = p.at("dataset_rows");
  t.provenance.image_count = p.at("image_count");
  t.provenance.features_csv = p.at("features_csv");
  t.provenance.images_dir = p.at("images_dir");
  return t;
}

}  // namespace papml
