#include "papml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "papml/common.hpp"
#include "papml/rng.hpp"

namespace papml {

std::size_t FeatureTable::count(BinaryLabel l) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < kNumCellClasses; ++i) {
    if (to_binary(all_cell_classes[i]) == l) n += class_counts[i];
  }
  return n;
}

std::size_t FeatureTable::distinct_classes() const {
  std::size_t n = 0;
  for (std::size_t c : class_counts) {
    if (c > 0) ++n;
  }
  return n;
}

std::vector<BinaryLabel> FeatureTable::labels() const {
  std::vector<BinaryLabel> out;
  out.reserve(rows.size());
  for (const Sample& s : rows) out.push_back(s.label);
  return out;
}

void FeatureTable::add(Sample s) {
  if (s.features.size() != column_names.size()) {
    throw ValidationError("sample has " + std::to_string(s.features.size()) +
                          " features, table has " + std::to_string(column_names.size()) +
                          " columns");
  }
  for (double v : s.features) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  if (s.label != to_binary(s.cell_class)) {
    throw ValidationError("binary label inconsistent with cell class");
  }
  class_counts[static_cast<std::size_t>(s.cell_class)]++;
  rows.push_back(std::move(s));
}

const std::vector<std::string>& herlev_column_names() {
  static const std::vector<std::string> names = {
      "nucleus_area",
      "cytoplasm_area",
      "nc_ratio",
      "nucleus_brightness",
      "cytoplasm_brightness",
      "nucleus_shortest_diameter",
      "nucleus_longest_diameter",
      "nucleus_elongation",
      "nucleus_roundness",
      "cytoplasm_shortest_diameter",
      "cytoplasm_longest_diameter",
      "cytoplasm_elongation",
      "cytoplasm_roundness",
      "nucleus_perimeter",
      "cytoplasm_perimeter",
      "nucleus_relative_position",
      "maxima_in_nucleus",
      "minima_in_nucleus",
      "maxima_in_cytoplasm",
      "minima_in_cytoplasm",
  };
  return names;
}

namespace {

std::string trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(trimmed(std::string_view(line).substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

}  // namespace

FeatureTable load_feature_table(const std::string& path, const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open feature table: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");

  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != schema.size() + 1) {
    throw ValidationError(path + ": header has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(schema.size() + 1) +
                          " (features + class)");
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (header[i] != schema[i]) {
      throw ValidationError(path + ": header column " + std::to_string(i + 1) + " is '" +
                            header[i] + "', expected '" + schema[i] + "'");
    }
  }
  if (header.back() != "class") {
    throw ValidationError(path + ": last header column must be 'class', got '" + header.back() +
                          "'");
  }

  FeatureTable table;
  table.column_names = schema;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != schema.size() + 1) {
      throw ValidationError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(schema.size() + 1));
    }
    Sample s;
    s.features.resize(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const std::string& f = fields[i];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ValidationError(path + ": row " + std::to_string(row) + ", column '" + schema[i] +
                              "': not a finite number: '" + f + "'");
      }
      s.features[i] = v;
    }
    const auto cls = parse_cell_class(fields.back());
    if (!cls) {
      throw ValidationError(path + ": row " + std::to_string(row) + ": unknown class '" +
                            fields.back() + "'");
    }
    s.cell_class = *cls;
    s.label = to_binary(*cls);
    table.add(std::move(s));
  }
  if (table.rows.empty()) throw ValidationError(path + ": no data rows");
  return table;
}

FeatureTable load_feature_table(const std::string& path) {
  return load_feature_table(path, herlev_column_names());
}

void save_feature_table(const FeatureTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write feature table: " + path);
  for (std::size_t i = 0; i < table.column_names.size(); ++i) {
    out << table.column_names[i] << ',';
  }
  out << "class\n";
  char buf[40];
  for (const Sample& s : table.rows) {
    for (double v : s.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << cell_class_name(s.cell_class) << '\n';
  }
  if (!out) throw RuntimeError("write failed: " + path);
}

namespace {

// One stratified stage: picks llround(total*fraction) indices, floor per
// stratum first, then the remainder one-by-one to strata by descending size.
// Keeps every stratum within one sample of its exact share.
void take_fraction(const std::vector<std::vector<std::size_t>>& strata, double fraction,
                   std::uint64_t seed, std::vector<std::size_t>* selected,
                   std::vector<std::size_t>* rest) {
  std::size_t total = 0;
  for (const auto& s : strata) total += s.size();
  const auto target =
      static_cast<std::size_t>(std::llround(static_cast<double>(total) * fraction));

  std::vector<std::size_t> want(strata.size());
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    want[s] = static_cast<std::size_t>(std::floor(static_cast<double>(strata[s].size()) * fraction));
    assigned += want[s];
  }
  std::vector<std::size_t> order(strata.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return strata[a].size() > strata[b].size(); });
  for (std::size_t i = 0; assigned < target; i = (i + 1) % order.size()) {
    const std::size_t s = order[i];
    if (want[s] < strata[s].size()) {
      ++want[s];
      ++assigned;
    }
  }

  for (std::size_t s = 0; s < strata.size(); ++s) {
    std::vector<std::size_t> pool = strata[s];
    Rng rng(derive_seed(seed, s));
    rng.shuffle(pool);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      (i < want[s] ? selected : rest)->push_back(pool[i]);
    }
  }
  std::sort(selected->begin(), selected->end());
  std::sort(rest->begin(), rest->end());
}

std::vector<std::vector<std::size_t>> group_by_label(const std::vector<BinaryLabel>& labels,
                                                     const std::vector<std::size_t>& subset,
                                                     bool stratified) {
  if (!stratified) return {subset};
  std::vector<std::vector<std::size_t>> strata(2);
  for (std::size_t i : subset) {
    strata[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return strata;
}

}  // namespace

IndexSplit stratified_split_indices(const std::vector<BinaryLabel>& labels,
                                    const SplitSpec& spec) {
  if (labels.empty()) throw ValidationError("cannot split an empty dataset");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw ValidationError("test_fraction must be in (0,1)");
  }
  if (!(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0)) {
    throw ValidationError("validation_fraction must be in (0,1)");
  }
  if (spec.stratified) {
    std::size_t abnormal = 0;
    for (BinaryLabel l : labels) abnormal += (l == BinaryLabel::Abnormal);
    if (abnormal == 0 || abnormal == labels.size()) {
      throw ValidationError("stratified split requires both labels present");
    }
  }

  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  IndexSplit out;
  std::vector<std::size_t> remaining;
  take_fraction(group_by_label(labels, all, spec.stratified), spec.test_fraction,
                derive_seed(spec.seed, 0x7e57), &out.test, &remaining);
  take_fraction(group_by_label(labels, remaining, spec.stratified), spec.validation_fraction,
                derive_seed(spec.seed, 0x5a11), &out.validation, &out.train);
  return out;
}

TableSplit stratified_split(const FeatureTable& table, const SplitSpec& spec) {
  const IndexSplit idx = stratified_split_indices(table.labels(), spec);
  auto materialize = [&](const std::vector<std::size_t>& indices) {
    FeatureTable t;
    t.column_names = table.column_names;
    for (std::size_t i : indices) t.add(table.rows[i]);
    return t;
  };
  return TableSplit{materialize(idx.train), materialize(idx.validation), materialize(idx.test)};
}

Scaler Scaler::fit(const FeatureTable& train, ScalerKind kind) {
  if (train.rows.empty()) throw ValidationError("cannot fit scaler on an empty table");
  const std::size_t d = train.n_features();
  Scaler sc;
  sc.kind_ = kind;
  sc.offset_.assign(d, 0.0);
  sc.scale_.assign(d, 1.0);
  sc.constant_.assign(d, 0);
  if (kind == ScalerKind::None) return sc;

  const double n = static_cast<double>(train.size());
  for (std::size_t j = 0; j < d; ++j) {
    if (kind == ScalerKind::ZScore) {
      double mean = 0.0;
      for (const Sample& s : train.rows) mean += s.features[j];
      mean /= n;
      double var = 0.0;
      for (const Sample& s : train.rows) {
        const double dlt = s.features[j] - mean;
        var += dlt * dlt;
      }
      var /= n;  // population variance
      const double sd = std::sqrt(var);
      sc.offset_[j] = mean;
      if (sd > 0.0) {
        sc.scale_[j] = sd;
      } else {
        sc.scale_[j] = 1.0;
        sc.constant_[j] = 1;
        std::fprintf(stderr, "warning: feature %zu ('%s') is constant; scale clamped to 1\n", j,
                     train.column_names[j].c_str());
      }
    } else {  // MinMax
      double lo = train.rows[0].features[j], hi = lo;
      for (const Sample& s : train.rows) {
        lo = std::min(lo, s.features[j]);
        hi = std::max(hi, s.features[j]);
      }
      sc.offset_[j] = lo;
      if (hi > lo) {
        sc.scale_[j] = hi - lo;
      } else {
        sc.scale_[j] = 1.0;
        sc.constant_[j] = 1;
      }
    }
  }
  return sc;
}

std::vector<double> Scaler::transform(std::span<const double> x) const {
  if (x.size() != offset_.size()) throw ValidationError("scaler dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - offset_[j]) / scale_[j];
  return out;
}

std::vector<double> Scaler::inverse(std::span<const double> x) const {
  if (x.size() != offset_.size()) throw ValidationError("scaler dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] * scale_[j] + offset_[j];
  return out;
}

FeatureTable Scaler::transform(const FeatureTable& table) const {
  FeatureTable out;
  out.column_names = table.column_names;
  for (const Sample& s : table.rows) {
    Sample t = s;
    t.features = transform(s.features);
    out.add(std::move(t));
  }
  return out;
}

bool Scaler::had_constant_feature() const {
  return std::any_of(constant_.begin(), constant_.end(), [](std::uint8_t f) { return f != 0; });
}

Scaler Scaler::from_parts(ScalerKind kind, std::vector<double> offset, std::vector<double> scale,
                          std::vector<std::uint8_t> constant) {
  if (offset.size() != scale.size() || offset.size() != constant.size()) {
    throw ValidationError("scaler parts have mismatched sizes");
  }
  Scaler sc;
  sc.kind_ = kind;
  sc.offset_ = std::move(offset);
  sc.scale_ = std::move(scale);
  sc.constant_ = std::move(constant);
  return sc;
}

std::string_view scaler_kind_name(ScalerKind kind) {
  switch (kind) {
    case ScalerKind::ZScore: return "zscore";
    case ScalerKind::MinMax: return "minmax";
    case ScalerKind::None: return "none";
  }
  return "none";
}

FeatureTable synth_blobs(std::size_t n_per_class, std::size_t dims, double separation,
                         std::uint64_t seed) {
  if (n_per_class < 1) throw ValidationError("synth_blobs: n_per_class must be >= 1");
  if (dims < 1) throw ValidationError("synth_blobs: dims must be >= 1");

  FeatureTable table;
  table.column_names.reserve(dims);
  for (std::size_t j = 0; j < dims; ++j) table.column_names.push_back("x" + std::to_string(j));

  Rng rng(seed);
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    const bool abnormal = i >= n_per_class;
    Sample s;
    s.cell_class = abnormal ? CellClass::SevereDysplasia : CellClass::IntermediateSquamous;
    s.label = to_binary(s.cell_class);
    s.features.resize(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      s.features[j] = rng.gaussian() + (abnormal ? separation : 0.0);
    }
    table.add(std::move(s));
  }
  return table;
}

}  // namespace papml
