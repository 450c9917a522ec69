#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "papml/labels.hpp"

namespace papml {

struct Sample {
  std::vector<double> features;
  CellClass cell_class = CellClass::SuperficialSquamous;
  BinaryLabel label = BinaryLabel::Normal;
};

// Immutable after load; shareable across threads.
struct FeatureTable {
  std::vector<std::string> column_names;  // feature columns only
  std::vector<Sample> rows;
  std::array<std::size_t, kNumCellClasses> class_counts{};

  std::size_t size() const { return rows.size(); }
  std::size_t n_features() const { return column_names.size(); }
  std::size_t count(BinaryLabel l) const;
  std::size_t distinct_classes() const;
  std::vector<BinaryLabel> labels() const;

  // Validates width, finiteness, and label/class consistency; keeps
  // class_counts in sync.
  void add(Sample s);
};

// The 20 morphology columns of the Herlev feature table. The source data
// documents the feature families (areas, ratio, brightness, diameters,
// elongation, roundness, perimeter, position, extrema counts); this fixes
// names and order for the CSV schema.
const std::vector<std::string>& herlev_column_names();

// CSV with a header of `schema` columns plus a final "class" column.
// Row errors are reported with their 1-based data row number.
FeatureTable load_feature_table(const std::string& path, const std::vector<std::string>& schema);
FeatureTable load_feature_table(const std::string& path);  // schema = herlev_column_names()

void save_feature_table(const FeatureTable& table, const std::string& path);

struct SplitSpec {
  double test_fraction = 0.15;
  double validation_fraction = 0.15;  // of the training portion
  std::uint64_t seed = 0;
  bool stratified = true;

  bool operator==(const SplitSpec&) const = default;
};

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct TableSplit {
  FeatureTable train;
  FeatureTable validation;
  FeatureTable test;
};

// Disjoint and exhaustive. Per-stratum counts are floor(n*fraction) with the
// remainder dealt to strata by descending size, so each stratum is within
// one sample of its exact share. Deterministic per seed.
IndexSplit stratified_split_indices(const std::vector<BinaryLabel>& labels, const SplitSpec& spec);

TableSplit stratified_split(const FeatureTable& table, const SplitSpec& spec);

enum class ScalerKind { ZScore, MinMax, None };

// Per-feature affine transform x' = (x - offset) / scale fitted on training
// rows only. ZScore uses population statistics; a constant feature gets
// scale 1 and raises the warning flag instead of dividing by zero.
class Scaler {
 public:
  Scaler() = default;

  static Scaler fit(const FeatureTable& train, ScalerKind kind);

  std::vector<double> transform(std::span<const double> x) const;
  std::vector<double> inverse(std::span<const double> x) const;
  FeatureTable transform(const FeatureTable& table) const;

  ScalerKind kind() const { return kind_; }
  std::size_t n_features() const { return offset_.size(); }
  bool had_constant_feature() const;
  const std::vector<std::uint8_t>& constant_flags() const { return constant_; }
  const std::vector<double>& offsets() const { return offset_; }
  const std::vector<double>& scales() const { return scale_; }

  static Scaler from_parts(ScalerKind kind, std::vector<double> offset, std::vector<double> scale,
                           std::vector<std::uint8_t> constant);

 private:
  ScalerKind kind_ = ScalerKind::None;
  std::vector<double> offset_;
  std::vector<double> scale_;
  std::vector<std::uint8_t> constant_;
};

std::string_view scaler_kind_name(ScalerKind kind);

// Two Gaussian blobs (normal at 0, abnormal at `separation` along every
// axis, unit variance). Test fixture data.
FeatureTable synth_blobs(std::size_t n_per_class, std::size_t dims, double separation,
                         std::uint64_t seed);

}  // namespace papml
