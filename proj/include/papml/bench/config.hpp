#pragma once

#include <map>
#include <string>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"
#include "papml/nn/train.hpp"
#include "papml/tuning.hpp"

namespace papml {

// A full benchmark run, read from a flat INI-style file with one section
// per module. Unknown sections or keys are errors, so misspelled
// hyperparameters cannot silently fall back to defaults.
struct ExperimentConfig {
  std::string features_csv;
  std::string images_dir;
  SplitSpec split;
  std::vector<ClassifierKind> models;          // classical models to run, canonical order
  std::map<ClassifierKind, Params> overrides;  // per-model hyperparameters
  bool cnn_enabled = true;
  CnnConfig cnn;  // fractions and seed mirror [split] at load time
  std::map<ClassifierKind, ParamGrid> grids;   // grid-search axes per model
  std::string out_dir = "runs/latest";
  std::vector<std::string> formats = {"markdown", "csv", "json"};
  bool repro = false;  // zero wall clocks so reports are byte-reproducible

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig default_config();

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse(render(c)) == c.
std::string render_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

// FNV-1a of the canonical text, as fixed-width hex.
std::string config_hash(const ExperimentConfig& config);

}  // namespace papml
