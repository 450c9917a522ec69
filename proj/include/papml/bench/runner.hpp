#pragma once

#include "papml/bench/config.hpp"
#include "papml/bench/table.hpp"

namespace papml {

// Full comparison run: one shared stratified split, every enabled classical
// model fit and scored on the test rows, the CNN (when enabled) trained per
// its config and scored on its train and test splits. A model failure marks
// its column and the run continues. Artifacts (report.*, run.json,
// history.csv) land in config.out_dir.
ComparisonTable run_benchmark(const ExperimentConfig& config);

// Re-render report files from a persisted run.json, byte-identical to the
// original run's output.
void rerender_run(const std::string& run_json_path, const std::string& out_dir,
                  const std::vector<std::string>& formats);

}  // namespace papml
