// papml: train, evaluate, and benchmark cervical-cell classifiers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "papml/bench/runner.hpp"
#include "papml/common.hpp"
#include "papml/parallel.hpp"
#include "papml/surrogate.hpp"

namespace {

using namespace papml;
namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool repro = false;
  std::size_t threads = 0;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig config =
      args.config_path.empty() ? default_config() : load_config(args.config_path);
  if (args.seed_set) {
    config.split.seed = args.seed;
    config.cnn.seed = args.seed;
  }
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.repro) config.repro = true;
  if (args.threads > 0) set_thread_count(args.threads);
  return config;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (INI)");
  cmd->add_option("--out", args.out_dir, "output directory override");
  cmd->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_flag("--repro", args.repro, "deterministic reports (wall clocks zeroed)");
  cmd->add_option("--threads", args.threads, "worker thread cap (0 = all cores)");
}

int cmd_ingest(const CommonArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  const FeatureTable table = load_feature_table(config.features_csv);
  std::printf("features: %s\n", config.features_csv.c_str());
  std::printf("rows: %zu  columns: %zu  classes: %zu\n", table.size(), table.n_features(),
              table.distinct_classes());
  for (CellClass c : all_cell_classes) {
    std::printf("  %-34s %4zu  (%s)\n", std::string(cell_class_name(c)).c_str(),
                table.class_counts[static_cast<std::size_t>(c)],
                std::string(label_name(to_binary(c))).c_str());
  }
  std::printf("labels: %zu normal / %zu abnormal\n", table.count(BinaryLabel::Normal),
              table.count(BinaryLabel::Abnormal));
  if (!config.images_dir.empty()) {
    const ImageDataset images = load_image_dir(config.images_dir, config.cnn.image_size);
    std::printf("images: %zu at %zux%zux3\n", images.size(), config.cnn.image_size,
                config.cnn.image_size);
  }
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& model_name) {
  const ExperimentConfig config = resolve_config(args);
  fs::create_directories(config.out_dir);

  if (model_name == "cnn") {
    const ImageDataset images = load_image_dir(config.images_dir, config.cnn.image_size);
    TrainResult result = train_cnn(config.cnn, images);
    const fs::path model_path = fs::path(config.out_dir) / "model.papnet";
    save_network(result.network, model_path.string());
    result.history.to_csv((fs::path(config.out_dir) / "history.csv").string());
    const EvalStats val = evaluate_cnn(result.network, images, result.split.validation,
                                       config.cnn.batch_size);
    std::printf("cnn trained: best epoch %zu, validation accuracy %.4f\n", result.best_epoch,
                val.accuracy);
    std::printf("saved %s\n", model_path.string().c_str());
    return 0;
  }

  const auto kind = parse_kind(model_name);
  if (!kind) throw ValidationError("unknown model: " + model_name);
  const FeatureTable table = load_feature_table(config.features_csv);
  const TableSplit split = stratified_split(table, config.split);
  FeatureTable fit_rows = split.train;
  for (const Sample& s : split.validation.rows) fit_rows.add(s);

  ClassifierSpec spec{*kind, {}};
  const auto it = config.overrides.find(*kind);
  if (it != config.overrides.end()) spec.params = it->second;
  const Classifier clf = Classifier::fit(spec, fit_rows);

  const fs::path model_path =
      fs::path(config.out_dir) / ("model_" + std::string(kind_name(*kind)) + ".json");
  save_classifier(clf, model_path.string());
  const MetricsReport metrics = compute_metrics(confusion(clf.predict(split.test), split.test.labels()));
  std::printf("%s trained on %zu rows\n", std::string(kind_display_name(*kind)).c_str(),
              fit_rows.size());
  std::printf("test metrics: %s\n", metrics.to_json().dump().c_str());
  std::printf("saved %s\n", model_path.string().c_str());
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& model_file) {
  const ExperimentConfig config = resolve_config(args);
  const FeatureTable table = load_feature_table(config.features_csv);
  const TableSplit split = stratified_split(table, config.split);
  const Classifier clf = load_classifier(model_file);
  const MetricsReport metrics =
      compute_metrics(confusion(clf.predict(split.test), split.test.labels()));
  std::printf("%s\n", metrics.to_json().dump(2).c_str());
  return 0;
}

int cmd_bench(const CommonArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  const ComparisonTable table = run_benchmark(config);
  std::printf("%s", table.render_markdown().c_str());
  std::printf("artifacts in %s\n", config.out_dir.c_str());
  return 0;
}

int cmd_grid_search(const CommonArgs& args, const std::string& model_name, std::size_t folds,
                    std::size_t max_trials, double timeout, bool sequential) {
  const ExperimentConfig config = resolve_config(args);
  const auto kind = parse_kind(model_name);
  if (!kind) throw ValidationError("unknown model: " + model_name);
  const auto it = config.grids.find(*kind);
  if (it == config.grids.end() || it->second.axes.empty()) {
    throw ValidationError("config has no [grid_" + std::string(kind_name(*kind)) +
                          "] section with axes");
  }
  const FeatureTable table = load_feature_table(config.features_csv);

  SearchOptions options;
  options.folds = folds;
  options.seed = config.split.seed;
  options.parallel = !sequential;
  options.max_trials = max_trials;
  options.trial_timeout_seconds = timeout;
  options.record_times = !config.repro;
  const SearchReport report = search(it->second, table, *kind, options);

  fs::create_directories(config.out_dir);
  std::ofstream csv(fs::path(config.out_dir) / "search.csv");
  csv << report.to_csv();
  std::ofstream js(fs::path(config.out_dir) / "search.json");
  js << report.to_json().dump(2) << "\n";

  std::printf("%zu trials in %.2fs; best %s: ", report.leaderboard.size(),
              report.total_seconds, std::string(kind_name(*kind)).c_str());
  for (const auto& [name, value] : report.best.params) std::printf("%s=%g ", name.c_str(), value);
  std::printf("(mean accuracy %.4f)\n", report.leaderboard.front().mean_accuracy);
  return 0;
}

int cmd_gradcheck() {
  Network net = build_gradcheck_net(8, 3);
  init_weights(net, 7);
  std::printf("%s", net.describe({4, 8, 8, 3}).c_str());

  Rng rng(11);
  Tensor input({4, 8, 8, 3});
  for (std::size_t i = 0; i < input.size(); ++i) input[i] = rng.uniform();
  const std::vector<double> targets = {1.0, 0.0, 1.0, 0.0};
  const double err = grad_check(net, input, targets);
  std::printf("gradcheck max relative error: %.3e (tolerance 1e-4)\n", err);
  return err < 1e-4 ? 0 : 1;
}

int cmd_synth_data(const std::string& csv_path, const std::string& images_dir,
                   std::uint64_t seed, std::size_t image_size, double scale) {
  if (csv_path.empty() && images_dir.empty()) {
    throw ValidationError("synth-data: give --csv and/or --images");
  }
  if (!csv_path.empty()) {
    const FeatureTable table = surrogate_feature_table(seed);
    if (const fs::path parent = fs::path(csv_path).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    save_feature_table(table, csv_path);
    std::printf("wrote %zu rows to %s\n", table.size(), csv_path.c_str());
  }
  if (!images_dir.empty()) {
    write_surrogate_images(images_dir, seed, image_size, scale);
    std::printf("wrote image tree under %s\n", images_dir.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cervical-cell classification benchmark"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string model_name, model_file;
  std::string synth_csv, synth_images;
  std::uint64_t synth_seed = 1;
  std::size_t synth_size = 64;
  double synth_scale = 1.0;
  std::size_t folds = 5, max_trials = 0;
  double timeout = 0.0;
  bool sequential = false;

  CLI::App* ingest = app.add_subcommand("ingest", "validate a dataset and print a summary");
  add_common(ingest, args);

  CLI::App* train = app.add_subcommand("train", "train one model and save it");
  add_common(train, args);
  train->add_option("--model", model_name, "logreg|knn|svm|gnb|dtree|rforest|gboost|cnn")
      ->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "metrics of a saved model on the test split");
  add_common(evaluate, args);
  evaluate->add_option("--model-file", model_file, "saved model (JSON)")->required();

  CLI::App* bench = app.add_subcommand("bench", "run the full comparison");
  add_common(bench, args);

  CLI::App* grid = app.add_subcommand("grid-search", "cross-validated hyperparameter search");
  add_common(grid, args);
  grid->add_option("--model", model_name, "classifier kind")->required();
  grid->add_option("--folds", folds, "cross-validation folds");
  grid->add_option("--max-trials", max_trials, "cap on grid trials (0 = all)");
  grid->add_option("--timeout", timeout, "per-trial timeout in seconds (0 = none)");
  grid->add_flag("--sequential", sequential, "disable parallel trials");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of the network gradients");
  (void)gradcheck;

  CLI::App* synth = app.add_subcommand("synth-data", "generate the surrogate dataset");
  synth->add_option("--csv", synth_csv, "output feature CSV path");
  synth->add_option("--images", synth_images, "output image tree root");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--image-size", synth_size, "square image size");
  synth->add_option("--scale", synth_scale, "class count scale in (0,1]");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(ingest)) return cmd_ingest(args);
    if (app.got_subcommand(train)) return cmd_train(args, model_name);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(args, model_file);
    if (app.got_subcommand(bench)) return cmd_bench(args);
    if (app.got_subcommand(grid)) {
      return cmd_grid_search(args, model_name, folds, max_trials, timeout, sequential);
    }
    if (app.got_subcommand(gradcheck)) return cmd_gradcheck();
    if (app.got_subcommand(synth)) {
      return cmd_synth_data(synth_csv, synth_images, synth_seed, synth_size, synth_scale);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse failure
    return code == 0 ? 0 : 1;
  } catch (const papml::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}
