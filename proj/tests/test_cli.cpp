#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "papml/dataset.hpp"
#include "papml/surrogate.hpp"

using namespace papml;
using papml::testutil::temp_dir;
using papml::testutil::write_file;

namespace {

std::string binary() {
  const char* bin = std::getenv("PAPML_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "PAPML_BIN must point at the papml binary (set by ctest)");
  return bin;
}

int run(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = binary() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::filesystem::path small_csv(const std::filesystem::path& dir) {
  const FeatureTable full = surrogate_feature_table(3);
  FeatureTable small;
  small.column_names = full.column_names;
  for (std::size_t i = 0; i < full.size(); i += 6) small.add(full.rows[i]);
  const auto path = dir / "small.csv";
  save_feature_table(small, path.string());
  return path;
}

std::filesystem::path config_for(const std::filesystem::path& dir,
                                 const std::filesystem::path& csv) {
  return write_file(dir / "config.ini", "[data]\nfeatures_csv = " + csv.string() +
                                            "\n\n[split]\nseed = 5\n\n[bench]\nmodels = "
                                            "knn,gnb\nout_dir = " +
                                            (dir / "out").string() + "\n\n[cnn]\nenabled = false\n");
}

}  // namespace

TEST_CASE("ingest validates a dataset and reports row-level problems with exit 1") {
  const auto dir = temp_dir("cli_ingest");
  const auto csv = small_csv(dir);
  const auto config = config_for(dir, csv);

  CHECK(run("ingest --config " + config.string(), dir / "ok.log") == 0);
  const std::string ok_log = slurp(dir / "ok.log");
  CHECK(ok_log.find("rows: 153") != std::string::npos);

  // a 19-column row must name its row number and exit 1
  std::string bad;
  for (const auto& name : herlev_column_names()) bad += name + ",";
  bad += "class\n";
  for (int i = 0; i < 19; ++i) bad += "1,";
  bad += "mild_dysplasia\n";
  const auto bad_csv = write_file(dir / "bad.csv", bad);
  const auto bad_config = config_for(dir, bad_csv);
  CHECK(run("ingest --config " + bad_config.string(), dir / "bad.log") == 1);
  const std::string bad_log = slurp(dir / "bad.log");
  CHECK(bad_log.find("row 1") != std::string::npos);
}

TEST_CASE("unknown subcommands and flags exit 1 with usage text") {
  const auto dir = temp_dir("cli_usage");
  CHECK(run("frobnicate", dir / "a.log") == 1);
  CHECK(run("ingest --no-such-flag", dir / "b.log") == 1);
  CHECK(run("--help", dir / "c.log") == 0);
  const std::string help = slurp(dir / "c.log");
  CHECK(help.find("bench") != std::string::npos);
  CHECK(help.find("grid-search") != std::string::npos);
}

TEST_CASE("gradcheck prints the max relative error and exits 0 under tolerance") {
  const auto dir = temp_dir("cli_grad");
  CHECK(run("gradcheck", dir / "grad.log") == 0);
  const std::string log = slurp(dir / "grad.log");
  CHECK(log.find("max relative error") != std::string::npos);
  CHECK(log.find("conv2d") != std::string::npos);  // shape walk is printed
}

TEST_CASE("train then evaluate round-trips a saved model") {
  const auto dir = temp_dir("cli_train");
  const auto csv = small_csv(dir);
  const auto config = config_for(dir, csv);

  CHECK(run("train --model knn --config " + config.string(), dir / "train.log") == 0);
  const auto model_file = dir / "out" / "model_knn.json";
  CHECK(std::filesystem::exists(model_file));

  CHECK(run("evaluate --model-file " + model_file.string() + " --config " + config.string(),
            dir / "eval.log") == 0);
  const std::string eval_log = slurp(dir / "eval.log");
  CHECK(eval_log.find("accuracy") != std::string::npos);

  CHECK(run("evaluate --model-file " + (dir / "missing.json").string() + " --config " +
                config.string(),
            dir / "eval2.log") == 1);
}

TEST_CASE("grid-search writes search artifacts and honors --sequential") {
  const auto dir = temp_dir("cli_grid");
  const auto csv = small_csv(dir);
  const auto config = write_file(
      dir / "grid.ini", "[data]\nfeatures_csv = " + csv.string() +
                            "\n\n[split]\nseed = 5\n\n[bench]\nout_dir = " + (dir / "gs").string() +
                            "\n\n[cnn]\nenabled = false\n\n[grid_knn]\nk = 1,3,5\np = 1,2\n");
  CHECK(run("grid-search --model knn --config " + config.string() + " --sequential",
            dir / "gs.log") == 0);
  CHECK(std::filesystem::exists(dir / "gs" / "search.csv"));
  CHECK(std::filesystem::exists(dir / "gs" / "search.json"));
  const std::string log = slurp(dir / "gs.log");
  CHECK(log.find("6 trials") != std::string::npos);

  CHECK(run("grid-search --model svm --config " + config.string(), dir / "gs2.log") == 1);
}

TEST_CASE("synth-data generates a loadable csv and image tree") {
  const auto dir = temp_dir("cli_synth");
  CHECK(run("synth-data --csv " + (dir / "t.csv").string() + " --images " +
                (dir / "imgs").string() + " --seed 4 --image-size 16 --scale 0.02",
            dir / "synth.log") == 0);
  const FeatureTable t = load_feature_table((dir / "t.csv").string());
  CHECK(t.size() == 917);
  const ImageDataset images = load_image_dir((dir / "imgs").string(), 16);
  CHECK(images.size() >= 14);

  CHECK(run("synth-data", dir / "synth2.log") == 1);  // needs --csv or --images
}
