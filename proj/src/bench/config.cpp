#include "papml/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "papml/common.hpp"

namespace papml {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parse_number(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ValidationError("config key '" + key + "': not a number: '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::string format_number(double v) {
  if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.features_csv = "data/herlev_surrogate.csv";
  c.split.seed = 42;
  for (std::size_t i = 0; i < kNumClassifierKinds; ++i) {
    c.models.push_back(static_cast<ClassifierKind>(i));
  }
  c.cnn.seed = c.split.seed;
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig c;
  c.models.clear();
  c.formats.clear();

  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_models = false, saw_formats = false;

  auto fail = [&](const std::string& message) -> void {
    throw ValidationError(origin + ":" + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = section == "data" || section == "split" || section == "bench" ||
                         section == "cnn" || parse_kind(section).has_value() ||
                         (section.starts_with("grid_") &&
                          parse_kind(section.substr(5)).has_value());
      if (!known) fail("unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail("key outside any section");

    if (section == "data") {
      if (key == "features_csv") c.features_csv = value;
      else if (key == "images_dir") c.images_dir = value;
      else fail("unknown key '" + key + "' in [data]");
    } else if (section == "split") {
      if (key == "test_fraction") c.split.test_fraction = parse_number(key, value);
      else if (key == "validation_fraction") c.split.validation_fraction = parse_number(key, value);
      else if (key == "seed") c.split.seed = static_cast<std::uint64_t>(parse_number(key, value));
      else if (key == "stratified") c.split.stratified = parse_bool(key, value);
      else fail("unknown key '" + key + "' in [split]");
    } else if (section == "bench") {
      if (key == "models") {
        saw_models = true;
        for (const std::string& name : split_list(value)) {
          const auto kind = parse_kind(name);
          if (!kind) fail("unknown model '" + name + "'");
          c.models.push_back(*kind);
        }
      } else if (key == "formats") {
        saw_formats = true;
        for (const std::string& f : split_list(value)) {
          if (f != "markdown" && f != "csv" && f != "json") fail("unknown format '" + f + "'");
          c.formats.push_back(f);
        }
      } else if (key == "out_dir") {
        c.out_dir = value;
      } else if (key == "repro") {
        c.repro = parse_bool(key, value);
      } else {
        fail("unknown key '" + key + "' in [bench]");
      }
    } else if (section == "cnn") {
      if (key == "enabled") c.cnn_enabled = parse_bool(key, value);
      else if (key == "image_size") c.cnn.image_size = static_cast<std::size_t>(parse_number(key, value));
      else if (key == "conv_layers") c.cnn.conv_layers = static_cast<std::size_t>(parse_number(key, value));
      else if (key == "dropout") c.cnn.dropout_rate = parse_number(key, value);
      else if (key == "epochs") c.cnn.epochs = static_cast<std::size_t>(parse_number(key, value));
      else if (key == "batch_size") c.cnn.batch_size = static_cast<std::size_t>(parse_number(key, value));
      else if (key == "learning_rate") c.cnn.learning_rate = parse_number(key, value);
      else if (key == "dense_units") c.cnn.dense_units = static_cast<std::size_t>(parse_number(key, value));
      else fail("unknown key '" + key + "' in [cnn]");
    } else if (section.starts_with("grid_")) {
      const ClassifierKind kind = *parse_kind(section.substr(5));
      const auto schema = param_schema(kind);
      const bool known = std::any_of(schema.begin(), schema.end(),
                                     [&](const ParamInfo& i) { return key == i.name; });
      if (!known) fail("'" + key + "' is not a parameter of " + std::string(kind_name(kind)));
      std::vector<double> values;
      for (const std::string& v : split_list(value)) values.push_back(parse_number(key, v));
      if (values.empty()) fail("empty axis '" + key + "'");
      c.grids[kind].axes[key] = std::move(values);
    } else {
      const ClassifierKind kind = *parse_kind(section);
      const auto schema = param_schema(kind);
      const bool known = std::any_of(schema.begin(), schema.end(),
                                     [&](const ParamInfo& i) { return key == i.name; });
      if (!known) fail("'" + key + "' is not a parameter of " + std::string(kind_name(kind)));
      c.overrides[kind][key] = parse_number(key, value);
    }
  }

  if (!saw_models) {
    for (std::size_t i = 0; i < kNumClassifierKinds; ++i) {
      c.models.push_back(static_cast<ClassifierKind>(i));
    }
  }
  if (!saw_formats) c.formats = {"markdown", "csv", "json"};

  // the CNN trains under the shared split policy and seed
  c.cnn.test_fraction = c.split.test_fraction;
  c.cnn.validation_fraction = c.split.validation_fraction;
  c.cnn.seed = c.split.seed;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string render_config(const ExperimentConfig& c) {
  std::string out;
  out += "[data]\n";
  out += "features_csv = " + c.features_csv + "\n";
  out += "images_dir = " + c.images_dir + "\n\n";

  out += "[split]\n";
  out += "test_fraction = " + format_number(c.split.test_fraction) + "\n";
  out += "validation_fraction = " + format_number(c.split.validation_fraction) + "\n";
  out += "seed = " + std::to_string(c.split.seed) + "\n";
  out += std::string("stratified = ") + (c.split.stratified ? "true" : "false") + "\n\n";

  out += "[bench]\n";
  out += "models = ";
  for (std::size_t i = 0; i < c.models.size(); ++i) {
    if (i) out += ",";
    out += kind_name(c.models[i]);
  }
  out += "\n";
  out += "formats = ";
  for (std::size_t i = 0; i < c.formats.size(); ++i) {
    if (i) out += ",";
    out += c.formats[i];
  }
  out += "\n";
  out += "out_dir = " + c.out_dir + "\n";
  out += std::string("repro = ") + (c.repro ? "true" : "false") + "\n\n";

  out += "[cnn]\n";
  out += std::string("enabled = ") + (c.cnn_enabled ? "true" : "false") + "\n";
  out += "image_size = " + std::to_string(c.cnn.image_size) + "\n";
  out += "conv_layers = " + std::to_string(c.cnn.conv_layers) + "\n";
  out += "dropout = " + format_number(c.cnn.dropout_rate) + "\n";
  out += "epochs = " + std::to_string(c.cnn.epochs) + "\n";
  out += "batch_size = " + std::to_string(c.cnn.batch_size) + "\n";
  out += "learning_rate = " + format_number(c.cnn.learning_rate) + "\n";
  out += "dense_units = " + std::to_string(c.cnn.dense_units) + "\n";

  for (const auto& [kind, params] : c.overrides) {
    if (params.empty()) continue;
    out += "\n[" + std::string(kind_name(kind)) + "]\n";
    for (const auto& [name, value] : params) {
      out += name + " = " + format_number(value) + "\n";
    }
  }
  for (const auto& [kind, grid] : c.grids) {
    if (grid.axes.empty()) continue;
    out += "\n[grid_" + std::string(kind_name(kind)) + "]\n";
    for (const auto& [name, values] : grid.axes) {
      out += name + " = ";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_number(values[i]);
      }
      out += "\n";
    }
  }
  return out;
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write config: " + path);
  out << render_config(config);
  if (!out) throw RuntimeError("write failed: " + path);
}

std::string config_hash(const ExperimentConfig& config) {
  // identify the experiment: where the report lands and which formats are
  // rendered do not change the numbers
  ExperimentConfig canonical = config;
  canonical.out_dir.clear();
  canonical.formats.clear();
  const std::string text = render_config(canonical);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace papml
