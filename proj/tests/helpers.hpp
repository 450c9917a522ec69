#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "papml/dataset.hpp"
#include "papml/rng.hpp"

namespace papml::testutil {

inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("papml_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path;
}

// random binary-labeled table with the given label counts
inline FeatureTable random_table(std::size_t n_normal, std::size_t n_abnormal, std::size_t dims,
                                 std::uint64_t seed) {
  FeatureTable t;
  for (std::size_t j = 0; j < dims; ++j) t.column_names.push_back("x" + std::to_string(j));
  Rng rng(seed);
  for (std::size_t i = 0; i < n_normal + n_abnormal; ++i) {
    Sample s;
    s.cell_class = i < n_normal ? CellClass::Columnar : CellClass::MildDysplasia;
    s.label = to_binary(s.cell_class);
    s.features.resize(dims);
    for (auto& f : s.features) f = rng.gaussian();
    t.add(std::move(s));
  }
  return t;
}

}  // namespace papml::testutil
