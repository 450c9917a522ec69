#include "papml/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "papml/common.hpp"
#include "papml/rng.hpp"

namespace papml {

namespace {

// severity latent per class; dysplasia grades sit close enough to overlap
constexpr std::array<double, kNumCellClasses> kSeverity = {0.02, 0.10, 0.28,
                                                           0.48, 0.63, 0.78, 0.88};
constexpr double kLatentNoise = 0.22;

// the rendered cells separate better than the tabular morphology, matching
// the published gap between image and feature accuracy
constexpr double kImageLatentNoise = 0.11;

// columnar cells carry little cytoplasm, which drags their area ratios
// toward the dysplastic range and keeps the boundary nonlinear
constexpr double kColumnarCytoShrink = 0.55;

double clampd(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double lognoise(Rng& rng, double sigma) { return std::exp(rng.gaussian(0.0, sigma)); }

// Ramanujan approximation of an ellipse perimeter
double ellipse_perimeter(double a, double b) {
  return 3.14159265358979323846 * (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
}

struct CellGeometry {
  double t;                  // realized severity
  double nucleus_area;
  double cytoplasm_area;     // cytoplasm-only area
  double nucleus_elong;
  double cell_elong;
};

CellGeometry draw_geometry(CellClass cls, Rng& rng, double latent_noise = kLatentNoise) {
  CellGeometry g;
  g.t = clampd(kSeverity[static_cast<std::size_t>(cls)] + rng.gaussian(0.0, latent_noise), 0.0,
               1.1);
  const double cyto_shrink = cls == CellClass::Columnar ? kColumnarCytoShrink : 1.0;
  g.nucleus_area = (180.0 + 2600.0 * std::pow(g.t, 1.4)) * lognoise(rng, 0.42);
  g.cytoplasm_area =
      std::max(350.0, 6500.0 * cyto_shrink * (1.0 - 0.60 * g.t) * lognoise(rng, 0.38));
  g.nucleus_elong = 1.0 + std::abs(rng.gaussian(0.0, 0.18 + 0.20 * g.t));
  g.cell_elong = 1.0 + std::abs(rng.gaussian(0.0, 0.15 + 0.10 * g.t));
  return g;
}

std::vector<double> draw_features(const CellGeometry& g, Rng& rng) {
  const double t = g.t;
  const double na = g.nucleus_area;
  const double ca = g.cytoplasm_area;

  const double n_deq = 2.0 * std::sqrt(na / 3.14159265358979323846);
  const double n_short = n_deq / std::sqrt(g.nucleus_elong) * lognoise(rng, 0.06);
  const double n_long = n_deq * std::sqrt(g.nucleus_elong) * lognoise(rng, 0.06);

  const double cell_area = na + ca;
  const double c_deq = 2.0 * std::sqrt(cell_area / 3.14159265358979323846);
  const double c_short = c_deq / std::sqrt(g.cell_elong) * lognoise(rng, 0.06);
  const double c_long = c_deq * std::sqrt(g.cell_elong) * lognoise(rng, 0.06);

  std::vector<double> f(20);
  f[0] = na;                                                   // nucleus_area
  f[1] = ca;                                                   // cytoplasm_area
  f[2] = na / cell_area * lognoise(rng, 0.05);                 // nc_ratio
  f[3] = clampd(155.0 - 75.0 * t + rng.gaussian(0.0, 24.0), 15.0, 250.0);
  f[4] = clampd(195.0 - 28.0 * t + rng.gaussian(0.0, 22.0), 40.0, 255.0);
  f[5] = n_short;
  f[6] = n_long;
  f[7] = n_long / n_short * lognoise(rng, 0.04);               // nucleus_elongation
  f[8] = clampd(4.0 * na / (3.14159265358979323846 * n_long * n_long) * lognoise(rng, 0.08),
                0.05, 1.05);                                   // nucleus_roundness
  f[9] = c_short;
  f[10] = c_long;
  f[11] = c_long / c_short * lognoise(rng, 0.04);              // cytoplasm_elongation
  f[12] = clampd(4.0 * cell_area / (3.14159265358979323846 * c_long * c_long) *
                     lognoise(rng, 0.08),
                 0.05, 1.05);                                  // cytoplasm_roundness
  f[13] = ellipse_perimeter(n_long / 2.0, n_short / 2.0) * lognoise(rng, 0.05);
  f[14] = ellipse_perimeter(c_long / 2.0, c_short / 2.0) * lognoise(rng, 0.05);
  f[15] = clampd(std::abs(rng.gaussian(0.0, 0.10 + 0.18 * t)), 0.0, 1.0);
  f[16] = std::floor(clampd(1.0 + 9.0 * t * lognoise(rng, 0.7) + std::abs(rng.gaussian(0.0, 2.2)),
                            0.0, 40.0));                       // maxima_in_nucleus
  f[17] = std::floor(clampd(0.5 + 6.0 * t * lognoise(rng, 0.8) + std::abs(rng.gaussian(0.0, 2.2)),
                            0.0, 30.0));                       // minima_in_nucleus
  f[18] = std::floor(clampd(2.0 + 3.0 * t + rng.gaussian(0.0, 2.2), 0.0, 20.0));
  f[19] = std::floor(clampd(1.5 + 2.0 * t + rng.gaussian(0.0, 2.0), 0.0, 15.0));
  return f;
}

}  // namespace

FeatureTable surrogate_feature_table(std::uint64_t seed) {
  FeatureTable table;
  table.column_names = herlev_column_names();
  Rng rng(derive_seed(seed, 0x5a77));
  for (std::size_t c = 0; c < kNumCellClasses; ++c) {
    const CellClass cls = all_cell_classes[c];
    for (std::size_t i = 0; i < kHerlevClassCounts[c]; ++i) {
      Sample s;
      s.cell_class = cls;
      s.label = to_binary(cls);
      s.features = draw_features(draw_geometry(cls, rng), rng);
      table.add(std::move(s));
    }
  }
  return table;
}

namespace {

struct Ellipse {
  double cx, cy, rx, ry, theta;

  // < 1 inside, grows outward
  double q(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    const double c = std::cos(theta), s = std::sin(theta);
    const double u = (dx * c + dy * s) / rx;
    const double v = (-dx * s + dy * c) / ry;
    return u * u + v * v;
  }

  // 2x2 supersampled coverage of the pixel at (x, y)
  double coverage(double x, double y) const {
    double cov = 0.0;
    for (double ox : {0.25, 0.75}) {
      for (double oy : {0.25, 0.75}) {
        cov += q(x + ox, y + oy) <= 1.0 ? 0.25 : 0.0;
      }
    }
    return cov;
  }
};

}  // namespace

ImageDataset surrogate_image_set(std::uint64_t seed, std::size_t image_size,
                                 double counts_scale) {
  if (image_size < 8) throw ValidationError("surrogate images: size too small");
  if (counts_scale <= 0.0 || counts_scale > 1.0) {
    throw ValidationError("surrogate images: counts_scale must be in (0,1]");
  }
  const double sz = static_cast<double>(image_size);

  ImageDataset out;
  Rng rng(derive_seed(seed, 0x1a6e));
  for (std::size_t c = 0; c < kNumCellClasses; ++c) {
    const CellClass cls = all_cell_classes[c];
    const auto count = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(
               static_cast<double>(kHerlevClassCounts[c]) * counts_scale)));
    for (std::size_t i = 0; i < count; ++i) {
      const CellGeometry g = draw_geometry(cls, rng, kImageLatentNoise);
      const double t = g.t;

      Tensor img({image_size, image_size, 3});

      // background: pale tint with a random linear gradient and grain
      const double base_r = 0.90 + rng.gaussian(0.0, 0.02);
      const double base_g = 0.84 + rng.gaussian(0.0, 0.02);
      const double base_b = 0.88 + rng.gaussian(0.0, 0.02);
      const double gx = rng.gaussian(0.0, 0.05), gy = rng.gaussian(0.0, 0.05);

      // cytoplasm ellipse: larger for normal cells
      const double cyto_scale = std::sqrt(g.cytoplasm_area + g.nucleus_area) / std::sqrt(6700.0);
      Ellipse cyto;
      cyto.cx = sz * (0.5 + rng.gaussian(0.0, 0.05));
      cyto.cy = sz * (0.5 + rng.gaussian(0.0, 0.05));
      cyto.theta = rng.uniform(0.0, 3.14159265358979323846);
      const double cyto_r = sz * 0.40 * clampd(cyto_scale, 0.35, 1.15);
      cyto.rx = cyto_r * std::sqrt(g.cell_elong);
      cyto.ry = cyto_r / std::sqrt(g.cell_elong);

      // nucleus: area fraction tracks severity
      const double nucleus_frac =
          std::sqrt(clampd(g.nucleus_area / (g.nucleus_area + g.cytoplasm_area), 0.02, 0.9));
      Ellipse nuc;
      const double wobble = 0.35 * std::abs(rng.gaussian(0.0, 0.2 + 0.2 * t));
      const double dir = rng.uniform(0.0, 6.28318530717958647692);
      nuc.cx = cyto.cx + std::cos(dir) * wobble * cyto.ry;
      nuc.cy = cyto.cy + std::sin(dir) * wobble * cyto.ry;
      nuc.theta = rng.uniform(0.0, 3.14159265358979323846);
      const double nuc_r = cyto_r * clampd(nucleus_frac, 0.12, 0.85);
      nuc.rx = nuc_r * std::sqrt(g.nucleus_elong);
      nuc.ry = nuc_r / std::sqrt(g.nucleus_elong);

      const double cyto_rgb[3] = {clampd(0.72 - 0.10 * t + rng.gaussian(0.0, 0.03), 0, 1),
                                  clampd(0.60 - 0.08 * t + rng.gaussian(0.0, 0.03), 0, 1),
                                  clampd(0.78 - 0.04 * t + rng.gaussian(0.0, 0.03), 0, 1)};
      const double nuc_rgb[3] = {clampd(0.38 - 0.14 * t + rng.gaussian(0.0, 0.03), 0, 1),
                                 clampd(0.24 - 0.08 * t + rng.gaussian(0.0, 0.03), 0, 1),
                                 clampd(0.48 - 0.10 * t + rng.gaussian(0.0, 0.03), 0, 1)};

      for (std::size_t y = 0; y < image_size; ++y) {
        for (std::size_t x = 0; x < image_size; ++x) {
          const double fx = static_cast<double>(x) / sz, fy = static_cast<double>(y) / sz;
          double px[3] = {base_r + gx * fx, base_g + gy * fy, base_b + gx * fy * 0.5};
          const double cc = cyto.coverage(static_cast<double>(x), static_cast<double>(y));
          if (cc > 0.0) {
            for (int ch = 0; ch < 3; ++ch) px[ch] = px[ch] * (1.0 - cc) + cyto_rgb[ch] * cc;
          }
          const double nc = nuc.coverage(static_cast<double>(x), static_cast<double>(y));
          if (nc > 0.0) {
            for (int ch = 0; ch < 3; ++ch) px[ch] = px[ch] * (1.0 - nc) + nuc_rgb[ch] * nc;
          }
          const double grain = rng.gaussian(0.0, 0.015);
          for (int ch = 0; ch < 3; ++ch) {
            img[(y * image_size + x) * 3 + static_cast<std::size_t>(ch)] =
                clampd(px[ch] + grain, 0.0, 1.0);
          }
        }
      }

      // chromatin speckles inside the nucleus, denser with severity
      const auto speckles = static_cast<std::size_t>(2.0 + 14.0 * t);
      for (std::size_t sp = 0; sp < speckles; ++sp) {
        const double ang = rng.uniform(0.0, 6.28318530717958647692);
        const double rad = std::sqrt(rng.uniform()) * 0.8;
        const double sx = nuc.cx + std::cos(ang) * rad * nuc.rx;
        const double sy = nuc.cy + std::sin(ang) * rad * nuc.ry;
        const auto ix = static_cast<std::ptrdiff_t>(sx);
        const auto iy = static_cast<std::ptrdiff_t>(sy);
        if (ix < 0 || iy < 0 || ix >= static_cast<std::ptrdiff_t>(image_size) ||
            iy >= static_cast<std::ptrdiff_t>(image_size)) {
          continue;
        }
        const std::size_t at =
            (static_cast<std::size_t>(iy) * image_size + static_cast<std::size_t>(ix)) * 3;
        for (std::size_t ch = 0; ch < 3; ++ch) img[at + ch] = clampd(img[at + ch] - 0.18, 0, 1);
      }

      out.images.push_back(std::move(img));
      out.classes.push_back(cls);
      out.labels.push_back(to_binary(cls));
    }
  }
  return out;
}

void write_surrogate_images(const std::string& root, std::uint64_t seed,
                            std::size_t image_size, double counts_scale) {
  namespace fs = std::filesystem;
  const ImageDataset data = surrogate_image_set(seed, image_size, counts_scale);
  std::array<std::size_t, kNumCellClasses> counter{};
  char name[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<std::size_t>(data.classes[i]);
    const fs::path dir = fs::path(root) / std::string(cell_class_name(data.classes[i]));
    fs::create_directories(dir);
    std::snprintf(name, sizeof name, "cell_%04zu.bmp", counter[c]++);
    write_bmp((dir / name).string(), data.images[i]);
  }
}

}  // namespace papml
