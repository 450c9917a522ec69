#pragma once

#include <array>
#include <cstdint>

#include "papml/dataset.hpp"
#include "papml/image.hpp"

namespace papml {

// Published per-class sizes of the Herlev pap-smear collection (917 cells).
inline constexpr std::array<std::size_t, kNumCellClasses> kHerlevClassCounts = {
    74, 70, 98, 182, 146, 197, 150};

// Synthetic stand-in for the Herlev feature table: 917 rows, the real
// class counts, and 20 morphology features driven by a per-class severity
// latent with calibrated overlap. Used by tests and demo runs when the
// real export is not available; real data drops in via the same schema.
FeatureTable surrogate_feature_table(std::uint64_t seed);

// Same generative latents rendered as cell images: cytoplasm and nucleus
// ellipses over a textured background, geometry and tone tracking class
// severity. counts_scale in (0,1] shrinks every class proportionally.
ImageDataset surrogate_image_set(std::uint64_t seed, std::size_t image_size,
                                 double counts_scale = 1.0);

// Writes the image set as <root>/<class-name>/cell_####.bmp.
void write_surrogate_images(const std::string& root, std::uint64_t seed,
                            std::size_t image_size, double counts_scale = 1.0);

}  // namespace papml
