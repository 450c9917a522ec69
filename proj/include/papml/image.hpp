#pragma once

#include <string>
#include <vector>

#include "papml/labels.hpp"
#include "papml/nn/tensor.hpp"

namespace papml {

struct ImageSample {
  Tensor pixels;  // (H, W, 3), values in [0, 1]
  CellClass cell_class = CellClass::SuperficialSquamous;
  BinaryLabel label = BinaryLabel::Normal;
};

// In-memory image set; images share one shape.
struct ImageDataset {
  std::vector<Tensor> images;
  std::vector<CellClass> classes;
  std::vector<BinaryLabel> labels;

  std::size_t size() const { return images.size(); }
};

// Decodes BMP (24/32-bit uncompressed), PNG, or JPEG by magic bytes into an
// (H, W, 3) tensor of [0,1] values.
Tensor decode_image(const std::string& path);

// Half-pixel-center bilinear resampling; an identity-size call preserves
// values exactly.
Tensor resize_bilinear(const Tensor& image, std::size_t out_h, std::size_t out_w);

// Decode + resize; the class comes from the file's parent directory name.
ImageSample load_image(const std::string& path, std::size_t target_size);

// <root>/<class-name>/*.{bmp,png,jpg}; files sorted per class for
// reproducible order. Unknown class directories are an error.
ImageDataset load_image_dir(const std::string& root, std::size_t target_size);

// 24-bit uncompressed BMP
void write_bmp(const std::string& path, const Tensor& image);

}  // namespace papml
