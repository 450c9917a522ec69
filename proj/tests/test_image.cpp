#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "helpers.hpp"
#include "papml/common.hpp"
#include "papml/image.hpp"
#include "papml/rng.hpp"
#include "papml/surrogate.hpp"

using namespace papml;
using papml::testutil::temp_dir;

namespace {

Tensor random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
  Tensor img({h, w, 3});
  Rng rng(seed);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.uniform();
  return img;
}

void write_png_rgb(const std::string& path, const Tensor& img) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  std::vector<unsigned char> rgb(h * w * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    rgb[i] = static_cast<unsigned char>(std::lround(img[i] * 255.0));
  }
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  REQUIRE(fp != nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < h; ++y) {
    png_write_row(png, rgb.data() + y * w * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_jpeg_rgb(const std::string& path, const Tensor& img, int quality) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  std::vector<unsigned char> rgb(h * w * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    rgb[i] = static_cast<unsigned char>(std::lround(img[i] * 255.0));
  }
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  REQUIRE(fp != nullptr);
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, fp);
  cinfo.image_width = static_cast<JDIMENSION>(w);
  cinfo.image_height = static_cast<JDIMENSION>(h);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = rgb.data() + cinfo.next_scanline * w * 3;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(fp);
}

}  // namespace

TEST_CASE("bmp write/decode round-trips within quantization error") {
  const auto dir = temp_dir("bmp");
  const Tensor img = random_image(13, 7, 3);  // odd width exercises row padding
  const auto path = (dir / "img.bmp").string();
  write_bmp(path, img);
  const Tensor back = decode_image(path);
  REQUIRE(back.shape() == img.shape());
  for (std::size_t i = 0; i < img.size(); ++i) {
    CHECK(std::abs(back[i] - img[i]) <= 0.5 / 255.0 + 1e-12);
  }
}

TEST_CASE("png decode round-trips exactly; jpeg within lossy tolerance") {
  const auto dir = temp_dir("codec");
  const Tensor img = random_image(9, 11, 5);

  const auto png_path = (dir / "img.png").string();
  write_png_rgb(png_path, img);
  const Tensor png_back = decode_image(png_path);
  REQUIRE(png_back.shape() == img.shape());
  for (std::size_t i = 0; i < img.size(); ++i) {
    CHECK(std::abs(png_back[i] - img[i]) <= 0.5 / 255.0 + 1e-12);
  }

  Tensor smooth({16, 16, 3});
  for (std::size_t y = 0; y < 16; ++y) {
    for (std::size_t x = 0; x < 16; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        smooth[(y * 16 + x) * 3 + c] = (double(y) / 32.0) + (double(x) / 64.0) + double(c) * 0.1;
      }
    }
  }
  const auto jpg_path = (dir / "img.jpg").string();
  write_jpeg_rgb(jpg_path, smooth, 95);
  const Tensor jpg_back = decode_image(jpg_path);
  REQUIRE(jpg_back.shape() == smooth.shape());
  double max_err = 0.0;
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    max_err = std::max(max_err, std::abs(jpg_back[i] - smooth[i]));
  }
  CHECK(max_err < 0.06);
}

TEST_CASE("undecodable or unknown bytes are rejected") {
  const auto dir = temp_dir("badimg");
  const auto garbage = papml::testutil::write_file(dir / "fake.bmp", "BMnot really a bitmap");
  CHECK_THROWS_AS(decode_image(garbage.string()), ValidationError);
  const auto text = papml::testutil::write_file(dir / "notes.txt", "hello");
  CHECK_THROWS_AS(decode_image(text.string()), ValidationError);
  CHECK_THROWS_AS(decode_image((dir / "missing.png").string()), ValidationError);
}

TEST_CASE("bilinear resize honors its shape and constant-image contracts") {
  SUBCASE("100x80 lands at 64x64") {
    const Tensor img = random_image(100, 80, 7);
    const Tensor out = resize_bilinear(img, 64, 64);
    CHECK(out.shape() == std::vector<std::size_t>{64, 64, 3});
  }
  SUBCASE("a constant image stays constant under any resize") {
    Tensor gray({50, 40, 3});
    gray.fill(128.0 / 255.0);
    const Tensor out = resize_bilinear(gray, 64, 64);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    }
  }
  SUBCASE("identity size preserves values exactly") {
    const Tensor img = random_image(64, 64, 9);
    const Tensor out = resize_bilinear(img, 64, 64);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(out[i] == img[i]);
  }
}

TEST_CASE("load_image takes its label from the parent directory") {
  const auto dir = temp_dir("cls");
  std::filesystem::create_directories(dir / "carcinoma_in_situ");
  std::filesystem::create_directories(dir / "whatever");
  const Tensor img = random_image(30, 30, 11);
  write_bmp((dir / "carcinoma_in_situ" / "a.bmp").string(), img);
  write_bmp((dir / "whatever" / "b.bmp").string(), img);

  const ImageSample sample = load_image((dir / "carcinoma_in_situ" / "a.bmp").string(), 64);
  CHECK(sample.cell_class == CellClass::CarcinomaInSitu);
  CHECK(sample.label == BinaryLabel::Abnormal);
  CHECK(sample.pixels.shape() == std::vector<std::size_t>{64, 64, 3});

  CHECK_THROWS_AS(load_image((dir / "whatever" / "b.bmp").string(), 64), ValidationError);
}

TEST_CASE("a written surrogate tree loads back with matching labels and counts") {
  const auto dir = temp_dir("tree");
  write_surrogate_images(dir.string(), 3, 16, 0.02);
  const ImageDataset data = load_image_dir(dir.string(), 16);
  CHECK(data.size() >= 14);  // 7 classes, at least 2 each
  std::size_t abnormal = 0;
  for (BinaryLabel l : data.labels) abnormal += l == BinaryLabel::Abnormal;
  CHECK(abnormal > 0);
  CHECK(abnormal < data.size());
  for (const Tensor& img : data.images) {
    CHECK(img.shape() == std::vector<std::size_t>{16, 16, 3});
    for (std::size_t i = 0; i < img.size(); ++i) {
      CHECK(img[i] >= 0.0);
      CHECK(img[i] <= 1.0);
    }
  }

  std::filesystem::create_directories(dir / "mystery_class");
  papml::testutil::write_file(dir / "mystery_class" / "x.bmp", "BM");
  CHECK_THROWS_AS(load_image_dir(dir.string(), 16), ValidationError);
}

TEST_CASE("surrogate image sets are deterministic per seed") {
  const ImageDataset a = surrogate_image_set(5, 16, 0.02);
  const ImageDataset b = surrogate_image_set(5, 16, 0.02);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.images[i].storage() == b.images[i].storage());
  }
}
