#include "papml/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "papml/common.hpp"

namespace papml {

namespace {

Tensor from_rgb8(const std::vector<unsigned char>& rgb, std::size_t h, std::size_t w) {
  Tensor t({h, w, 3});
  for (std::size_t i = 0; i < h * w * 3; ++i) {
    t[i] = static_cast<double>(rgb[i]) / 255.0;
  }
  return t;
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

Tensor decode_bmp(const std::string& path, const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 54) throw ValidationError(path + ": truncated BMP header");
  const std::uint32_t pixel_offset = le32(&bytes[10]);
  const std::uint32_t header_size = le32(&bytes[14]);
  if (header_size < 40) throw ValidationError(path + ": unsupported BMP header");
  const auto width = static_cast<std::int32_t>(le32(&bytes[18]));
  auto height = static_cast<std::int32_t>(le32(&bytes[22]));
  const std::uint16_t bpp = le16(&bytes[28]);
  const std::uint32_t compression = le32(&bytes[30]);
  if (compression != 0 || (bpp != 24 && bpp != 32)) {
    throw ValidationError(path + ": only uncompressed 24/32-bit BMP supported");
  }
  const bool top_down = height < 0;
  if (top_down) height = -height;
  if (width <= 0 || height <= 0) throw ValidationError(path + ": bad BMP dimensions");

  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(height);
  const std::size_t bytes_pp = bpp / 8;
  const std::size_t stride = (w * bytes_pp + 3) / 4 * 4;
  if (bytes.size() < pixel_offset + stride * h) {
    throw ValidationError(path + ": truncated BMP pixel data");
  }

  std::vector<unsigned char> rgb(h * w * 3);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t src_row = top_down ? y : h - 1 - y;
    const unsigned char* row = bytes.data() + pixel_offset + src_row * stride;
    for (std::size_t x = 0; x < w; ++x) {
      const unsigned char* px = row + x * bytes_pp;  // BGR(A)
      rgb[(y * w + x) * 3 + 0] = px[2];
      rgb[(y * w + x) * 3 + 1] = px[1];
      rgb[(y * w + x) * 3 + 2] = px[0];
    }
  }
  return from_rgb8(rgb, h, w);
}

Tensor decode_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw ValidationError("cannot open image: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw RuntimeError("libpng init failed");
  }
  std::vector<unsigned char> rgb;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw ValidationError(path + ": undecodable PNG");
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const std::size_t w = png_get_image_width(png, info);
  const std::size_t h = png_get_image_height(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  rgb.resize(h * w * 3);
  row_ptrs.resize(h);
  for (std::size_t y = 0; y < h; ++y) row_ptrs[y] = rgb.data() + y * w * 3;
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return from_rgb8(rgb, h, w);
}

struct JpegErrorJump {
  jpeg_error_mgr pub;
  jmp_buf env;
};

void jpeg_error_longjmp(j_common_ptr cinfo) {
  longjmp(reinterpret_cast<JpegErrorJump*>(cinfo->err)->env, 1);
}

Tensor decode_jpeg(const std::string& path, const std::vector<unsigned char>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorJump jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_longjmp;

  std::vector<unsigned char> rgb;
  std::size_t w = 0, h = 0;
  jpeg_create_decompress(&cinfo);
  if (setjmp(jerr.env)) {
    jpeg_destroy_decompress(&cinfo);
    throw ValidationError(path + ": undecodable JPEG");
  }
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = cinfo.output_width;
  h = cinfo.output_height;
  rgb.resize(h * w * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = rgb.data() + cinfo.output_scanline * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_rgb8(rgb, h, w);
}

}  // namespace

Tensor decode_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open image: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 4) throw ValidationError(path + ": not an image");

  if (bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(path, bytes);
  if (bytes[0] == 0x89 && bytes[1] == 'P') return decode_png(path);
  if (bytes[0] == 0xFF && bytes[1] == 0xD8) return decode_jpeg(path, bytes);
  throw ValidationError(path + ": unsupported image format");
}

Tensor resize_bilinear(const Tensor& image, std::size_t out_h, std::size_t out_w) {
  if (image.rank() != 3) throw ValidationError("resize: expected (H,W,C) tensor");
  if (out_h == 0 || out_w == 0) throw ValidationError("resize: zero output size");
  const std::size_t h = image.dim(0), w = image.dim(1), ch = image.dim(2);
  if (h == out_h && w == out_w) return image;

  Tensor out({out_h, out_w, ch});
  const double sy = static_cast<double>(h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(w) / static_cast<double>(out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
    const double cy = std::clamp(fy, 0.0, static_cast<double>(h - 1));
    const std::size_t y0 = static_cast<std::size_t>(cy);
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double wy = cy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
      const double cx = std::clamp(fx, 0.0, static_cast<double>(w - 1));
      const std::size_t x0 = static_cast<std::size_t>(cx);
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double wx = cx - static_cast<double>(x0);
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = image[(y0 * w + x0) * ch + c] * (1.0 - wx) +
                           image[(y0 * w + x1) * ch + c] * wx;
        const double bottom = image[(y1 * w + x0) * ch + c] * (1.0 - wx) +
                              image[(y1 * w + x1) * ch + c] * wx;
        out[(y * out_w + x) * ch + c] = top * (1.0 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

ImageSample load_image(const std::string& path, std::size_t target_size) {
  const std::filesystem::path p(path);
  const std::string dir_name = p.parent_path().filename().string();
  const auto cls = parse_cell_class(dir_name);
  if (!cls) {
    throw ValidationError(path + ": unknown class directory '" + dir_name + "'");
  }
  ImageSample sample;
  sample.pixels = resize_bilinear(decode_image(path), target_size, target_size);
  sample.cell_class = *cls;
  sample.label = to_binary(*cls);
  return sample;
}

ImageDataset load_image_dir(const std::string& root, std::size_t target_size) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw ValidationError("not a directory: " + root);

  ImageDataset out;
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) throw ValidationError(root + ": no class directories");

  for (const fs::path& dir : class_dirs) {
    const auto cls = parse_cell_class(dir.filename().string());
    if (!cls) {
      throw ValidationError(root + ": unknown class directory '" + dir.filename().string() + "'");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (ext == ".bmp" || ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      out.images.push_back(resize_bilinear(decode_image(f.string()), target_size, target_size));
      out.classes.push_back(*cls);
      out.labels.push_back(to_binary(*cls));
    }
  }
  if (out.images.empty()) throw ValidationError(root + ": no images found");
  return out;
}

void write_bmp(const std::string& path, const Tensor& image) {
  if (image.rank() != 3 || image.dim(2) != 3) {
    throw ValidationError("write_bmp: expected (H,W,3) tensor");
  }
  const std::size_t h = image.dim(0), w = image.dim(1);
  const std::size_t stride = (w * 3 + 3) / 4 * 4;
  const std::size_t pixel_bytes = stride * h;
  const std::uint32_t file_size = static_cast<std::uint32_t>(54 + pixel_bytes);

  std::vector<unsigned char> out(54 + pixel_bytes, 0);
  auto put32 = [&](std::size_t at, std::uint32_t v) {
    out[at] = v & 0xFF;
    out[at + 1] = (v >> 8) & 0xFF;
    out[at + 2] = (v >> 16) & 0xFF;
    out[at + 3] = (v >> 24) & 0xFF;
  };
  out[0] = 'B';
  out[1] = 'M';
  put32(2, file_size);
  put32(10, 54);
  put32(14, 40);
  put32(18, static_cast<std::uint32_t>(w));
  put32(22, static_cast<std::uint32_t>(h));
  out[26] = 1;            // planes
  out[28] = 24;           // bpp
  put32(34, static_cast<std::uint32_t>(pixel_bytes));

  for (std::size_t y = 0; y < h; ++y) {
    unsigned char* row = out.data() + 54 + (h - 1 - y) * stride;
    for (std::size_t x = 0; x < w; ++x) {
      auto quantize = [&](std::size_t c) {
        const double v = std::clamp(image[(y * w + x) * 3 + c], 0.0, 1.0);
        return static_cast<unsigned char>(std::lround(v * 255.0));
      };
      row[x * 3 + 0] = quantize(2);
      row[x * 3 + 1] = quantize(1);
      row[x * 3 + 2] = quantize(0);
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw RuntimeError("cannot write image: " + path);
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw RuntimeError("write failed: " + path);
}

}  // namespace papml
