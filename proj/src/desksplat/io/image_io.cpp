#include "desksplat/io/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "desksplat/core/common.hpp"

namespace desksplat {

Image read_png(const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw io_error("read_png: cannot open " + path + ": " + png.message);
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int channels = gray ? 1 : 3;
  std::vector<uint8_t> buf(static_cast<size_t>(png.width) * png.height * channels);
  if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw io_error("read_png: decode failed for " + path + ": " + msg);
  }
  Image img(png.width, png.height, channels);
  for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i] / 255.0;
  return img;
}

void write_png(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw config_error("write_png: expected 1 or 3 channels");
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = img.width;
  png.height = img.height;
  png.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<uint8_t> buf(img.data.size());
  for (size_t i = 0; i < buf.size(); ++i) {
    const double v = std::min(1.0, std::max(0.0, img.data[i]));
    buf[i] = static_cast<uint8_t>(std::lround(v * 255.0));
  }
  if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
    throw io_error("write_png: cannot write " + path + ": " + png.message);
}

Image read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("read_pfm: cannot open " + path);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  f >> magic >> w >> h >> scale;
  if (!f || (magic != "Pf" && magic != "PF"))
    throw io_error("read_pfm: bad header in " + path);
  if (w <= 0 || h <= 0) throw io_error("read_pfm: bad dimensions in " + path);
  f.get();  // single whitespace byte after the scale token
  const int channels = magic == "PF" ? 3 : 1;
  const bool little_endian = scale < 0.0;
  if (!little_endian)
    throw io_error("read_pfm: big-endian PFM unsupported: " + path);
  std::vector<float> row(static_cast<size_t>(w) * channels);
  Image img(w, h, channels);
  for (int y = h - 1; y >= 0; --y) {  // file rows run bottom-up
    f.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(float));
    if (!f) throw io_error("read_pfm: truncated data in " + path);
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) img.at(x, y, c) = row[x * channels + c];
  }
  return img;
}

void write_pfm(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw config_error("write_pfm: expected 1 or 3 channels");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("write_pfm: cannot write " + path);
  f << (img.channels == 3 ? "PF" : "Pf") << "\n"
    << img.width << " " << img.height << "\n"
    << "-1.0\n";
  std::vector<float> row(static_cast<size_t>(img.width) * img.channels);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        row[x * img.channels + c] = static_cast<float>(img.at(x, y, c));
    f.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
  }
  if (!f) throw io_error("write_pfm: short write to " + path);
}

}  // namespace desksplat
