#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace desksplat {

// Dense row-major image, top-left origin, `channels` interleaved doubles per
// pixel. Pixel (x, y) covers [x, x+1) x [y, y+1); its center is (x+.5, y+.5).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  bool empty() const { return data.empty(); }
  size_t idx(int x, int y, int c = 0) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  double& at(int x, int y, int c = 0) { return data[idx(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data[idx(x, y, c)]; }
  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

}  // namespace desksplat
