#pragma once

#include <cstddef>
#include <vector>

namespace turbid {

/// Row-major single-channel image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  T& operator[](int p) { return data_[static_cast<std::size_t>(p)]; }
  const T& operator[](int p) const { return data_[static_cast<std::size_t>(p)]; }
  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageD = Image<double>;
using Mask = Image<unsigned char>;

/// Separable Gaussian filter with clamp-to-edge borders. The kernel is
/// truncated at 3 sigma and renormalized, so constants are preserved.
/// sigma <= 0 returns the input unchanged.
ImageD gaussian_blur(const ImageD& image, double sigma);

/// Binary dilation with a (2r+1)x(2r+1) square structuring element.
Mask dilate(const Mask& mask, int radius);

double mean(const ImageD& image);

}  // namespace turbid
