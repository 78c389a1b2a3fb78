#include "stripid/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stripid {

namespace {

std::uint8_t round_channel(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

struct Tap {
  int lo;
  int hi;
  double frac;  // weight of hi
};

// Source sample positions for one axis, pixel centers aligned.
std::vector<Tap> axis_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double pos = (i + 0.5) * scale - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {lo, hi, pos - lo};
  }
  return taps;
}

}  // namespace

Image resize(const Image& img, int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidDimensions, "resize target must be at least 1x1");
  }
  if (img.width() == width && img.height() == height) return img;

  const auto xs = axis_taps(img.width(), width);
  const auto ys = axis_taps(img.height(), height);
  Image out(width, height);
  for (int row = 0; row < height; ++row) {
    const Tap& ty = ys[static_cast<std::size_t>(row)];
    for (int col = 0; col < width; ++col) {
      const Tap& tx = xs[static_cast<std::size_t>(col)];
      const Rgb& p00 = img.at(ty.lo, tx.lo);
      const Rgb& p01 = img.at(ty.lo, tx.hi);
      const Rgb& p10 = img.at(ty.hi, tx.lo);
      const Rgb& p11 = img.at(ty.hi, tx.hi);
      const double w00 = (1.0 - ty.frac) * (1.0 - tx.frac);
      const double w01 = (1.0 - ty.frac) * tx.frac;
      const double w10 = ty.frac * (1.0 - tx.frac);
      const double w11 = ty.frac * tx.frac;
      auto blend = [&](auto channel) {
        return round_channel(w00 * channel(p00) + w01 * channel(p01) + w10 * channel(p10) +
                             w11 * channel(p11));
      };
      out.at(row, col) = {blend([](const Rgb& p) { return double(p.r); }),
                          blend([](const Rgb& p) { return double(p.g); }),
                          blend([](const Rgb& p) { return double(p.b); })};
    }
  }
  return out;
}

std::array<Plane, 3> split_planes(const Image& img) {
  std::array<Plane, 3> planes{Plane(img.width(), img.height()), Plane(img.width(), img.height()),
                              Plane(img.width(), img.height())};
  const auto px = img.values();
  for (std::size_t i = 0; i < px.size(); ++i) {
    planes[0].values()[i] = px[i].r;
    planes[1].values()[i] = px[i].g;
    planes[2].values()[i] = px[i].b;
  }
  return planes;
}

Image merge_planes(const Plane& r, const Plane& g, const Plane& b) {
  if (!r.same_shape(g) || !r.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "planes differ in size");
  }
  Image out(r.width(), r.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = {round_channel(r.values()[i]), round_channel(g.values()[i]),
                       round_channel(b.values()[i])};
  }
  return out;
}

Plane to_gray(const Image& img) {
  Plane out(img.width(), img.height());
  const auto px = img.values();
  for (std::size_t i = 0; i < px.size(); ++i) {
    out.values()[i] = 0.299 * px[i].r + 0.587 * px[i].g + 0.114 * px[i].b;
  }
  return out;
}

Plane median_filter(const Plane& p, int k) {
  if (k < 1 || k % 2 == 0) {
    throw Error(ErrorCode::InvalidKernel, "median window must be odd and positive, got " +
                                              std::to_string(k));
  }
  if (k == 1) return p;
  const int r = k / 2;
  const auto mid = static_cast<std::ptrdiff_t>(k * k / 2);
  std::vector<double> window(static_cast<std::size_t>(k * k));
  Plane out(p.width(), p.height());
  for (int row = 0; row < p.height(); ++row) {
    for (int col = 0; col < p.width(); ++col) {
      std::size_t n = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) window[n++] = p.clamped(row + dy, col + dx);
      }
      std::nth_element(window.begin(), window.begin() + mid, window.end());
      out.at(row, col) = window[static_cast<std::size_t>(mid)];
    }
  }
  return out;
}

}  // namespace stripid
