#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "stripid/cgpf.hpp"

namespace stripid {

namespace {

struct Moments {
  long count = 0;
  long boundary = 0;
  double sum_r = 0, sum_c = 0;
  double sum_rr = 0, sum_cc = 0, sum_rc = 0;
};

bool is_on(const BinaryPlane& b, int row, int col) {
  return row >= 0 && col >= 0 && row < b.height() && col < b.width() && b.at(row, col) != 0;
}

}  // namespace

std::vector<RegionStats> region_props(const BinaryPlane& b, int min_area) {
  const int h = b.height();
  const int w = b.width();
  std::vector<int> label(b.size(), -1);
  std::vector<Moments> comps;
  std::vector<std::pair<int, int>> stack;

  for (int r0 = 0; r0 < h; ++r0) {
    for (int c0 = 0; c0 < w; ++c0) {
      if (b.at(r0, c0) == 0 || label[static_cast<std::size_t>(r0 * w + c0)] >= 0) continue;
      const int id = static_cast<int>(comps.size());
      comps.emplace_back();
      label[static_cast<std::size_t>(r0 * w + c0)] = id;
      stack.assign(1, {r0, c0});
      while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = r + dr;
            const int nc = c + dc;
            if (!is_on(b, nr, nc)) continue;
            int& l = label[static_cast<std::size_t>(nr * w + nc)];
            if (l < 0) {
              l = id;
              stack.emplace_back(nr, nc);
            }
          }
        }
      }
    }
  }

  // Accumulate in raster order so sums do not depend on traversal order.
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int id = label[static_cast<std::size_t>(r * w + c)];
      if (id < 0) continue;
      Moments& m = comps[static_cast<std::size_t>(id)];
      ++m.count;
      m.sum_r += r;
      m.sum_c += c;
      m.sum_rr += double(r) * r;
      m.sum_cc += double(c) * c;
      m.sum_rc += double(r) * c;
      if (!is_on(b, r - 1, c) || !is_on(b, r + 1, c) || !is_on(b, r, c - 1) || !is_on(b, r, c + 1)) {
        ++m.boundary;
      }
    }
  }

  const double extent = std::max(h, w);
  std::vector<RegionStats> out;
  for (const Moments& m : comps) {
    if (m.count < min_area) continue;
    const double n = static_cast<double>(m.count);
    const double mr = m.sum_r / n;
    const double mc = m.sum_c / n;
    // Second central moments of the pixel set, each pixel a unit square.
    const double var_r = m.sum_rr / n - mr * mr + 1.0 / 12.0;
    const double var_c = m.sum_cc / n - mc * mc + 1.0 / 12.0;
    const double cov = m.sum_rc / n - mr * mc;
    const double mean = 0.5 * (var_r + var_c);
    const double spread = std::sqrt(0.25 * (var_r - var_c) * (var_r - var_c) + cov * cov);
    const double l1 = mean + spread;
    const double l2 = std::max(mean - spread, 0.0);

    RegionStats s;
    s.pixel_count = m.count;
    s.boundary_count = m.boundary;
    s.area = n / (static_cast<double>(h) * w);
    s.perimeter = static_cast<double>(m.boundary) / (h + w);
    s.major_axis = 4.0 * std::sqrt(l1) / extent;
    s.minor_axis = 4.0 * std::sqrt(l2) / extent;
    s.eccentricity = std::clamp(std::sqrt(std::max(0.0, 1.0 - l2 / l1)), 0.0, 1.0);
    s.centroid_row = mr;
    s.centroid_col = mc;
    out.push_back(s);
  }

  std::sort(out.begin(), out.end(), [](const RegionStats& a, const RegionStats& b) {
    return std::tie(b.pixel_count, a.centroid_row, a.centroid_col) <
           std::tie(a.pixel_count, b.centroid_row, b.centroid_col);
  });
  return out;
}

}  // namespace stripid
