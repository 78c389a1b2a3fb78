#include "stripid/cgpf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stripid {

namespace {

struct Gradient {
  double gx;
  double gy;
};

// Central differences with edge replication.
Gradient gradient_at(const Plane& p, int row, int col) {
  return {p.clamped(row, col + 1) - p.clamped(row, col - 1),
          p.clamped(row + 1, col) - p.clamped(row - 1, col)};
}

// Unsigned orientation in [0, 180).
double orientation_deg(const Gradient& g) {
  double deg = std::atan2(g.gy, g.gx) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  return deg;
}

}  // namespace

void HogConfig::validate() const {
  if (cell_size < 1 || block_size < 1 || block_stride < 1 || orientation_bins < 2 ||
      !(epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid HOG configuration");
  }
}

void CgpfConfig::validate() const {
  hog.validate();
  if (median_kernel < 1 || median_kernel % 2 == 0) {
    throw Error(ErrorCode::InvalidKernel, "median kernel must be odd and positive");
  }
  if (top_regions < 1) throw Error(ErrorCode::InvalidArgument, "top_regions must be >= 1");
  if (min_region_area < 1) throw Error(ErrorCode::InvalidArgument, "min_region_area must be >= 1");
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "bad resize dimensions");
}

ColorPeaks color_peaks(const Image& img) {
  std::array<std::array<long, 256>, 3> hist{};
  for (const Rgb& p : img.values()) {
    ++hist[0][p.r];
    ++hist[1][p.g];
    ++hist[2][p.b];
  }
  ColorPeaks peaks;
  const auto total = static_cast<double>(img.size());
  for (std::size_t c = 0; c < 3; ++c) {
    // max_element returns the first maximum, i.e. the lowest intensity
    const auto it = std::max_element(hist[c].begin(), hist[c].end());
    peaks.position[c] = static_cast<double>(it - hist[c].begin()) / 255.0;
    peaks.height[c] = static_cast<double>(*it) / total;
  }
  return peaks;
}

double pearson_r(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::LengthMismatch, "pearson_r length mismatch");
  if (u.size() < 2) throw Error(ErrorCode::DegenerateInput, "pearson_r needs at least 2 points");
  const auto n = static_cast<double>(u.size());
  double su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sv += v[i];
    suu += u[i] * u[i];
    svv += v[i] * v[i];
    suv += u[i] * v[i];
  }
  const double var_u = n * suu - su * su;
  const double var_v = n * svv - sv * sv;
  if (!(var_u > 0.0) || !(var_v > 0.0)) {
    throw Error(ErrorCode::DegenerateInput, "pearson_r of a constant sequence");
  }
  return std::clamp((n * suv - su * sv) / std::sqrt(var_u * var_v), -1.0, 1.0);
}

HogDescriptor hog(const Plane& gray, const HogConfig& cfg) {
  cfg.validate();
  const int cells_y = gray.height() / cfg.cell_size;
  const int cells_x = gray.width() / cfg.cell_size;
  if (cells_y < cfg.block_size || cells_x < cfg.block_size) {
    throw Error(ErrorCode::PlaneTooSmall, "plane smaller than one HOG block");
  }
  const int nb = cfg.orientation_bins;
  const double bin_width = 180.0 / nb;

  // Bin i is centred on i * bin_width; votes split linearly between the two
  // nearest centres, wrapping at 180 degrees.
  std::vector<double> cells(static_cast<std::size_t>(cells_y * cells_x * nb), 0.0);
  for (int row = 0; row < cells_y * cfg.cell_size; ++row) {
    for (int col = 0; col < cells_x * cfg.cell_size; ++col) {
      const Gradient g = gradient_at(gray, row, col);
      const double mag = std::hypot(g.gx, g.gy);
      if (mag == 0.0) continue;
      const double pos = orientation_deg(g) / bin_width;
      const int lo = static_cast<int>(std::floor(pos));
      const double frac = pos - lo;
      const int b0 = lo % nb;
      const int b1 = (lo + 1) % nb;
      const std::size_t base =
          static_cast<std::size_t>(((row / cfg.cell_size) * cells_x + col / cfg.cell_size) * nb);
      cells[base + b0] += mag * (1.0 - frac);
      cells[base + b1] += mag * frac;
    }
  }

  HogDescriptor out;
  out.blocks_y = (cells_y - cfg.block_size) / cfg.block_stride + 1;
  out.blocks_x = (cells_x - cfg.block_size) / cfg.block_stride + 1;
  out.block_length = cfg.block_size * cfg.block_size * nb;
  out.values.reserve(static_cast<std::size_t>(out.blocks_y * out.blocks_x * out.block_length));

  std::vector<double> block(static_cast<std::size_t>(out.block_length));
  for (int by = 0; by < out.blocks_y; ++by) {
    for (int bx = 0; bx < out.blocks_x; ++bx) {
      std::size_t n = 0;
      for (int cy = 0; cy < cfg.block_size; ++cy) {
        for (int cx = 0; cx < cfg.block_size; ++cx) {
          const int cell_row = by * cfg.block_stride + cy;
          const int cell_col = bx * cfg.block_stride + cx;
          const std::size_t base = static_cast<std::size_t>((cell_row * cells_x + cell_col) * nb);
          for (int k = 0; k < nb; ++k) block[n++] = cells[base + k];
        }
      }
      double sq = 0.0;
      for (double v : block) sq += v * v;
      const double norm = std::sqrt(sq + cfg.epsilon * cfg.epsilon);
      for (double v : block) out.values.push_back(v / norm);
    }
  }
  return out;
}

Plane gradient_energy_map(const Plane& gray, int cell_size) {
  if (cell_size < 1) throw Error(ErrorCode::InvalidArgument, "cell size must be positive");
  const int out_h = (gray.height() + cell_size - 1) / cell_size;
  const int out_w = (gray.width() + cell_size - 1) / cell_size;
  Plane energy(out_w, out_h);
  for (int row = 0; row < gray.height(); ++row) {
    for (int col = 0; col < gray.width(); ++col) {
      const Gradient g = gradient_at(gray, row, col);
      energy.at(row / cell_size, col / cell_size) += std::hypot(g.gx, g.gy);
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(energy.values().begin(), energy.values().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return Plane(out_w, out_h, 0.0);
  for (double& v : energy.values()) v = (v - lo) / (hi - lo) * 255.0;
  return energy;
}

double otsu_threshold(const Plane& p) {
  const auto [lo_it, hi_it] = std::minmax_element(p.values().begin(), p.values().end());
  if (*lo_it == *hi_it) return *lo_it;

  std::array<double, 256> hist{};
  for (double v : p.values()) {
    const double level = std::clamp(std::floor(v + 0.5), 0.0, 255.0);
    hist[static_cast<std::size_t>(level)] += 1.0;
  }
  const auto total = static_cast<double>(p.size());
  double sum_all = 0.0;
  for (std::size_t i = 0; i < 256; ++i) sum_all += static_cast<double>(i) * hist[i];

  // Candidate t splits levels into [0, t) and [t, 255].
  double best_var = -1.0;
  int best_t = 0;
  double count_below = 0.0;
  double sum_below = 0.0;
  for (int t = 0; t < 256; ++t) {
    if (t > 0) {
      count_below += hist[static_cast<std::size_t>(t - 1)];
      sum_below += static_cast<double>(t - 1) * hist[static_cast<std::size_t>(t - 1)];
    }
    const double count_above = total - count_below;
    double between = 0.0;
    if (count_below > 0.0 && count_above > 0.0) {
      const double w0 = count_below / total;
      const double w1 = count_above / total;
      const double mu0 = sum_below / count_below;
      const double mu1 = (sum_all - sum_below) / count_above;
      between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    if (between > best_var) {
      best_var = between;
      best_t = t;
    }
  }
  // Values that quantize to one level but differ in the plane.
  if (best_var <= 0.0) return *lo_it;
  return static_cast<double>(best_t);
}

BinaryPlane binarize(const Plane& p, double threshold) {
  BinaryPlane out(p.width(), p.height());
  for (std::size_t i = 0; i < p.size(); ++i) out.values()[i] = p.values()[i] < threshold ? 0 : 1;
  return out;
}

FeatureVector cgpf_features(const Image& img, const CgpfConfig& cfg) {
  cfg.validate();
  const Image canonical = resize(img, cfg.width, cfg.height);

  FeatureVector fv{FeatureMethod::Cgpf, {}};
  fv.values.reserve(static_cast<std::size_t>(cfg.dims()));
  const ColorPeaks peaks = color_peaks(canonical);
  for (std::size_t c = 0; c < 3; ++c) {
    fv.values.push_back(peaks.position[c]);
    fv.values.push_back(peaks.height[c]);
  }

  const Plane energy =
      median_filter(gradient_energy_map(to_gray(canonical), cfg.hog.cell_size), cfg.median_kernel);
  std::vector<RegionStats> regions;
  const auto [lo_it, hi_it] = std::minmax_element(energy.values().begin(), energy.values().end());
  // A flat map has no light objects on a dark background.
  if (*hi_it > *lo_it) {
    const double t =
        cfg.threshold == ThresholdSource::Otsu ? otsu_threshold(energy) : cfg.fixed_threshold;
    regions = region_props(binarize(energy, t), cfg.min_region_area);
  }

  for (int i = 0; i < cfg.top_regions; ++i) {
    if (static_cast<std::size_t>(i) < regions.size()) {
      const RegionStats& r = regions[static_cast<std::size_t>(i)];
      fv.values.insert(fv.values.end(),
                       {r.area, r.perimeter, r.major_axis, r.minor_axis, r.eccentricity});
    } else {
      fv.values.insert(fv.values.end(), 5, 0.0);
    }
  }
  return fv;
}

}  // namespace stripid
