#pragma once

#include <array>
#include <span>
#include <vector>

#include "stripid/feature.hpp"
#include "stripid/imaging.hpp"
#include "stripid/raster.hpp"

namespace stripid {

/// Per-channel (R, G, B) histogram peak location and height, both in [0, 1].
struct ColorPeaks {
  std::array<double, 3> position{};
  std::array<double, 3> height{};
};

struct HogConfig {
  int cell_size = 8;
  int orientation_bins = 9;
  int block_size = 2;    // cells per block side
  int block_stride = 1;  // cells
  double epsilon = 1e-6;

  void validate() const;
};

struct HogDescriptor {
  std::vector<double> values;
  int blocks_y = 0;
  int blocks_x = 0;
  int block_length = 0;  // block_size^2 * orientation_bins
};

/// Shape statistics of one connected component. Lengths and areas are
/// normalized by the plane extent; the centroid stays in pixels.
struct RegionStats {
  double area = 0.0;
  double perimeter = 0.0;
  double major_axis = 0.0;
  double minor_axis = 0.0;
  double eccentricity = 0.0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  long pixel_count = 0;
  long boundary_count = 0;
};

enum class ThresholdSource { Otsu, Fixed };

struct CgpfConfig {
  HogConfig hog;
  int median_kernel = 3;
  int top_regions = 5;
  int min_region_area = 16;
  ThresholdSource threshold = ThresholdSource::Otsu;
  double fixed_threshold = 128.0;
  int width = kCanonicalSize;
  int height = kCanonicalSize;

  void validate() const;
  int dims() const { return 6 + 5 * top_regions; }
};

ColorPeaks color_peaks(const Image& img);

/// Pearson correlation coefficient. Throws DegenerateInput when either
/// argument has zero variance.
double pearson_r(std::span<const double> u, std::span<const double> v);

HogDescriptor hog(const Plane& gray, const HogConfig& cfg = {});

/// Per-cell sum of central-difference gradient magnitudes, min-max rescaled
/// to [0, 255]. Partial border cells are kept.
Plane gradient_energy_map(const Plane& gray, int cell_size);

/// Otsu threshold over 256 integer levels (values rounded and clamped to
/// [0, 255]). Ties go to the lower level; a constant plane returns its value.
double otsu_threshold(const Plane& p);

/// 0 where value < threshold, 1 otherwise.
BinaryPlane binarize(const Plane& p, double threshold);

/// 8-connected components of ones with at least `min_area` pixels, sorted by
/// area descending, then centroid row, then centroid column.
std::vector<RegionStats> region_props(const BinaryPlane& b, int min_area);

FeatureVector cgpf_features(const Image& img, const CgpfConfig& cfg = {});

}  // namespace stripid
