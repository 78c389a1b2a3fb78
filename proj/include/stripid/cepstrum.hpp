#pragma once

#include <complex>
#include <span>
#include <vector>

#include "stripid/feature.hpp"
#include "stripid/imaging.hpp"
#include "stripid/raster.hpp"

namespace stripid {

using ComplexPlane = Raster<std::complex<double>>;

/// Uniform-width histogram of the pooled log-magnitude population.
struct BinVector {
  std::vector<double> counts;  // frequencies, sum to 1
  double lower = 0.0;
  double upper = 0.0;
};

struct CepstrumConfig {
  int width = kCanonicalSize;
  int height = kCanonicalSize;
  int bin_count = 128;
  int coeff_count = 20;

  void validate() const;
};

/// In-place forward DFT of any length (radix-2 when possible, Bluestein
/// otherwise). Unnormalized.
void fft_inplace(std::span<std::complex<double>> data);

/// F(k,l) = 1/(MN) sum_x sum_y f(x,y) exp(-i 2 pi (kx/M + ly/N)),
/// x indexing rows (M = height) and y indexing columns (N = width).
ComplexPlane fft2d(const Plane& p);

/// ln(1 + |z|) per entry.
Plane log_magnitude(const ComplexPlane& c);

/// Pools every value of the planes into one population and counts it into
/// `bins` uniform bins over [0, max]. The top bin is closed above. A
/// population whose maximum is 0 yields all mass in bin 0.
BinVector bin_values(std::span<const Plane> planes, int bins);

/// Orthonormal DCT-II, computed through a length-2N FFT.
std::vector<double> dct1d(std::span<const double> v);

FeatureVector cepstral_features(const Image& img, const CepstrumConfig& cfg = {});

}  // namespace stripid
