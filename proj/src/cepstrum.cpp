#include "stripid/cepstrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace stripid {

namespace {

using cd = std::complex<double>;

std::complex<double> twiddle(double numer, double denom) {
  // exp(-i 2 pi numer / denom), evaluated directly rather than by recurrence
  const double angle = -2.0 * std::numbers::pi * numer / denom;
  return {std::cos(angle), std::sin(angle)};
}

void fft_radix2(std::span<cd> a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    std::vector<cd> w(half);
    for (std::size_t k = 0; k < half; ++k) w[k] = twiddle(double(k), double(len));
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cd u = a[start + k];
        const cd v = a[start + k + half] * w[k];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

void ifft_radix2(std::span<cd> a) {
  for (auto& z : a) z = std::conj(z);
  fft_radix2(a);
  const double scale = 1.0 / static_cast<double>(a.size());
  for (auto& z : a) z = std::conj(z) * scale;
}

// Bluestein's chirp-z: arbitrary length via a power-of-two convolution.
void fft_bluestein(std::span<cd> a) {
  const std::size_t n = a.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small
    const auto k2 = static_cast<double>((k * k) % (2 * n));
    chirp[k] = twiddle(k2, 2.0 * double(n));
  }
  std::vector<cd> x(m), y(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  y[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
  fft_radix2(x);
  fft_radix2(y);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  ifft_radix2(x);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
}

}  // namespace

void CepstrumConfig::validate() const {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "cepstrum resize dimensions must be positive");
  }
  if (bin_count < 2) throw Error(ErrorCode::InvalidArgument, "bin count must be at least 2");
  if (coeff_count < 1 || coeff_count > bin_count) {
    throw Error(ErrorCode::InvalidArgument,
                "coefficient count must lie in [1, bins], got " + std::to_string(coeff_count));
  }
}

void fft_inplace(std::span<cd> data) {
  if (data.size() <= 1) return;
  if (std::has_single_bit(data.size())) {
    fft_radix2(data);
  } else {
    fft_bluestein(data);
  }
}

ComplexPlane fft2d(const Plane& p) {
  if (p.empty()) throw Error(ErrorCode::EmptyPlane, "fft2d of an empty plane");
  const int rows = p.height();
  const int cols = p.width();
  ComplexPlane out(cols, rows);
  for (std::size_t i = 0; i < p.size(); ++i) out.values()[i] = p.values()[i];

  for (int r = 0; r < rows; ++r) {
    fft_inplace(out.values().subspan(static_cast<std::size_t>(r) * cols, cols));
  }
  std::vector<cd> column(static_cast<std::size_t>(rows));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) column[r] = out.at(r, c);
    fft_inplace(column);
    for (int r = 0; r < rows; ++r) out.at(r, c) = column[r];
  }
  const double norm = 1.0 / (static_cast<double>(rows) * static_cast<double>(cols));
  for (auto& z : out.values()) z *= norm;
  return out;
}

Plane log_magnitude(const ComplexPlane& c) {
  Plane out(c.width(), c.height());
  for (std::size_t i = 0; i < c.size(); ++i) out.values()[i] = std::log1p(std::abs(c.values()[i]));
  return out;
}

BinVector bin_values(std::span<const Plane> planes, int bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "bin count must be at least 2");
  if (planes.empty()) throw Error(ErrorCode::EmptyPlane, "no planes to bin");
  for (const auto& p : planes) {
    if (!p.same_shape(planes.front())) {
      throw Error(ErrorCode::DimensionMismatch, "planes to bin differ in size");
    }
  }

  double top = 0.0;
  for (const auto& p : planes) {
    for (double v : p.values()) top = std::max(top, v);
  }

  BinVector out;
  out.counts.assign(static_cast<std::size_t>(bins), 0.0);
  out.lower = 0.0;
  out.upper = top;
  if (top <= 0.0) {
    out.counts[0] = 1.0;
    return out;
  }

  std::vector<std::size_t> tally(static_cast<std::size_t>(bins), 0);
  std::size_t total = 0;
  for (const auto& p : planes) {
    for (double v : p.values()) {
      auto idx = static_cast<long>(v * bins / top);
      idx = std::clamp(idx, 0L, static_cast<long>(bins - 1));
      ++tally[static_cast<std::size_t>(idx)];
      ++total;
    }
  }
  for (std::size_t i = 0; i < tally.size(); ++i) {
    out.counts[i] = static_cast<double>(tally[i]) / static_cast<double>(total);
  }
  return out;
}

std::vector<double> dct1d(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) throw Error(ErrorCode::EmptyVector, "dct1d of an empty vector");

  // Even extension: Y_k = 2 exp(i pi k / 2N) * sum_i f(i) cos(pi k (2i+1) / 2N)
  std::vector<cd> ext(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    ext[i] = v[i];
    ext[2 * n - 1 - i] = v[i];
  }
  fft_inplace(ext);

  std::vector<double> out(n);
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t u = 0; u < n; ++u) {
    const double cos_sum = 0.5 * (ext[u] * twiddle(double(u), 4.0 * double(n))).real();
    const double lambda = u == 0 ? 1.0 / std::numbers::sqrt2 : 1.0;
    out[u] = lambda * scale * cos_sum;
  }
  return out;
}

FeatureVector cepstral_features(const Image& img, const CepstrumConfig& cfg) {
  cfg.validate();
  const Image canonical = resize(img, cfg.width, cfg.height);
  const auto planes = split_planes(canonical);

  std::array<Plane, 3> spectra;
  for (std::size_t i = 0; i < planes.size(); ++i) spectra[i] = log_magnitude(fft2d(planes[i]));

  const BinVector bins = bin_values(spectra, cfg.bin_count);
  std::vector<double> coeffs = dct1d(bins.counts);
  coeffs.resize(static_cast<std::size_t>(cfg.coeff_count));
  return {FeatureMethod::Cepstrum, std::move(coeffs)};
}

}  // namespace stripid
