#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "stripid/classify.hpp"
#include "stripid/raster.hpp"
#include "stripid/rng.hpp"

namespace stripid {
inline void PrintTo(ErrorCode c, std::ostream* os) { *os << to_string(c); }
}  // namespace stripid

namespace stripid::testing {

inline Plane random_plane(Rng& rng, int w, int h, double lo = 0.0, double hi = 255.0) {
  Plane p(w, h);
  for (double& v : p.values()) v = rng.uniform(lo, hi);
  return p;
}

inline Image random_image(Rng& rng, int w, int h) {
  Image img(w, h);
  for (Rgb& px : img.values()) {
    px = {static_cast<std::uint8_t>(rng.index(256)), static_cast<std::uint8_t>(rng.index(256)),
          static_cast<std::uint8_t>(rng.index(256))};
  }
  return img;
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Gaussian blobs, one per class, centred on the axes at distance `spread`.
inline Dataset blob_dataset(std::uint64_t seed, int classes, int per_class, std::size_t dims,
                            double spread = 4.0, double sigma = 0.5) {
  Rng rng(seed);
  Dataset d;
  for (int c = 0; c < classes; ++c) d.labels.push_back("c" + std::to_string(c));
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      s.label = c;
      s.features.values.resize(dims);
      for (std::size_t j = 0; j < dims; ++j) {
        const double centre = (j == static_cast<std::size_t>(c) % dims) ? spread : 0.0;
        s.features.values[j] = centre + sigma * rng.normal();
      }
      d.samples.push_back(std::move(s));
    }
  }
  return d;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "stripid_";
    if (info) name += std::string(info->test_suite_name()) + "_" + info->name();
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an stripid::Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace stripid::testing
