#pragma once

#include <cstdint>
#include <filesystem>

#include "stripid/classify.hpp"

namespace stripid {

inline constexpr std::uint8_t kModelFormatVersion = 1;

/// How the training features were produced, so prediction can rerun the
/// same extractor.
struct ExtractionInfo {
  FeatureMethod method = FeatureMethod::Cepstrum;
  std::uint32_t bins = 0;  // cepstrum only
  std::uint32_t width = 256;
  std::uint32_t height = 256;
  std::uint32_t dims = 0;

  friend bool operator==(const ExtractionInfo&, const ExtractionInfo&) = default;
};

struct Model {
  ExtractionInfo extraction;
  Classifier classifier;
};

/// Layout (all integers and floats little-endian):
///   "SIDM" | u8 version | u8 kind (0 knn, 1 svm, 2 lr) | u8 method
///   u32 bins | u32 width | u32 height | u32 dims | u32 classes
///   classes x (u32 length, UTF-8 bytes)
///   knn:    u32 k | u32 n | n x (u32 label, dims x f64)
///   linear: f64 lambda | classes x dims f64 weights | classes f64 bias
///           | dims f64 mean | dims f64 scale
std::vector<std::uint8_t> serialize_model(const Model& m);
Model deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const Model& m, const std::filesystem::path& path);
/// Throws Io, VersionMismatch or CorruptModel.
Model load_model(const std::filesystem::path& path);

}  // namespace stripid
