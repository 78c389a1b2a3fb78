#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stripid/classify.hpp"

namespace stripid {

/// Text feature table:
///   # method=<tag>,dims=<D>,bins=<B>,version=1
///   label,f0,...,f{D-1}
///   <label name>,<D reals with 17 significant digits>
struct FeatureTable {
  Dataset dataset;  // labels in order of first appearance
  int bins = 0;     // 0 when the method has no bin count
};

std::string format_feature_table(const FeatureTable& t);
FeatureTable parse_feature_table(const std::string& text);

void write_feature_table(const FeatureTable& t, const std::filesystem::path& path);
/// Throws Io or CorruptFeatureFile.
FeatureTable read_feature_table(const std::filesystem::path& path);

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  std::string label;
};

/// Reads a `path,label` manifest.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

/// 17 significant digits, enough to round-trip any double; used by every CSV writer.
std::string format_real(double v);

}  // namespace stripid
