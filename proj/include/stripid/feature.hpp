#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stripid {

enum class FeatureMethod { Cepstrum, Cgpf };

std::string_view to_string(FeatureMethod method);
std::optional<FeatureMethod> parse_feature_method(std::string_view tag);

struct FeatureVector {
  FeatureMethod method = FeatureMethod::Cepstrum;
  std::vector<double> values;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

}  // namespace stripid
