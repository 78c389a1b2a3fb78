#include "stripid/feature.hpp"

namespace stripid {

std::string_view to_string(FeatureMethod method) {
  switch (method) {
    case FeatureMethod::Cepstrum: return "cepstrum";
    case FeatureMethod::Cgpf: return "cgpf";
  }
  return "unknown";
}

std::optional<FeatureMethod> parse_feature_method(std::string_view tag) {
  if (tag == "cepstrum") return FeatureMethod::Cepstrum;
  if (tag == "cgpf") return FeatureMethod::Cgpf;
  return std::nullopt;
}

}  // namespace stripid
