#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stripid/cepstrum.hpp"
#include "stripid/cgpf.hpp"
#include "stripid/feature.hpp"
#include "stripid/model_io.hpp"

namespace stripid {

struct ExtractorConfig {
  FeatureMethod method = FeatureMethod::Cepstrum;
  CepstrumConfig cepstrum;
  CgpfConfig cgpf;

  int dims() const { return method == FeatureMethod::Cepstrum ? cepstrum.coeff_count : cgpf.dims(); }
  /// Bin count recorded in feature files; 0 for CGPF.
  int bins() const { return method == FeatureMethod::Cepstrum ? cepstrum.bin_count : 0; }
};

FeatureVector extract_features(const Image& img, const ExtractorConfig& cfg);

ExtractionInfo describe(const ExtractorConfig& cfg);

/// Rebuilds the extractor recorded in a model. Throws DimensionMismatch when
/// the recorded dims cannot be produced by that method.
ExtractorConfig extractor_for(const ExtractionInfo& info);

/// Worker count from STRIPID_THREADS (default 1).
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write
/// results into slot i, so output order never depends on scheduling.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace stripid
