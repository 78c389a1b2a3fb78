#include "stripid/pipeline.hpp"
#include "stripid/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace stripid {

FeatureVector extract_features(const Image& img, const ExtractorConfig& cfg) {
  return cfg.method == FeatureMethod::Cepstrum ? cepstral_features(img, cfg.cepstrum)
                                               : cgpf_features(img, cfg.cgpf);
}

ExtractionInfo describe(const ExtractorConfig& cfg) {
  ExtractionInfo info;
  info.method = cfg.method;
  info.bins = static_cast<std::uint32_t>(cfg.bins());
  const bool cep = cfg.method == FeatureMethod::Cepstrum;
  info.width = static_cast<std::uint32_t>(cep ? cfg.cepstrum.width : cfg.cgpf.width);
  info.height = static_cast<std::uint32_t>(cep ? cfg.cepstrum.height : cfg.cgpf.height);
  info.dims = static_cast<std::uint32_t>(cfg.dims());
  return info;
}

ExtractorConfig extractor_for(const ExtractionInfo& info) {
  ExtractorConfig cfg;
  cfg.method = info.method;
  if (info.width < 1 || info.height < 1 || info.width > 1u << 15 || info.height > 1u << 15) {
    throw Error(ErrorCode::DimensionMismatch, "recorded canonical size is unusable");
  }
  const auto mismatch = [&] {
    return Error(ErrorCode::DimensionMismatch,
                 "a " + std::string(to_string(info.method)) + " extractor cannot produce " +
                     std::to_string(info.dims) + " dims");
  };
  if (info.method == FeatureMethod::Cepstrum) {
    cfg.cepstrum.width = static_cast<int>(info.width);
    cfg.cepstrum.height = static_cast<int>(info.height);
    cfg.cepstrum.bin_count = static_cast<int>(info.bins);
    cfg.cepstrum.coeff_count = static_cast<int>(info.dims);
    if (info.bins < 2 || info.bins > 1u << 20 || info.dims > info.bins) throw mismatch();
  } else {
    cfg.cgpf.width = static_cast<int>(info.width);
    cfg.cgpf.height = static_cast<int>(info.height);
    if (info.dims < 11 || (info.dims - 6) % 5 != 0) throw mismatch();
    cfg.cgpf.top_regions = static_cast<int>((info.dims - 6) / 5);
  }
  return cfg;
}

unsigned worker_count() {
  const char* env = std::getenv("STRIPID_THREADS");
  if (!env) return 1;
  const long v = std::strtol(env, nullptr, 10);
  return v < 1 ? 1u : static_cast<unsigned>(std::min(v, 256L));
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stripid
