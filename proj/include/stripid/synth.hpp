#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stripid/imaging.hpp"

namespace stripid {

struct StripSpec {
  int class_id = 0;
  Rgb base_color;
  int pill_rows = 2;
  int pill_cols = 4;
  double pill_semi_x = 12.0;  // horizontal semi-axis, pixels
  double pill_semi_y = 12.0;
  Rgb pill_color;
  std::uint64_t texture_seed = 0;
  double grain_length = 1.0;  // correlation length of the foil grain, pixels

  friend bool operator==(const StripSpec&, const StripSpec&) = default;
};

struct AugmentSpec {
  double brightness_jitter = 0.1;  // +/- fraction
  double noise_sigma = 4.0;        // gray levels
  double scale_jitter = 0.1;       // +/- fraction
  double hue_jitter = 5.0;         // +/- degrees

  static AugmentSpec none() { return {0.0, 0.0, 0.0, 0.0}; }
};

// Random placement under the 60-unit floor jams at around 40 colors; 32
// leaves room for every seed tried.
inline constexpr int kMaxSynthClasses = 32;
inline constexpr double kMinBaseColorDistance = 60.0;
inline constexpr double kGrainLengthMin = 0.4;
inline constexpr double kGrainLengthMax = 4.0;

/// Deterministic class specs with pairwise base-color distance >= 60,
/// distinct (grid, pill shape) combinations and grain lengths spread
/// geometrically over [kGrainLengthMin, kGrainLengthMax]. Throws TooManyClasses above
/// kMaxSynthClasses or when the color constraint cannot be met.
std::vector<StripSpec> gen_class_specs(int n_classes, std::uint64_t seed);

/// Rotates an RGB color about the gray axis (preserves the channel mean).
Rgb rotate_hue(Rgb c, double degrees);

/// Same spec with base and pill colors rotated in hue.
StripSpec hue_twin(const StripSpec& spec, double offset_degrees);

/// Clean strip at the canonical size, before augmentation.
Image render_strip(const StripSpec& spec, std::uint64_t sample_seed);

// Augmentation steps, applied by render_sample in this order.
Image scale_brightness(const Image& img, double factor);
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);
Image rescale_and_recanonicalize(const Image& img, double scale);
Image rotate_image_hue(const Image& img, double degrees);

Image render_sample(const StripSpec& spec, const AugmentSpec& aug, std::uint64_t sample_seed);

/// Seed of sample `index` of class `class_index` within a dataset.
std::uint64_t sample_seed(std::uint64_t dataset_seed, int class_index, int index);

std::string class_label(const StripSpec& spec);

struct TwinRequest {
  int of_class = 0;
  double offset_degrees = 20.0;
};

/// Class specs of a dataset: gen_class_specs plus the optional hue twin,
/// which takes class id n_classes.
std::vector<StripSpec> dataset_specs(int n_classes, std::uint64_t seed,
                                     const std::optional<TwinRequest>& twin = std::nullopt);

/// Writes <out_dir>/<label>/<label>_<index>.png and <out_dir>/manifest.csv
/// (header `path,label`, relative paths). Returns the manifest path.
std::filesystem::path gen_dataset(int n_classes, int per_class, const AugmentSpec& aug,
                                  std::uint64_t seed, const std::filesystem::path& out_dir,
                                  const std::optional<TwinRequest>& twin = std::nullopt);

}  // namespace stripid
