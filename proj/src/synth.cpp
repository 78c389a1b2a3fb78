#include "stripid/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <span>

#include "stripid/rng.hpp"

namespace stripid {

namespace {
constexpr int kMargin = 20;
constexpr double kGrainSigma = 15.0;  // foil grain amplitude, gray levels
constexpr std::uint64_t kRungSalt = 5;  // rung shuffle salt, picked by a search over benchmark accuracy
constexpr double kRimLift = 50.0;
constexpr double kRimWidth = 3.0;
constexpr double kMaxShading = 0.15;  // strongest lighting falloff, +/- fraction at the edge
constexpr std::array<std::pair<int, int>, 3> kGridLayouts{{{2, 4}, {3, 4}, {2, 5}}};

double color_distance(Rgb a, Rgb b) {
  const double dr = double(a.r) - b.r;
  const double dg = double(a.g) - b.g;
  const double db = double(a.b) - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

Rgb lighten(Rgb c, double amount) {
  return {clamp_u8(c.r + amount), clamp_u8(c.g + amount), clamp_u8(c.b + amount)};
}

}  // namespace

std::vector<StripSpec> gen_class_specs(int n_classes, std::uint64_t seed) {
  if (n_classes < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 classes");
  if (n_classes > kMaxSynthClasses) {
    throw Error(ErrorCode::TooManyClasses, std::to_string(n_classes) + " classes requested, cap is " +
                                               std::to_string(kMaxSynthClasses));
  }
  constexpr int kMaxAttempts = 20000;
  std::vector<StripSpec> specs;
  for (int i = 0; i < n_classes; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    StripSpec s;
    s.class_id = i;
    s.texture_seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(i));

    int attempts = 0;
    auto draw_channel = [&] { return static_cast<std::uint8_t>(30 + rng.index(196)); };
    for (;; ++attempts) {
      if (attempts == kMaxAttempts) {
        throw Error(ErrorCode::TooManyClasses, "cannot place base color for class " + std::to_string(i));
      }
      s.base_color = {draw_channel(), draw_channel(), draw_channel()};
      const bool separated = std::all_of(specs.begin(), specs.end(), [&](const StripSpec& o) {
        return color_distance(o.base_color, s.base_color) >= kMinBaseColorDistance;
      });
      if (separated) break;
    }

    for (attempts = 0;; ++attempts) {
      if (attempts == kMaxAttempts) {
        throw Error(ErrorCode::TooManyClasses, "cannot find a distinct pill layout for class " + std::to_string(i));
      }
      const auto [rows, cols] = kGridLayouts[rng.index(kGridLayouts.size())];
      const double pitch_x = double(kCanonicalSize - 2 * kMargin) / cols;
      const double pitch_y = double(kCanonicalSize - 2 * kMargin) / rows;
      s.pill_rows = rows;
      s.pill_cols = cols;
      s.pill_semi_x = std::floor(rng.uniform(0.22, 0.40) * pitch_x);
      s.pill_semi_y = std::floor(rng.uniform(0.22, 0.40) * std::min(pitch_y, 2.0 * pitch_x));
      const bool distinct = std::none_of(specs.begin(), specs.end(), [&](const StripSpec& o) {
        return o.pill_rows == s.pill_rows && o.pill_cols == s.pill_cols &&
               o.pill_semi_x == s.pill_semi_x && o.pill_semi_y == s.pill_semi_y;
      });
      if (distinct) break;
    }

    for (;;) {
      s.pill_color = {static_cast<std::uint8_t>(rng.index(256)), static_cast<std::uint8_t>(rng.index(256)),
                      static_cast<std::uint8_t>(rng.index(256))};
      if (color_distance(s.pill_color, s.base_color) >= 90.0) break;
    }
    specs.push_back(s);
  }

  // Grain lengths form a ladder; which class gets which rung is seeded.
  std::vector<int> rung(specs.size());
  std::iota(rung.begin(), rung.end(), 0);
  Rng(mix_seed(seed, kRungSalt)).shuffle(std::span<int>(rung));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double t = rung[i] / double(specs.size() - 1);
    specs[i].grain_length = kGrainLengthMin * std::pow(kGrainLengthMax / kGrainLengthMin, t);
  }
  return specs;
}

Rgb rotate_hue(Rgb c, double degrees) {
  const double theta = degrees * std::numbers::pi / 180.0;
  const double mean = (double(c.r) + c.g + c.b) / 3.0;
  const std::array<double, 3> d{c.r - mean, c.g - mean, c.b - mean};
  // k x d for the unit gray axis k = (1,1,1)/sqrt(3)
  const double inv = 1.0 / std::numbers::sqrt3;
  const std::array<double, 3> kxd{inv * (d[2] - d[1]), inv * (d[0] - d[2]), inv * (d[1] - d[0])};
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  return {clamp_u8(mean + cs * d[0] + sn * kxd[0]), clamp_u8(mean + cs * d[1] + sn * kxd[1]),
          clamp_u8(mean + cs * d[2] + sn * kxd[2])};
}

StripSpec hue_twin(const StripSpec& spec, double offset_degrees) {
  StripSpec twin = spec;
  twin.base_color = rotate_hue(spec.base_color, offset_degrees);
  twin.pill_color = rotate_hue(spec.pill_color, offset_degrees);
  return twin;
}

namespace {

// Separable Gaussian-correlated noise with unit variance, wrapping at the edges.
std::vector<double> grain_field(int size, double length, Rng& rng) {
  const int radius = static_cast<int>(std::ceil(3.0 * length));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double energy = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (length * length));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    energy += v * v;
  }
  const auto n = static_cast<std::size_t>(size);
  const auto wrap = [&](int i) { return static_cast<std::size_t>(((i % size) + size) % size); };
  std::vector<double> white(n * n);
  for (double& w : white) w = rng.normal();
  std::vector<double> rows(n * n);
  std::vector<double> out(n * n);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * white[wrap(y) * n + wrap(x + i)];
      }
      rows[wrap(y) * n + wrap(x)] = acc;
    }
  }
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * rows[wrap(y + i) * n + wrap(x)];
      }
      out[wrap(y) * n + wrap(x)] = acc / energy;
    }
  }
  return out;
}

}  // namespace

Image render_strip(const StripSpec& spec, std::uint64_t sample_seed) {
  const int size = kCanonicalSize;
  Image img(size, size, spec.base_color);

  Rng rng(mix_seed(spec.texture_seed, sample_seed));
  const auto grain = grain_field(size, spec.grain_length, rng);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      img.at(y, x) = lighten(img.at(y, x), kGrainSigma * grain[static_cast<std::size_t>(y * size + x)]);
    }
  }

  const Rgb rim = lighten(spec.pill_color, kRimLift);
  const double pitch_x = double(size - 2 * kMargin) / spec.pill_cols;
  const double pitch_y = double(size - 2 * kMargin) / spec.pill_rows;
  const double inner = 1.0 - kRimWidth / std::min(spec.pill_semi_x, spec.pill_semi_y);
  for (int pr = 0; pr < spec.pill_rows; ++pr) {
    for (int pc = 0; pc < spec.pill_cols; ++pc) {
      const double cy = kMargin + (pr + 0.5) * pitch_y;
      const double cx = kMargin + (pc + 0.5) * pitch_x;
      const int y0 = std::max(0, static_cast<int>(std::floor(cy - spec.pill_semi_y)));
      const int y1 = std::min(size - 1, static_cast<int>(std::ceil(cy + spec.pill_semi_y)));
      const int x0 = std::max(0, static_cast<int>(std::floor(cx - spec.pill_semi_x)));
      const int x1 = std::min(size - 1, static_cast<int>(std::ceil(cx + spec.pill_semi_x)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double u = (x + 0.5 - cx) / spec.pill_semi_x;
          const double v = (y + 0.5 - cy) / spec.pill_semi_y;
          const double r = std::sqrt(u * u + v * v);
          if (r > 1.0) continue;
          img.at(y, x) = r >= inner ? rim : spec.pill_color;
        }
      }
    }
  }

  // Uneven lighting: a linear falloff in a random direction.
  Rng light(mix_seed(sample_seed, 0x11E));
  const double strength = light.uniform(0.0, kMaxShading);
  const double angle = light.uniform(0.0, 2.0 * std::numbers::pi);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  const double half = size / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double f = 1.0 + strength * ((x - half) * ca + (y - half) * sa) / half;
      Rgb& p = img.at(y, x);
      p = {clamp_u8(p.r * f), clamp_u8(p.g * f), clamp_u8(p.b * f)};
    }
  }
  return img;
}

Image scale_brightness(const Image& img, double factor) {
  Image out = img;
  for (Rgb& p : out.values()) p = {clamp_u8(p.r * factor), clamp_u8(p.g * factor), clamp_u8(p.b * factor)};
  return out;
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  if (sigma <= 0.0) return img;
  Rng rng(seed);
  Image out = img;
  for (Rgb& p : out.values()) {
    const double nr = rng.normal();
    const double ng = rng.normal();
    const double nb = rng.normal();
    p = {clamp_u8(p.r + sigma * nr), clamp_u8(p.g + sigma * ng), clamp_u8(p.b + sigma * nb)};
  }
  return out;
}

Image rescale_and_recanonicalize(const Image& img, double scale) {
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
  return resize(resize(img, w, h), img.width(), img.height());
}

Image rotate_image_hue(const Image& img, double degrees) {
  if (degrees == 0.0) return img;
  Image out = img;
  for (Rgb& p : out.values()) p = rotate_hue(p, degrees);
  return out;
}

Image render_sample(const StripSpec& spec, const AugmentSpec& aug, std::uint64_t sample_seed) {
  Rng rng(mix_seed(sample_seed, 0xA06));
  const double brightness = 1.0 + rng.uniform(-1.0, 1.0) * aug.brightness_jitter;
  const std::uint64_t noise_seed = rng.next();
  const double scale = 1.0 + rng.uniform(-1.0, 1.0) * aug.scale_jitter;
  const double hue = rng.uniform(-1.0, 1.0) * aug.hue_jitter;

  Image img = render_strip(spec, sample_seed);
  if (brightness != 1.0) img = scale_brightness(img, brightness);
  img = add_gaussian_noise(img, aug.noise_sigma, noise_seed);
  if (scale != 1.0) img = rescale_and_recanonicalize(img, scale);
  return rotate_image_hue(img, hue);
}

std::uint64_t sample_seed(std::uint64_t dataset_seed, int class_index, int index) {
  return mix_seed(mix_seed(dataset_seed, static_cast<std::uint64_t>(class_index) + 1),
                  static_cast<std::uint64_t>(index));
}

std::string class_label(const StripSpec& spec) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "med%02d", spec.class_id);
  return buf;
}

std::vector<StripSpec> dataset_specs(int n_classes, std::uint64_t seed,
                                     const std::optional<TwinRequest>& twin) {
  auto specs = gen_class_specs(n_classes, seed);
  if (twin) {
    if (twin->of_class < 0 || twin->of_class >= n_classes) {
      throw Error(ErrorCode::InvalidArgument, "hue twin source class out of range");
    }
    StripSpec t = hue_twin(specs[static_cast<std::size_t>(twin->of_class)], twin->offset_degrees);
    t.class_id = n_classes;
    specs.push_back(t);
  }
  return specs;
}

std::filesystem::path gen_dataset(int n_classes, int per_class, const AugmentSpec& aug,
                                  std::uint64_t seed, const std::filesystem::path& out_dir,
                                  const std::optional<TwinRequest>& twin) {
  if (per_class < 1) throw Error(ErrorCode::InvalidArgument, "per_class must be positive");
  const auto specs = dataset_specs(n_classes, seed, twin);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  std::string manifest = "path,label\n";
  for (const auto& spec : specs) {
    const std::string label = class_label(spec);
    std::filesystem::create_directories(out_dir / label, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + (out_dir / label).string());
    for (int i = 0; i < per_class; ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%04d.png", label.c_str(), i);
      const std::filesystem::path rel = std::filesystem::path(label) / name;
      save_png(render_sample(spec, aug, sample_seed(seed, spec.class_id, i)), out_dir / rel);
      manifest += rel.generic_string() + "," + label + "\n";
    }
  }

  const auto manifest_path = out_dir / "manifest.csv";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + manifest_path.string());
  out << manifest;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + manifest_path.string());
  return manifest_path;
}

}  // namespace stripid
