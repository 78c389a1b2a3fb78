// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "stripid/cepstrum.hpp"
#include "stripid/cgpf.hpp"
#include "stripid/classify.hpp"
#include "stripid/commands.hpp"
#include "stripid/evalx.hpp"
#include "stripid/feature_file.hpp"
#include "stripid/imaging.hpp"
#include "stripid/pipeline.hpp"
#include "stripid/rng.hpp"
#include "stripid/synth.hpp"

namespace fs = std::filesystem;
using namespace stripid;
using cd = std::complex<double>;

namespace {

constexpr int kClasses = 12;
constexpr int kPerClass = 50;
constexpr std::uint64_t kDatasetSeed = 42;
constexpr std::uint64_t kSplitSeed = 7;
constexpr int kTwinClass = 0;

struct Gate {
  int failures = 0;

  void report(int id, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- oracles

ComplexPlane naive_dft(const Plane& f) {
  const int m = f.height();
  const int n = f.width();
  ComplexPlane out(n, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < n; ++l) {
      cd acc = 0.0;
      for (int x = 0; x < m; ++x) {
        for (int y = 0; y < n; ++y) {
          const double phase = -2.0 * std::numbers::pi * (double(k) * x / m + double(l) * y / n);
          acc += f.at(x, y) * cd(std::cos(phase), std::sin(phase));
        }
      }
      out.at(k, l) = acc / double(m * n);
    }
  }
  return out;
}

std::vector<double> naive_dct(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += f[i] * std::cos(std::numbers::pi * double(u) * (2.0 * double(i) + 1.0) / (2.0 * double(n)));
    }
    out[u] = (u == 0 ? 1.0 / std::numbers::sqrt2 : 1.0) * std::sqrt(2.0 / double(n)) * acc;
  }
  return out;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-2, 2);
  return m;
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

int brute_force_knn(const Dataset& d, const std::vector<double>& q, int k) {
  std::vector<std::pair<double, int>> all;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) s += std::pow(d.samples[i].features.values[j] - q[j], 2);
    all.emplace_back(std::sqrt(s), static_cast<int>(i));
  }
  std::sort(all.begin(), all.end());
  std::vector<int> votes(d.class_count(), 0);
  std::vector<double> summed(d.class_count(), 0.0);
  for (int i = 0; i < k; ++i) {
    const auto& [dist, idx] = all[static_cast<std::size_t>(i)];
    const auto label = static_cast<std::size_t>(d.samples[static_cast<std::size_t>(idx)].label);
    ++votes[label];
    summed[label] += dist;
  }
  int best = -1;
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] == 0) continue;
    const auto b = static_cast<std::size_t>(best);
    if (best < 0 || votes[c] > votes[b] || (votes[c] == votes[b] && summed[c] < summed[b])) best = static_cast<int>(c);
  }
  return best;
}

struct Axes {
  double major;
  double minor;
  double eccentricity;
};

// Principal axes of the pixel covariance by explicit rotation.
Axes moment_oracle(const BinaryPlane& b) {
  double n = 0, mr = 0, mc = 0;
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) {
      if (!b.at(r, c)) continue;
      n += 1;
      mr += r;
      mc += c;
    }
  }
  mr /= n;
  mc /= n;
  double srr = 0, scc = 0, src = 0;
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) {
      if (!b.at(r, c)) continue;
      srr += (r - mr) * (r - mr);
      scc += (c - mc) * (c - mc);
      src += (r - mr) * (c - mc);
    }
  }
  srr = srr / n + 1.0 / 12.0;
  scc = scc / n + 1.0 / 12.0;
  src /= n;
  const double theta = 0.5 * std::atan2(2.0 * src, srr - scc);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double a = ct * ct * srr + 2 * ct * st * src + st * st * scc;
  const double d = st * st * srr - 2 * ct * st * src + ct * ct * scc;
  const double hi = std::max(a, d);
  const double lo = std::max(std::min(a, d), 0.0);
  const double extent = std::max(b.height(), b.width());
  return {4.0 * std::sqrt(hi) / extent, 4.0 * std::sqrt(lo) / extent, std::sqrt(1.0 - lo / hi)};
}

// ---------------------------------------------------------------- criteria 1-5

void transforms(Gate& gate) {
  Rng rng(1001);
  double fft_err = 0.0;
  for (int m = 1; m <= 16; ++m) {
    for (int n = 1; n <= 16; ++n) {
      Plane p(n, m);
      for (double& v : p.values()) v = rng.uniform(0, 255);
      const ComplexPlane fast = fft2d(p);
      const ComplexPlane slow = naive_dft(p);
      for (std::size_t i = 0; i < fast.size(); ++i) {
        fft_err = std::max(fft_err, std::abs(fast.values()[i] - slow.values()[i]));
      }
    }
  }
  double dct_err = 0.0;
  double norm_err = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto v = random_vector(rng, n, -100, 100);
    const auto fast = dct1d(v);
    const auto slow = naive_dct(v);
    double e_in = 0.0, e_out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dct_err = std::max(dct_err, std::abs(fast[i] - slow[i]));
      e_in += v[i] * v[i];
      e_out += fast[i] * fast[i];
    }
    norm_err = std::max(norm_err, std::abs(e_out - e_in) / e_in);
  }
  gate.report(1, fft_err < 1e-9 && dct_err < 1e-9 && norm_err < 1e-9,
              "fft2d max err " + fmt("%.3g", fft_err) + ", dct1d max err " + fmt("%.3g", dct_err) +
                  ", norm rel err " + fmt("%.3g", norm_err));
}

void gradients(Gate& gate) {
  Rng rng(1002);
  const double h = 1e-5;
  double svm_worst = 0.0;
  int svm_done = 0;
  while (svm_done < 100) {
    const std::size_t m = 3 + rng.index(20);
    const std::size_t d = 1 + rng.index(8);
    const Matrix x = random_matrix(rng, m, d);
    std::vector<double> y(m);
    for (double& v : y) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const auto w = random_vector(rng, d, -1, 1);
    const double b = rng.uniform(-1, 1);
    const double lambda = rng.uniform(0, 0.5);
    bool near_kink = false;
    for (std::size_t i = 0; i < m; ++i) {
      double z = -b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x.row(i)[j];
      near_kink |= std::abs(1.0 - y[i] * z) < 1e-3;
    }
    if (near_kink) continue;
    ++svm_done;
    const SvmCost g = svm_cost_grad(w, b, x, y, lambda);
    std::vector<double> analytic = g.grad_w;
    analytic.push_back(g.grad_b);
    std::vector<double> numeric;
    for (std::size_t j = 0; j < d; ++j) {
      auto wp = w;
      auto wm = w;
      wp[j] += h;
      wm[j] -= h;
      numeric.push_back((svm_cost_grad(wp, b, x, y, lambda).cost - svm_cost_grad(wm, b, x, y, lambda).cost) / (2 * h));
    }
    numeric.push_back((svm_cost_grad(w, b + h, x, y, lambda).cost - svm_cost_grad(w, b - h, x, y, lambda).cost) / (2 * h));
    svm_worst = std::max(svm_worst, rel_err(analytic, numeric));
  }
  double lr_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.index(20);
    const std::size_t d = 1 + rng.index(8);
    const Matrix x = random_matrix(rng, m, d);
    std::vector<double> y(m);
    for (double& v : y) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
    const auto w = random_vector(rng, d, -2, 2);
    const LrCost g = lr_cost_grad(w, x, y);
    std::vector<double> numeric;
    for (std::size_t j = 0; j < d; ++j) {
      auto wp = w;
      auto wm = w;
      wp[j] += h;
      wm[j] -= h;
      numeric.push_back((lr_cost_grad(wp, x, y).cost - lr_cost_grad(wm, x, y).cost) / (2 * h));
    }
    lr_worst = std::max(lr_worst, rel_err(g.grad, numeric));
  }
  gate.report(2, svm_worst < 1e-5 && lr_worst < 1e-5,
              "worst rel err svm " + fmt("%.3g", svm_worst) + ", lr " + fmt("%.3g", lr_worst));
}

void anchors(Gate& gate) {
  Rng rng(1003);
  double lr_dev = 0.0;
  double svm_dev = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.index(40);
    const std::size_t d = 1 + rng.index(10);
    const Matrix x = random_matrix(rng, m, d);
    std::vector<double> y01(m);
    std::vector<double> ypm(m);
    for (std::size_t i = 0; i < m; ++i) {
      y01[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      ypm[i] = 2.0 * y01[i] - 1.0;
    }
    const std::vector<double> zero(d, 0.0);
    lr_dev = std::max(lr_dev, std::abs(lr_cost_grad(zero, x, y01).cost - std::numbers::ln2));
    svm_dev = std::max(svm_dev, std::abs(svm_cost_grad(zero, 0.0, x, ypm, 0.0).cost - 1.0));
  }
  const bool sig = sigmoid(0.0) == 0.5;
  gate.report(3, lr_dev <= 1e-12 && svm_dev <= 1e-12 && sig,
              "lr |J(0)-ln2| " + fmt("%.3g", lr_dev) + ", svm |J(0)-1| " + fmt("%.3g", svm_dev) +
                  ", sigmoid(0) " + fmt("%.17g", sigmoid(0.0)));
}

void knn_oracle(Gate& gate) {
  Rng rng(1004);
  Dataset d;
  for (int c = 0; c < 5; ++c) d.labels.push_back("c" + std::to_string(c));
  for (int i = 0; i < 200; ++i) {
    d.samples.push_back({{FeatureMethod::Cepstrum, random_vector(rng, 20, -1, 1)}, static_cast<int>(rng.index(5))});
  }
  int disagreements = 0;
  for (int k : {1, 3, 5}) {
    const KnnModel m = train_knn(d, k);
    for (int q = 0; q < 50; ++q) {
      const auto query = random_vector(rng, 20, -1, 1);
      if (knn_predict(m, {FeatureMethod::Cepstrum, query}).label != brute_force_knn(d, query, k)) ++disagreements;
    }
  }
  gate.report(4, disagreements == 0, std::to_string(disagreements) + " of 150 predictions disagree");
}

void geometry(Gate& gate) {
  const auto single = [](const BinaryPlane& b) {
    const auto regions = region_props(b, 1);
    return regions.size() == 1 ? regions.front() : RegionStats{};
  };

  BinaryPlane square(100, 100, 0);
  for (int r = 30; r < 40; ++r) {
    for (int c = 50; c < 60; ++c) square.at(r, c) = 1;
  }
  BinaryPlane disk(64, 64, 0);
  long disk_pixels = 0;
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      if (std::hypot(r - 31.5, c - 31.5) <= 20.0) {
        disk.at(r, c) = 1;
        ++disk_pixels;
      }
    }
  }
  BinaryPlane rect(120, 120, 0);
  for (int r = 10; r < 20; ++r) {
    for (int c = 10; c < 50; ++c) rect.at(r, c) = 1;
  }

  const RegionStats s = single(square);
  const RegionStats d = single(disk);
  const RegionStats t = single(rect);
  const bool areas = s.pixel_count == 100 && d.pixel_count == disk_pixels && t.pixel_count == 400;
  double moment_err = 0.0;
  for (const auto* pair : {&square, &disk, &rect}) {
    const RegionStats got = single(*pair);
    const Axes want = moment_oracle(*pair);
    moment_err = std::max({moment_err, std::abs(got.major_axis - want.major), std::abs(got.minor_axis - want.minor),
                           std::abs(got.eccentricity - want.eccentricity)});
  }
  const double ratio = t.minor_axis > 0 ? t.major_axis / t.minor_axis : 0.0;
  const bool ok = areas && moment_err < 1e-9 && d.eccentricity < 0.1 && std::abs(ratio - 4.0) <= 0.4;
  gate.report(5, ok,
              std::string("areas ") + (areas ? "exact" : "wrong") + ", moment err " + fmt("%.3g", moment_err) +
                  ", disk ecc " + fmt("%.4f", d.eccentricity) + ", rect axis ratio " + fmt("%.4f", ratio));
}

// ---------------------------------------------------------------- criteria 6-8

Dataset extract_all(const std::vector<ManifestEntry>& entries, FeatureMethod method) {
  ExtractorConfig cfg;
  cfg.method = method;
  std::vector<FeatureVector> features(entries.size());
  parallel_for(entries.size(), worker_count(),
               [&](std::size_t i) { features[i] = extract_features(load_image(entries[i].path), cfg); });
  Dataset d;
  d.method = method;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto it = std::find(d.labels.begin(), d.labels.end(), entries[i].label);
    if (it == d.labels.end()) it = d.labels.insert(d.labels.end(), entries[i].label);
    d.samples.push_back({std::move(features[i]), static_cast<int>(it - d.labels.begin())});
  }
  return d;
}

ClassifierSpec spec_of(ClassifierKind kind) {
  ClassifierSpec s;
  s.kind = kind;
  return s;
}

double accuracy(const Dataset& d, ClassifierKind kind) {
  const Split parts = stratified_split(d, 0.8, kSplitSeed);
  return evaluate(train_classifier(parts.train, spec_of(kind)), parts.test).accuracy;
}

void benchmark(Gate& gate, const fs::path& dir) {
  const auto manifest = gen_dataset(kClasses, kPerClass, AugmentSpec{}, kDatasetSeed, dir);
  const auto entries = read_manifest(manifest);
  const Dataset cep = extract_all(entries, FeatureMethod::Cepstrum);
  const Dataset cgpf = extract_all(entries, FeatureMethod::Cgpf);

  const double ck = accuracy(cep, ClassifierKind::Knn);
  const double cs = accuracy(cep, ClassifierKind::Svm);
  const double cl = accuracy(cep, ClassifierKind::Lr);
  const double gk = accuracy(cgpf, ClassifierKind::Knn);
  const double gs = accuracy(cgpf, ClassifierKind::Svm);
  const double gl = accuracy(cgpf, ClassifierKind::Lr);
  std::printf("        cepstrum  knn %.4f  svm %.4f  lr %.4f\n", ck, cs, cl);
  std::printf("        cgpf      knn %.4f  svm %.4f  lr %.4f\n", gk, gs, gl);
  const bool ok6 = ck >= 0.95 && cs >= 0.90 && gk >= 0.85 && ck >= gk && cs >= gs && ck >= cl;
  gate.report(6, ok6,
              "cep knn " + fmt("%.4f", ck) + " (>=0.95), cep svm " + fmt("%.4f", cs) + " (>=0.90), cgpf knn " +
                  fmt("%.4f", gk) + " (>=0.85), cep>=cgpf knn/svm " + (ck >= gk && cs >= gs ? "yes" : "no") +
                  ", knn>=lr " + (ck >= cl ? "yes" : "no"));

  const std::vector<std::size_t> sizes{2, 5, 10, 20, 40};
  const std::vector<ClassifierSpec> specs{spec_of(ClassifierKind::Knn), spec_of(ClassifierKind::Svm),
                                          spec_of(ClassifierKind::Lr)};
  const SweepCurve curve = size_sweep(cep, sizes, specs, kSplitSeed);
  const auto at = [&](std::size_t per_class, ClassifierKind kind) {
    for (const auto& p : curve.points) {
      if (p.per_class == per_class && p.classifier == kind) return p.accuracy;
    }
    return -1.0;
  };
  for (const auto& p : curve.points) {
    std::printf("        sweep %2zu/class (total %3zu) %-3s %.4f\n", p.per_class, p.total,
                std::string(to_string(p.classifier)).c_str(), p.accuracy);
  }
  bool grows = true;
  for (const auto& s : specs) grows &= at(40, s.kind) > at(5, s.kind);
  const double small_knn = at(2, ClassifierKind::Knn);
  gate.report(7, small_knn < 0.5 && grows,
              "knn at total 24 " + fmt("%.4f", small_knn) + " (<0.5), 40/class beats 5/class for every model " +
                  (grows ? "yes" : "no"));

  const auto specs_twin = dataset_specs(kClasses, kDatasetSeed, TwinRequest{kTwinClass, 20.0});
  std::vector<std::vector<double>> original;
  std::vector<std::vector<double>> twin;
  const StripSpec& a = specs_twin[static_cast<std::size_t>(kTwinClass)];
  const StripSpec& b = specs_twin.back();
  for (int i = 0; i < kPerClass; ++i) {
    original.push_back(cepstral_features(render_sample(a, AugmentSpec{}, sample_seed(kDatasetSeed, a.class_id, i))).values);
    twin.push_back(cepstral_features(render_sample(b, AugmentSpec{}, sample_seed(kDatasetSeed, b.class_id, i))).values);
  }
  const double ratio = separation_ratio(original, twin);
  gate.report(8, ratio > 1.0, "cepstral separation ratio of class " + std::to_string(kTwinClass) +
                                  " and its 20 degree twin " + fmt("%.4f", ratio) + " (>1)");
}

// ---------------------------------------------------------------- criterion 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Gate& gate, const fs::path& dir) {
  std::vector<std::string> failures;
  std::string last_out;
  const auto run = [&](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    if (code != 0) failures.push_back(args.front() + " exited " + std::to_string(code) + ": " + err.str());
    last_out = out.str();
  };
  // Each command runs twice into twin paths (rep 0 and 1) and the products must match.
  const auto twice = [&](const std::function<std::vector<std::string>(const fs::path&)>& make,
                         const std::vector<std::string>& products) {
    std::string outs[2];
    for (int rep = 0; rep < 2; ++rep) {
      run(make(dir / ("rep" + std::to_string(rep))));
      outs[rep] = last_out;
    }
    const std::string name = make(dir / "rep0").front();
    // Output may echo the rep directory itself.
    const std::string rep0 = (dir / "rep0").string();
    const std::string rep1 = (dir / "rep1").string();
    for (auto pos = outs[1].find(rep1); pos != std::string::npos; pos = outs[1].find(rep1, pos)) {
      outs[1].replace(pos, rep1.size(), rep0);
    }
    if (outs[0] != outs[1]) failures.push_back(name + " stdout differs");
    for (const auto& p : products) {
      if (slurp(dir / "rep0" / p) != slurp(dir / "rep1" / p)) failures.push_back(name + " " + p + " differs");
    }
  };
  const auto s = [](const fs::path& p) { return p.string(); };

  twice([&](const fs::path& r) {
    return std::vector<std::string>{"synth", "--classes", "4", "--per-class", "6", "--seed", "3", "--out",
                                    s(r / "data"), "--hue-twin-of", "1", "--offset", "20"};
  }, {"data/manifest.csv"});
  for (const auto& e : read_manifest(dir / "rep0/data/manifest.csv")) {
    const auto rel = fs::relative(e.path, dir / "rep0");
    if (slurp(e.path) != slurp(dir / "rep1" / rel)) failures.push_back("synth image " + rel.string() + " differs");
  }
  const auto first_image = fs::relative(read_manifest(dir / "rep0/data/manifest.csv").front().path, dir / "rep0");
  for (const std::string method : {"cepstrum", "cgpf"}) {
    twice([&](const fs::path& r) {
      return std::vector<std::string>{"extract", "--method", method, "--manifest", s(r / "data/manifest.csv"),
                                      "--out", s(r / (method + ".csv"))};
    }, {method + ".csv"});
    for (const std::string kind : {"knn", "svm", "lr"}) {
      const std::string model = method + "_" + kind + ".model";
      twice([&](const fs::path& r) {
        return std::vector<std::string>{"train", "--model", kind, "--features", s(r / (method + ".csv")), "--out",
                                        s(r / model)};
      }, {model});
      twice([&](const fs::path& r) {
        return std::vector<std::string>{"predict", "--model", s(r / model), "--image", s(r / first_image)};
      }, {});
      twice([&](const fs::path& r) {
        return std::vector<std::string>{"eval", "--features", s(r / (method + ".csv")), "--model", kind,
                                        "--split", "0.5", "--seed", "5", "--json"};
      }, {});
    }
    twice([&](const fs::path& r) {
      return std::vector<std::string>{"sweep", "--manifest", s(r / "data/manifest.csv"), "--sizes", "2,4,6",
                                      "--models", "knn,svm,lr", "--seed", "4", "--method", method, "--out",
                                      s(r / (method + "_sweep.csv"))};
    }, {method + "_sweep.csv"});
  }
  std::string detail = failures.empty() ? "synth, extract, train, predict, eval and sweep reruns are byte-identical"
                                        : failures.front();
  if (failures.size() > 1) detail += " (+" + std::to_string(failures.size() - 1) + " more)";
  gate.report(9, failures.empty(), detail);
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "stripid_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  Gate gate;
  try {
    transforms(gate);
    gradients(gate);
    anchors(gate);
    knn_oracle(gate);
    geometry(gate);
    benchmark(gate, scratch / "benchmark");
    determinism(gate, scratch / "determinism");
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    ++gate.failures;
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);
  std::printf("%d criteria failed\n", gate.failures);
  return gate.failures == 0 ? 0 : 1;
}
