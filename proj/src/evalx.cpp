#include "stripid/evalx.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "stripid/error.hpp"
#include "stripid/rng.hpp"

namespace stripid {

SplitIndices stratified_split_indices(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(d.class_count());
  for (std::size_t i = 0; i < d.size(); ++i) {
    by_class.at(static_cast<std::size_t>(d.samples[i].label)).push_back(i);
  }

  SplitIndices out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class '" + d.labels[c] + "' has " + std::to_string(members.size()) + " sample");
    }
    Rng rng(mix_seed(seed, c));
    rng.shuffle(std::span(members));
    // 1e-9 absorbs products like 0.8 * 5 landing a hair above an integer
    auto n_train = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(members.size()) - 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out;
  out.method = d.method;
  out.labels = d.labels;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(d.samples.at(i));
  return out;
}

Split stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  const SplitIndices idx = stratified_split_indices(d, train_fraction, seed);
  return {subset(d, idx.train), subset(d, idx.test)};
}

EvalReport evaluate(const Classifier& model, const Dataset& test) {
  const FeatureMethod method = method_of(model);
  if (test.method != method) {
    throw Error(ErrorCode::MethodMismatch, "test features are " + std::string(to_string(test.method)) +
                                               ", model expects " + std::string(to_string(method)));
  }
  if (test.labels != labels_of(model)) {
    throw Error(ErrorCode::InvalidArgument, "test label table differs from the model's");
  }
  const std::size_t classes = test.class_count();
  EvalReport r;
  r.labels = test.labels;
  r.classifier = kind_of(model);
  r.method = method;
  r.test_size = test.size();
  r.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  if (const auto* knn = std::get_if<KnnModel>(&model)) {
    r.train_size = knn->stored.size();
  }

  for (const auto& s : test.samples) {
    const Prediction p = predict(model, s.features);
    ++r.confusion[static_cast<std::size_t>(s.label)][static_cast<std::size_t>(p.label)];
  }
  std::size_t trace = 0;
  r.per_class_accuracy.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    trace += r.confusion[c][c];
    std::size_t row = 0;
    for (std::size_t v : r.confusion[c]) row += v;
    if (row > 0) r.per_class_accuracy[c] = static_cast<double>(r.confusion[c][c]) / static_cast<double>(row);
  }
  r.accuracy = r.test_size == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(r.test_size);
  return r;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "method: " << to_string(r.method) << '\n';
  os << "classifier: " << to_string(r.classifier) << '\n';
  os << "seed: " << r.seed << '\n';
  os << "train_size: " << r.train_size << '\n';
  os << "test_size: " << r.test_size << '\n';
  os << "accuracy: " << r.accuracy << '\n';
  for (std::size_t c = 0; c < r.labels.size(); ++c) {
    os << "class_accuracy." << r.labels[c] << ": " << r.per_class_accuracy[c] << '\n';
  }
  os << "confusion:\n";
  for (std::size_t c = 0; c < r.confusion.size(); ++c) {
    os << r.labels[c];
    for (std::size_t v : r.confusion[c]) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

std::string format_report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["method"] = to_string(r.method);
  j["classifier"] = to_string(r.classifier);
  j["seed"] = r.seed;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["accuracy"] = r.accuracy;
  j["labels"] = r.labels;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["confusion"] = r.confusion;
  return j.dump(2) + "\n";
}

SweepCurve size_sweep(const Dataset& full, std::span<const std::size_t> sizes,
                      std::span<const ClassifierSpec> classifiers, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(full.class_count());
  for (std::size_t i = 0; i < full.size(); ++i) {
    by_class[static_cast<std::size_t>(full.samples[i].label)].push_back(i);
  }
  std::size_t smallest = full.size();
  for (const auto& members : by_class) {
    if (!members.empty()) smallest = std::min(smallest, members.size());
  }
  for (std::size_t s : sizes) {
    if (s > smallest) {
      throw Error(ErrorCode::SizeTooLarge, "per-class size " + std::to_string(s) +
                                               " exceeds smallest class (" + std::to_string(smallest) + ")");
    }
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::InvalidArgument, "sizes must increase");
  }

  SweepCurve curve;
  for (std::size_t s : sizes) {
    std::vector<std::size_t> picked;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      std::vector<std::size_t> members = by_class[c];
      if (members.empty()) continue;
      Rng rng(mix_seed(mix_seed(seed, s), c));
      rng.shuffle(std::span(members));
      picked.insert(picked.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(s));
    }
    std::sort(picked.begin(), picked.end());
    const Dataset sub = subset(full, picked);
    const Split split = stratified_split(sub, 0.8, mix_seed(seed, 0xC0FFEEULL + s));
    for (const auto& spec : classifiers) {
      ClassifierSpec adjusted = spec;
      adjusted.k = std::min<int>(spec.k, static_cast<int>(split.train.size()));
      const Classifier model = train_classifier(split.train, adjusted);
      curve.points.push_back({s, sub.size(), spec.kind, evaluate(model, split.test).accuracy});
    }
  }
  return curve;
}

double separation_ratio(std::span<const std::vector<double>> class_a,
                        std::span<const std::vector<double>> class_b) {
  if (class_a.size() < 2 || class_b.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "separation_ratio needs at least 2 samples per class");
  }
  auto centroid = [](std::span<const std::vector<double>> xs) {
    std::vector<double> c(xs.front().size(), 0.0);
    for (const auto& x : xs) {
      if (x.size() != c.size()) throw Error(ErrorCode::LengthMismatch, "feature lengths differ");
      for (std::size_t j = 0; j < c.size(); ++j) c[j] += x[j];
    }
    for (double& v : c) v /= static_cast<double>(xs.size());
    return c;
  };
  auto spread = [](std::span<const std::vector<double>> xs, const std::vector<double>& c) {
    double s = 0.0;
    for (const auto& x : xs) s += euclidean(x, c);
    return s / static_cast<double>(xs.size());
  };
  const auto ca = centroid(class_a);
  const auto cb = centroid(class_b);
  const double between = euclidean(ca, cb);
  const double within = std::max(spread(class_a, ca), spread(class_b, cb));
  if (between == 0.0) return 0.0;
  if (within == 0.0) return kSeparationCap;
  return std::min(between / within, kSeparationCap);
}

}  // namespace stripid
