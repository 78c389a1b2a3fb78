#include "stripid/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stripid/error.hpp"

namespace stripid {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_query(FeatureMethod expected_method, std::size_t expected_dims, const FeatureVector& x) {
  if (x.method != expected_method) {
    throw Error(ErrorCode::MethodMismatch, "model expects " + std::string(to_string(expected_method)) +
                                               " features, got " + std::string(to_string(x.method)));
  }
  if (x.values.size() != expected_dims) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(expected_dims) +
                                                  " dims, got " + std::to_string(x.values.size()));
  }
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(labels.size(), 0);
  for (const auto& s : samples) ++counts.at(static_cast<std::size_t>(s.label));
  return counts;
}

std::size_t Dataset::present_classes() const {
  const auto counts = class_counts();
  return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                [](std::size_t c) { return c > 0; }));
}

void Dataset::validate() const {
  const std::size_t d = dims();
  for (const auto& s : samples) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= labels.size()) {
      throw Error(ErrorCode::InvalidArgument, "label index out of range");
    }
    if (s.features.method != method) {
      throw Error(ErrorCode::MethodMismatch, "dataset mixes feature methods");
    }
    if (s.features.values.size() != d) {
      throw Error(ErrorCode::DimensionMismatch, "dataset mixes feature lengths");
    }
    for (double v : s.features.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite feature value");
    }
  }
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "euclidean on vectors of length " +
                                               std::to_string(x.size()) + " and " +
                                               std::to_string(y.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

KnnModel train_knn(Dataset train, int k) {
  train.validate();
  if (train.samples.empty()) throw Error(ErrorCode::EmptyDataset, "no training samples");
  if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "k must lie in [1, " + std::to_string(train.size()) + "], got " + std::to_string(k));
  }
  return {k, std::move(train)};
}

KnnPrediction knn_predict(const KnnModel& m, const FeatureVector& x) {
  check_query(m.stored.method, m.stored.dims(), x);
  const std::size_t n = m.stored.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = euclidean(m.stored.samples[i].features.values, x.values);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto k = static_cast<std::size_t>(m.k);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](int a, int b) {
                      return dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)]
                                 ? dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)]
                                 : a < b;
                    });

  const std::size_t classes = m.stored.class_count();
  std::vector<int> votes(classes, 0);
  std::vector<double> summed(classes, 0.0);
  KnnPrediction out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>(order[i]);
    const auto label = static_cast<std::size_t>(m.stored.samples[idx].label);
    ++votes[label];
    summed[label] += dist[idx];
    out.neighbours.push_back(order[i]);
    out.distances.push_back(dist[idx]);
  }

  int best = -1;
  for (std::size_t c = 0; c < classes; ++c) {
    if (votes[c] == 0) continue;
    if (best < 0) {
      best = static_cast<int>(c);
      continue;
    }
    const auto b = static_cast<std::size_t>(best);
    if (votes[c] > votes[b] || (votes[c] == votes[b] && summed[c] < summed[b])) {
      best = static_cast<int>(c);
    }
  }
  out.label = best;
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

SvmCost svm_cost_grad(std::span<const double> w, double b, const Matrix& x,
                      std::span<const double> y, double lambda) {
  if (x.cols != w.size() || x.rows != y.size() || x.rows == 0) {
    throw Error(ErrorCode::DimensionMismatch, "svm_cost_grad dimensions disagree");
  }
  const auto m = static_cast<double>(x.rows);
  SvmCost out;
  out.grad_w.assign(w.size(), 0.0);
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    const double slack = 1.0 - y[i] * (dot(w, xi) - b);
    if (slack > 0.0) {
      hinge += slack;
      for (std::size_t j = 0; j < w.size(); ++j) out.grad_w[j] -= y[i] * xi[j];
      out.grad_b += y[i];
    }
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  out.cost = hinge / m + lambda * norm2;
  for (std::size_t j = 0; j < w.size(); ++j) out.grad_w[j] = out.grad_w[j] / m + 2.0 * lambda * w[j];
  out.grad_b /= m;
  return out;
}

LrCost lr_cost_grad(std::span<const double> w, const Matrix& x, std::span<const double> y) {
  if (x.cols != w.size() || x.rows != y.size() || x.rows == 0) {
    throw Error(ErrorCode::DimensionMismatch, "lr_cost_grad dimensions disagree");
  }
  const auto m = static_cast<double>(x.rows);
  LrCost out;
  out.grad.assign(w.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    const double z = dot(w, xi);
    // -[y ln h + (1-y) ln(1-h)] = softplus(z) - y z
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    total += softplus - y[i] * z;
    const double residual = sigmoid(z) - y[i];
    for (std::size_t j = 0; j < w.size(); ++j) out.grad[j] += residual * xi[j];
  }
  out.cost = total / m;
  for (double& g : out.grad) g /= m;
  return out;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "standardizer dimension mismatch");
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

Standardizer fit_standardizer(const Dataset& train) {
  if (train.samples.empty()) throw Error(ErrorCode::EmptyDataset, "cannot standardize zero samples");
  const std::size_t d = train.dims();
  const auto n = static_cast<double>(train.size());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = train.samples.front().features.values[j];
    double hi = lo;
    double sum = 0.0;
    for (const auto& smp : train.samples) {
      const double v = smp.features.values[j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (lo == hi) {
      s.mean[j] = lo;
      continue;
    }
    s.mean[j] = sum / n;
    double ss = 0.0;
    for (const auto& smp : train.samples) {
      const double dv = smp.features.values[j] - s.mean[j];
      ss += dv * dv;
    }
    // Spread at rounding level (e.g. a coefficient that is constant up to
    // summation error) counts as zero variance; dividing by it would blow
    // rounding noise up to unit variance.
    const double sd = std::sqrt(ss / n);
    s.scale[j] = sd > 1e-9 * std::abs(s.mean[j]) ? sd : 1.0;
  }
  return s;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || iterations < 1 || !(lambda >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0, iterations >= 1, lambda >= 0");
  }
}

LinearModel train_linear(const Dataset& train, LinearKind kind, const TrainConfig& cfg,
                         CostTrace* trace) {
  cfg.validate();
  train.validate();
  if (train.size() < 2) throw Error(ErrorCode::EmptyDataset, "need at least 2 training samples");
  if (train.present_classes() < 2) throw Error(ErrorCode::SingleClass, "need at least 2 classes");

  const std::size_t d = train.dims();
  const std::size_t m = train.size();
  const std::size_t classes = train.class_count();

  LinearModel model;
  model.kind = kind;
  model.method = train.method;
  model.lambda = cfg.lambda;
  model.labels = train.labels;
  model.standardizer = fit_standardizer(train);
  model.weights = Matrix(classes, d);
  model.bias.assign(classes, 0.0);

  const std::size_t cols = kind == LinearKind::Lr ? d + 1 : d;
  Matrix x(m, cols, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto z = model.standardizer.apply(train.samples[i].features.values);
    std::copy(z.begin(), z.end(), x.row(i).begin());
  }

  if (trace) trace->assign(classes, {});
  std::vector<double> y(m);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      const bool positive = static_cast<std::size_t>(train.samples[i].label) == c;
      y[i] = kind == LinearKind::Svm ? (positive ? 1.0 : -1.0) : (positive ? 1.0 : 0.0);
    }
    std::vector<double> w(cols, 0.0);
    double b = 0.0;
    for (int it = 0; it < cfg.iterations; ++it) {
      if (kind == LinearKind::Svm) {
        const SvmCost g = svm_cost_grad(w, b, x, y, cfg.lambda);
        if (trace) (*trace)[c].push_back(g.cost);
        for (std::size_t j = 0; j < cols; ++j) w[j] -= cfg.learning_rate * g.grad_w[j];
        b -= cfg.learning_rate * g.grad_b;
      } else {
        const LrCost g = lr_cost_grad(w, x, y);
        if (trace) (*trace)[c].push_back(g.cost);
        for (std::size_t j = 0; j < cols; ++j) w[j] -= cfg.learning_rate * g.grad[j];
      }
    }
    std::copy_n(w.begin(), d, model.weights.row(c).begin());
    model.bias[c] = kind == LinearKind::Svm ? b : w[d];
  }
  return model;
}

int argmax(std::span<const double> scores) {
  int best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Prediction linear_predict(const LinearModel& m, const FeatureVector& x) {
  check_query(m.method, m.weights.cols, x);
  const auto z = m.standardizer.apply(x.values);
  Prediction out;
  out.scores.resize(m.weights.rows);
  for (std::size_t c = 0; c < m.weights.rows; ++c) {
    const double raw = dot(m.weights.row(c), z);
    out.scores[c] = m.kind == LinearKind::Svm ? raw - m.bias[c] : sigmoid(raw + m.bias[c]);
  }
  out.label = argmax(out.scores);
  return out;
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Lr: return "lr";
  }
  return "unknown";
}

std::optional<ClassifierKind> parse_classifier(std::string_view tag) {
  if (tag == "knn") return ClassifierKind::Knn;
  if (tag == "svm") return ClassifierKind::Svm;
  if (tag == "lr") return ClassifierKind::Lr;
  return std::nullopt;
}

ClassifierKind kind_of(const Classifier& c) {
  if (const auto* lin = std::get_if<LinearModel>(&c)) {
    return lin->kind == LinearKind::Svm ? ClassifierKind::Svm : ClassifierKind::Lr;
  }
  return ClassifierKind::Knn;
}

FeatureMethod method_of(const Classifier& c) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KnnModel>) {
          return m.stored.method;
        } else {
          return m.method;
        }
      },
      c);
}

std::size_t dims_of(const Classifier& c) {
  if (const auto* knn = std::get_if<KnnModel>(&c)) return knn->stored.dims();
  return std::get<LinearModel>(c).weights.cols;
}

const std::vector<std::string>& labels_of(const Classifier& c) {
  if (const auto* knn = std::get_if<KnnModel>(&c)) return knn->stored.labels;
  return std::get<LinearModel>(c).labels;
}

Classifier train_classifier(const Dataset& train, const ClassifierSpec& spec) {
  switch (spec.kind) {
    case ClassifierKind::Knn:
      if (train.present_classes() < 2) throw Error(ErrorCode::SingleClass, "need at least 2 classes");
      return train_knn(train, spec.k);
    case ClassifierKind::Svm: return train_linear(train, LinearKind::Svm, spec.train);
    case ClassifierKind::Lr: return train_linear(train, LinearKind::Lr, spec.train);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classifier kind");
}

Prediction predict(const Classifier& c, const FeatureVector& x) {
  if (const auto* knn = std::get_if<KnnModel>(&c)) {
    const KnnPrediction p = knn_predict(*knn, x);
    Prediction out;
    out.label = p.label;
    out.scores.assign(knn->stored.class_count(), 0.0);
    for (int idx : p.neighbours) {
      out.scores[static_cast<std::size_t>(knn->stored.samples[static_cast<std::size_t>(idx)].label)] +=
          1.0 / knn->k;
    }
    return out;
  }
  return linear_predict(std::get<LinearModel>(c), x);
}

}  // namespace stripid
