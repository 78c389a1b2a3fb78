#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stripid/feature.hpp"

namespace stripid {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct Sample {
  FeatureVector features;
  int label = 0;
};

struct Dataset {
  FeatureMethod method = FeatureMethod::Cepstrum;
  std::vector<Sample> samples;
  std::vector<std::string> labels;

  std::size_t size() const { return samples.size(); }
  std::size_t dims() const { return samples.empty() ? 0 : samples.front().features.values.size(); }
  std::size_t class_count() const { return labels.size(); }
  /// Number of samples per label index.
  std::vector<std::size_t> class_counts() const;
  /// Number of labels with at least one sample.
  std::size_t present_classes() const;

  /// Checks label range, a single method tag, one length, and finite values.
  void validate() const;
};

double euclidean(std::span<const double> x, std::span<const double> y);

// ---- KNN ----

struct KnnModel {
  int k = 1;
  Dataset stored;
};

struct KnnPrediction {
  int label = 0;
  std::vector<double> distances;  // the k neighbours, nearest first
  std::vector<int> neighbours;    // their indices in the stored set
};

KnnModel train_knn(Dataset train, int k);

/// Majority vote of the k nearest stored samples. Distance ties keep stored
/// order; vote ties go to the smallest summed distance, then lowest label.
KnnPrediction knn_predict(const KnnModel& m, const FeatureVector& x);

// ---- linear models ----

double sigmoid(double z);

struct SvmCost {
  double cost = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

/// J = (1/m) sum max(0, 1 - y_i (w.x_i - b)) + lambda |w|^2, labels in {-1, +1}.
/// The subgradient at a hinge kink is taken as 0.
SvmCost svm_cost_grad(std::span<const double> w, double b, const Matrix& x,
                      std::span<const double> y, double lambda);

struct LrCost {
  double cost = 0.0;
  std::vector<double> grad;
};

/// Cross-entropy of sigmoid(w.x_i) against labels in {0, 1}. `x` carries the
/// constant-1 intercept column; the logs use the stable softplus form.
LrCost lr_cost_grad(std::span<const double> w, const Matrix& x, std::span<const double> y);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  std::vector<double> apply(std::span<const double> x) const;
  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Population mean and standard deviation per dimension; zero-variance
/// dimensions get scale 1.
Standardizer fit_standardizer(const Dataset& train);

enum class LinearKind { Svm, Lr };

struct TrainConfig {
  double learning_rate = 0.1;
  int iterations = 500;
  double lambda = 1e-3;
  std::uint64_t seed = 0;  // descent starts from zero, so training ignores it

  void validate() const;
};

struct LinearModel {
  LinearKind kind = LinearKind::Svm;
  FeatureMethod method = FeatureMethod::Cepstrum;
  Matrix weights;             // classes x dims
  std::vector<double> bias;   // SVM: b of (w.x - b); LR: intercept weight
  double lambda = 0.0;
  Standardizer standardizer;
  std::vector<std::string> labels;
};

/// Per-class cost after each iteration, filled when requested.
using CostTrace = std::vector<std::vector<double>>;

/// One-vs-rest full-batch gradient descent from zero weights.
LinearModel train_linear(const Dataset& train, LinearKind kind, const TrainConfig& cfg,
                         CostTrace* trace = nullptr);

struct Prediction {
  int label = 0;
  std::vector<double> scores;  // one per class
};

/// SVM scores are raw margins w.x' - b, LR scores are sigmoid(w.x' + b).
Prediction linear_predict(const LinearModel& m, const FeatureVector& x);

/// Index of the largest score; ties go to the lowest index.
int argmax(std::span<const double> scores);

// ---- classifier-agnostic front ----

enum class ClassifierKind { Knn, Svm, Lr };

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier(std::string_view tag);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Knn;
  int k = 1;
  TrainConfig train;
};

using Classifier = std::variant<KnnModel, LinearModel>;

ClassifierKind kind_of(const Classifier& c);
FeatureMethod method_of(const Classifier& c);
std::size_t dims_of(const Classifier& c);
const std::vector<std::string>& labels_of(const Classifier& c);

Classifier train_classifier(const Dataset& train, const ClassifierSpec& spec);

/// Uniform prediction. KNN scores are per-class vote fractions among the k
/// neighbours.
Prediction predict(const Classifier& c, const FeatureVector& x);

}  // namespace stripid
