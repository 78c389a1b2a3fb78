#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stripid/classify.hpp"

namespace stripid {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending sample indices
  std::vector<std::size_t> test;
};

/// Per class: seeded shuffle, ceil(fraction * n_c) to train, the rest to
/// test, keeping at least one test sample per class.
SplitIndices stratified_split_indices(const Dataset& d, double train_fraction, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset test;
};

Split stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed);

/// Copies the samples at `indices` (in that order) into a new dataset.
Dataset subset(const Dataset& d, std::span<const std::size_t> indices);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // NaN-free: classes absent from test report 0
  std::vector<std::vector<std::size_t>> confusion;  // rows true, cols predicted
  std::vector<std::string> labels;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ClassifierKind classifier = ClassifierKind::Knn;
  FeatureMethod method = FeatureMethod::Cepstrum;
  std::uint64_t seed = 0;
};

EvalReport evaluate(const Classifier& model, const Dataset& test);

/// Key-value lines followed by a confusion matrix block.
std::string format_report(const EvalReport& r);
std::string format_report_json(const EvalReport& r);

struct SweepPoint {
  std::size_t per_class = 0;
  std::size_t total = 0;
  ClassifierKind classifier = ClassifierKind::Knn;
  double accuracy = 0.0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;  // size-major, classifiers in request order
};

/// For each per-class size: seeded subsample, 80/20 split, train and
/// evaluate every classifier.
SweepCurve size_sweep(const Dataset& full, std::span<const std::size_t> sizes,
                      std::span<const ClassifierSpec> classifiers, std::uint64_t seed);

inline constexpr double kSeparationCap = 1e9;

/// |centroid_a - centroid_b| / max(mean distance to own centroid). Returns
/// kSeparationCap when both classes have zero spread but distinct centroids.
double separation_ratio(std::span<const std::vector<double>> class_a,
                        std::span<const std::vector<double>> class_b);

}  // namespace stripid
