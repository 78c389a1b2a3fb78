#include "stripid/commands.hpp"
#include "stripid/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

#include "CLI11.hpp"

#include "stripid/evalx.hpp"
#include "stripid/feature_file.hpp"
#include "stripid/model_io.hpp"
#include "stripid/pipeline.hpp"
#include "stripid/synth.hpp"

namespace stripid::cli {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptImage:
    case ErrorCode::Io:
    case ErrorCode::VersionMismatch:
    case ErrorCode::CorruptModel:
    case ErrorCode::CorruptFeatureFile:
      return kIo;
    case ErrorCode::EmptyDataset:
    case ErrorCode::SingleClass:
    case ErrorCode::ClassTooSmall:
    case ErrorCode::TooFewSamples:
      return kDataShape;
    case ErrorCode::MethodMismatch:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::LengthMismatch:
      return kModelMismatch;
    default:
      return kUsage;
  }
}

struct Hyper {
  int k = 1;
  double lambda = 1e-3;
  double learning_rate = 0.1;
  int iterations = 500;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--k", k, "KNN neighbour count")->check(CLI::Range(1, 15));
    app->add_option("--lambda", lambda, "L2 regularization")->check(CLI::NonNegativeNumber);
    app->add_option("--lr", learning_rate, "gradient-descent step")->check(CLI::PositiveNumber);
    app->add_option("--iters", iterations, "gradient-descent iterations")->check(CLI::PositiveNumber);
  }

  ClassifierSpec spec(ClassifierKind kind) const {
    ClassifierSpec s;
    s.kind = kind;
    s.k = k;
    s.train.learning_rate = learning_rate;
    s.train.iterations = iterations;
    s.train.lambda = lambda;
    s.train.seed = seed;
    return s;
  }
};

const std::map<std::string, ClassifierKind> kModelNames{
    {"knn", ClassifierKind::Knn}, {"svm", ClassifierKind::Svm}, {"lr", ClassifierKind::Lr}};
const std::map<std::string, FeatureMethod> kMethodNames{{"cepstrum", FeatureMethod::Cepstrum},
                                                        {"cgpf", FeatureMethod::Cgpf}};

Dataset extract_manifest(const std::filesystem::path& manifest, const ExtractorConfig& cfg) {
  const auto entries = read_manifest(manifest);
  std::vector<FeatureVector> features(entries.size());
  parallel_for(entries.size(), worker_count(), [&](std::size_t i) {
    features[i] = extract_features(load_image(entries[i].path), cfg);
  });

  Dataset d;
  d.method = cfg.method;
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [it, inserted] = index.try_emplace(entries[i].label, static_cast<int>(d.labels.size()));
    if (inserted) d.labels.push_back(entries[i].label);
    d.samples.push_back({std::move(features[i]), it->second});
  }
  return d;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stripid: medicine strip identification from strip images"};
  app.name("stripid");
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "render a synthetic strip dataset");
  int classes = 0, per_class = 0;
  std::uint64_t seed = 42;
  std::string out_dir;
  std::optional<int> twin_of;
  double twin_offset = 20.0;
  AugmentSpec aug;
  synth->add_option("--classes", classes, "number of classes")->required()->check(CLI::Range(2, kMaxSynthClasses));
  synth->add_option("--per-class", per_class, "images per class")->required()->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "dataset seed");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--hue-twin-of", twin_of, "add a hue-rotated copy of this class index");
  synth->add_option("--offset", twin_offset, "hue twin rotation in degrees");
  synth->add_option("--brightness-jitter", aug.brightness_jitter)->check(CLI::NonNegativeNumber);
  synth->add_option("--noise-sigma", aug.noise_sigma)->check(CLI::NonNegativeNumber);
  synth->add_option("--scale-jitter", aug.scale_jitter)->check(CLI::Range(0.0, 0.9));
  synth->add_option("--hue-jitter", aug.hue_jitter)->check(CLI::NonNegativeNumber);

  // extract
  auto* extract = app.add_subcommand("extract", "extract a feature table from a manifest");
  std::string method_name = "cepstrum";
  std::string manifest, out_file;
  int bins = 128;
  extract->add_option("--method", method_name, "cepstrum or cgpf")
      ->required()
      ->check(CLI::IsMember({"cepstrum", "cgpf"}));
  extract->add_option("--manifest", manifest, "manifest CSV")->required();
  extract->add_option("--out", out_file, "feature table to write")->required();
  extract->add_option("--bins", bins, "cepstrum bin count")->check(CLI::Range(20, 1 << 16));

  // train
  auto* train = app.add_subcommand("train", "train a classifier on a feature table");
  std::string kind_name = "knn";
  std::string features_file, model_file;
  Hyper hyper;
  train->add_option("--model", kind_name, "knn, svm or lr")->required()->check(CLI::IsMember({"knn", "svm", "lr"}));
  train->add_option("--features", features_file, "feature table")->required();
  train->add_option("--out", model_file, "model file to write")->required();
  train->add_option("--seed", hyper.seed, "recorded training seed");
  hyper.attach(train);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "rank labels for one image");
  std::string image_file;
  predict_cmd->add_option("--model", model_file, "model file")->required();
  predict_cmd->add_option("--image", image_file, "image to identify")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "split, train and evaluate");
  double split = 0.8;
  std::uint64_t split_seed = 7;
  bool json = false;
  eval->add_option("--features", features_file, "feature table")->required();
  eval->add_option("--model", kind_name, "knn, svm or lr")->required()->check(CLI::IsMember({"knn", "svm", "lr"}));
  eval->add_option("--split", split, "train fraction")->check(CLI::Range(0.01, 0.99));
  eval->add_option("--seed", split_seed, "split seed");
  eval->add_flag("--json", json, "emit JSON");
  hyper.attach(eval);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "accuracy versus data size");
  std::vector<std::size_t> sizes{5, 10, 20, 40};
  std::vector<std::string> model_names{"knn", "svm", "lr"};
  std::uint64_t sweep_seed = 7;
  sweep->add_option("--manifest", manifest, "manifest CSV")->required();
  sweep->add_option("--sizes", sizes, "per-class sizes")->delimiter(',');
  sweep->add_option("--models", model_names, "classifiers")->delimiter(',')->check(CLI::IsMember({"knn", "svm", "lr"}));
  sweep->add_option("--seed", sweep_seed, "sweep seed");
  sweep->add_option("--out", out_file, "CSV to write")->required();
  sweep->add_option("--method", method_name, "cepstrum or cgpf")->check(CLI::IsMember({"cepstrum", "cgpf"}));
  sweep->add_option("--bins", bins, "cepstrum bin count")->check(CLI::Range(20, 1 << 16));
  hyper.attach(sweep);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  const FeatureMethod method = kMethodNames.at(method_name);
  const ClassifierKind kind = kModelNames.at(kind_name);

  try {
    if (*synth) {
      std::optional<TwinRequest> twin;
      if (twin_of) twin = TwinRequest{*twin_of, twin_offset};
      const auto path = gen_dataset(classes, per_class, aug, seed, out_dir, twin);
      const int total = (classes + (twin ? 1 : 0)) * per_class;
      out << "wrote " << total << " images, manifest " << path.generic_string() << '\n';
      return kOk;
    }

    if (*extract) {
      ExtractorConfig cfg;
      cfg.method = method;
      cfg.cepstrum.bin_count = bins;
      const Dataset d = extract_manifest(manifest, cfg);
      write_feature_table({d, cfg.bins()}, out_file);
      out << "wrote " << d.size() << " rows, dims=" << cfg.dims() << '\n';
      return kOk;
    }

    if (*train) {
      const FeatureTable table = read_feature_table(features_file);
      ExtractorConfig cfg;
      cfg.method = table.dataset.method;
      if (cfg.method == FeatureMethod::Cepstrum) {
        cfg.cepstrum.bin_count = table.bins;
        cfg.cepstrum.coeff_count = static_cast<int>(table.dataset.dims());
      } else {
        cfg.cgpf.top_regions = static_cast<int>((table.dataset.dims() - 6) / 5);
      }
      ExtractionInfo info = describe(cfg);
      info.dims = static_cast<std::uint32_t>(table.dataset.dims());
      extractor_for(info);  // reject tables no extractor could have produced

      Model m{info, train_classifier(table.dataset, hyper.spec(kind))};
      save_model(m, model_file);
      out << "trained " << to_string(kind) << " on " << table.dataset.size() << " samples, "
          << table.dataset.class_count() << " classes\n";
      return kOk;
    }

    if (*predict_cmd) {
      const Model m = load_model(model_file);
      const ExtractorConfig cfg = extractor_for(m.extraction);
      const Image img = load_image(image_file);
      const Prediction p = predict(m.classifier, extract_features(img, cfg));
      const auto& labels = labels_of(m.classifier);
      std::vector<std::size_t> order(p.scores.size());
      std::iota(order.begin(), order.end(), 0);
      const auto winner = static_cast<std::size_t>(p.label);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (p.scores[a] != p.scores[b]) return p.scores[a] > p.scores[b];
        return a == winner && b != winner;
      });
      for (std::size_t c : order) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", p.scores[c]);
        out << labels[c] << '\t' << buf << '\n';
      }
      return kOk;
    }

    if (*eval) {
      const FeatureTable table = read_feature_table(features_file);
      const Split parts = stratified_split(table.dataset, split, split_seed);
      const Classifier model = train_classifier(parts.train, hyper.spec(kind));
      EvalReport report = evaluate(model, parts.test);
      report.train_size = parts.train.size();
      report.seed = split_seed;
      out << (json ? format_report_json(report) : format_report(report));
      return kOk;
    }

    if (*sweep) {
      if (std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s < 2; })) {
        err << "error: every sweep size must be at least 2 per class\n";
        return kUsage;
      }
      ExtractorConfig cfg;
      cfg.method = method;
      cfg.cepstrum.bin_count = bins;
      const Dataset d = extract_manifest(manifest, cfg);
      std::vector<ClassifierSpec> specs;
      for (const auto& name : model_names) specs.push_back(hyper.spec(kModelNames.at(name)));
      const SweepCurve curve = size_sweep(d, sizes, specs, sweep_seed);
      std::string csv = "per_class_size,total_size,model,accuracy\n";
      for (const auto& pt : curve.points) {
        csv += std::to_string(pt.per_class) + "," + std::to_string(pt.total) + "," +
               std::string(to_string(pt.classifier)) + "," + format_real(pt.accuracy) + "\n";
      }
      write_text(out_file, csv);
      out << "wrote " << curve.points.size() << " sweep rows\n";
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

}  // namespace stripid::cli
