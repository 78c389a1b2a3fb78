#include <cmath>
#include <limits>

#include "stripid/error.hpp"
#include "stripid/feature_file.hpp"
#include "stripid/model_io.hpp"
#include "stripid/pipeline.hpp"
#include "support.hpp"

namespace stripid {
namespace {

using testing::blob_dataset;
using testing::error_code_of;
using testing::random_vector;
using testing::slurp;
using testing::spit;
using testing::TempDir;

Model trained(ClassifierKind kind, std::size_t dims = 5) {
  ClassifierSpec spec;
  spec.kind = kind;
  spec.k = 3;
  Model m;
  m.extraction.method = FeatureMethod::Cepstrum;
  m.extraction.bins = 128;
  m.extraction.dims = static_cast<std::uint32_t>(dims);
  m.classifier = train_classifier(blob_dataset(401, 3, 8, dims), spec);
  return m;
}

// ---------------------------------------------------------------- models

TEST(ModelIo, RoundTripPredictsIdentically) {
  Rng rng(402);
  for (ClassifierKind kind : {ClassifierKind::Knn, ClassifierKind::Svm, ClassifierKind::Lr}) {
    const Model m = trained(kind);
    const Model back = deserialize_model(serialize_model(m));
    EXPECT_EQ(back.extraction, m.extraction);
    EXPECT_EQ(labels_of(back.classifier), labels_of(m.classifier));
    for (int q = 0; q < 100; ++q) {
      const FeatureVector x{FeatureMethod::Cepstrum, random_vector(rng, 5, -3, 6)};
      const Prediction a = predict(m.classifier, x);
      const Prediction b = predict(back.classifier, x);
      EXPECT_EQ(a.label, b.label);
      EXPECT_EQ(a.scores, b.scores);
    }
  }
}

TEST(ModelIo, SerializationIsStable) {
  const Model m = trained(ClassifierKind::Svm);
  const auto bytes = serialize_model(m);
  EXPECT_EQ(serialize_model(deserialize_model(bytes)), bytes);
  ASSERT_GE(bytes.size(), 7u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SIDM");
  EXPECT_EQ(bytes[4], kModelFormatVersion);
  EXPECT_EQ(bytes[5], 1);
}

TEST(ModelIo, SaveAndLoadThroughFile) {
  TempDir dir;
  const Model m = trained(ClassifierKind::Lr);
  save_model(m, dir / "m.bin");
  EXPECT_EQ(serialize_model(load_model(dir / "m.bin")), serialize_model(m));
}

TEST(ModelIo, EveryTruncationIsCorrupt) {
  for (ClassifierKind kind : {ClassifierKind::Knn, ClassifierKind::Svm}) {
    const auto bytes = serialize_model(trained(kind, 2));
    for (std::size_t n = 6; n < bytes.size(); ++n) {
      const std::span<const std::uint8_t> head(bytes.data(), n);
      EXPECT_EQ(error_code_of([&] { deserialize_model(head); }), ErrorCode::CorruptModel) << "length " << n;
    }
  }
}

TEST(ModelIo, FutureVersionIsRejected) {
  auto bytes = serialize_model(trained(ClassifierKind::Knn));
  bytes[4] = kModelFormatVersion + 1;
  EXPECT_EQ(error_code_of([&] { deserialize_model(bytes); }), ErrorCode::VersionMismatch);
}

TEST(ModelIo, BadMagicAndTrailingBytes) {
  auto bytes = serialize_model(trained(ClassifierKind::Lr));
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_EQ(error_code_of([&] { deserialize_model(extra); }), ErrorCode::CorruptModel);
  bytes[0] = 'X';
  EXPECT_EQ(error_code_of([&] { deserialize_model(bytes); }), ErrorCode::CorruptModel);
}

TEST(ModelIo, MissingFileIsIo) {
  TempDir dir;
  EXPECT_EQ(error_code_of([&] { load_model(dir / "absent.bin"); }), ErrorCode::Io);
}

// ---------------------------------------------------------------- extraction info

TEST(ExtractionInfo, DescribeThenRebuild) {
  ExtractorConfig cfg;
  cfg.cepstrum.bin_count = 64;
  cfg.cepstrum.coeff_count = 12;
  const ExtractionInfo info = describe(cfg);
  EXPECT_EQ(info.dims, 12u);
  EXPECT_EQ(info.bins, 64u);
  const ExtractorConfig back = extractor_for(info);
  EXPECT_EQ(back.cepstrum.bin_count, 64);
  EXPECT_EQ(back.cepstrum.coeff_count, 12);

  cfg.method = FeatureMethod::Cgpf;
  cfg.cgpf.top_regions = 3;
  const ExtractionInfo cg = describe(cfg);
  EXPECT_EQ(cg.dims, 21u);
  EXPECT_EQ(cg.bins, 0u);
  EXPECT_EQ(extractor_for(cg).cgpf.top_regions, 3);
}

TEST(ExtractionInfo, UnproducibleDimsAreRejected) {
  ExtractionInfo info;
  info.method = FeatureMethod::Cgpf;
  info.dims = 30;
  EXPECT_EQ(error_code_of([&] { extractor_for(info); }), ErrorCode::DimensionMismatch);
  info.method = FeatureMethod::Cepstrum;
  info.bins = 16;
  info.dims = 20;
  EXPECT_EQ(error_code_of([&] { extractor_for(info); }), ErrorCode::DimensionMismatch);
}

// ---------------------------------------------------------------- feature tables

FeatureTable sample_table() {
  FeatureTable t;
  t.bins = 128;
  t.dataset.method = FeatureMethod::Cepstrum;
  t.dataset.labels = {"beta", "alpha"};
  t.dataset.samples = {{{FeatureMethod::Cepstrum, {0.1, -2.5e-300, 3.0}}, 0},
                       {{FeatureMethod::Cepstrum, {1.0 / 3.0, 1e300, -0.0}}, 1},
                       {{FeatureMethod::Cepstrum, {5, 6, 7}}, 0}};
  return t;
}

TEST(FeatureTable, ExactTextLayout) {
  FeatureTable t;
  t.bins = 0;
  t.dataset.method = FeatureMethod::Cgpf;
  t.dataset.labels = {"a"};
  t.dataset.samples = {{{FeatureMethod::Cgpf, {0.5, 2.0}}, 0}};
  EXPECT_EQ(format_feature_table(t),
            "# method=cgpf,dims=2,bins=0,version=1\n"
            "label,f0,f1\n"
            "a,0.5,2\n");
}

TEST(FeatureTable, RoundTripIsBitExact) {
  const FeatureTable t = sample_table();
  const FeatureTable back = parse_feature_table(format_feature_table(t));
  EXPECT_EQ(back.bins, 128);
  EXPECT_EQ(back.dataset.labels, t.dataset.labels);
  ASSERT_EQ(back.dataset.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.dataset.samples[i].label, t.dataset.samples[i].label);
    EXPECT_EQ(back.dataset.samples[i].features, t.dataset.samples[i].features);
  }
  EXPECT_TRUE(std::signbit(back.dataset.samples[1].features.values[2]));
}

TEST(FeatureTable, RandomValuesRoundTrip) {
  Rng rng(403);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.index(200)) - 100);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

TEST(FeatureTable, FileRoundTrip) {
  TempDir dir;
  write_feature_table(sample_table(), dir / "f.csv");
  EXPECT_EQ(format_feature_table(read_feature_table(dir / "f.csv")), format_feature_table(sample_table()));
}

TEST(FeatureTable, CorruptInputs) {
  const std::string good = format_feature_table(sample_table());
  const auto code = [](const std::string& text) { return error_code_of([&] { parse_feature_table(text); }); };
  EXPECT_EQ(code(""), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code("label,f0\nx,1\n"), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code("# method=fourier,dims=1,bins=0,version=1\nlabel,f0\nx,1\n"), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code("# method=cepstrum,dims=1,bins=0,version=2\nlabel,f0\nx,1\n"), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code("# method=cepstrum,dims=2,bins=0,version=1\nlabel,f0\nx,1\n"), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code("# method=cepstrum,dims=1,bins=0,version=1\nlabel,f0\nx,1,2\n"), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code("# method=cepstrum,dims=1,bins=0,version=1\nlabel,f0\nx,abc\n"), ErrorCode::CorruptFeatureFile);
  EXPECT_EQ(code(good.substr(0, good.size() - 4) + ",\n"), ErrorCode::CorruptFeatureFile);
}

TEST(FeatureTable, MissingFileIsIo) {
  TempDir dir;
  EXPECT_EQ(error_code_of([&] { read_feature_table(dir / "nope.csv"); }), ErrorCode::Io);
}

// ---------------------------------------------------------------- manifests

TEST(Manifest, PathsResolveAgainstManifestDirectory) {
  TempDir dir;
  spit(dir / "manifest.csv", "path,label\nimgs/a.png,red\nb.png,blue\n");
  const auto entries = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].path, dir.path() / "imgs/a.png");
  EXPECT_EQ(entries[0].label, "red");
  EXPECT_EQ(entries[1].label, "blue");
}

TEST(Manifest, Malformed) {
  TempDir dir;
  spit(dir / "m1.csv", "file,class\na.png,x\n");
  spit(dir / "m2.csv", "path,label\nno-comma-here\n");
  EXPECT_EQ(error_code_of([&] { read_manifest(dir / "m1.csv"); }), ErrorCode::Io);
  EXPECT_EQ(error_code_of([&] { read_manifest(dir / "m2.csv"); }), ErrorCode::Io);
}

}  // namespace
}  // namespace stripid
