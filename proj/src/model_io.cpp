#include "stripid/model_io.hpp"

#include "stripid/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace stripid {

namespace {

constexpr char kMagic[4] = {'S', 'I', 'D', 'M'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void f64s(std::span<const double> vs) {
    for (double v : vs) f64(v);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    const double v = std::bit_cast<double>(bits);
    if (!std::isfinite(v)) throw Error(ErrorCode::CorruptModel, "non-finite value in model");
    return v;
  }
  std::vector<double> f64s(std::size_t n) {
    need(n * 8);
    std::vector<double> out(n);
    for (double& v : out) v = f64();
    return out;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::CorruptModel, "model file is truncated");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint8_t kind_tag(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Knn: return 0;
    case ClassifierKind::Svm: return 1;
    case ClassifierKind::Lr: return 2;
  }
  return 0xFF;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Model& m) {
  const std::size_t dims = dims_of(m.classifier);
  const auto& labels = labels_of(m.classifier);

  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kModelFormatVersion);
  w.u8(kind_tag(kind_of(m.classifier)));
  w.u8(m.extraction.method == FeatureMethod::Cepstrum ? 0 : 1);
  w.u32(m.extraction.bins);
  w.u32(m.extraction.width);
  w.u32(m.extraction.height);
  w.u32(static_cast<std::uint32_t>(dims));
  w.u32(static_cast<std::uint32_t>(labels.size()));
  for (const auto& l : labels) w.str(l);

  if (const auto* knn = std::get_if<KnnModel>(&m.classifier)) {
    w.u32(static_cast<std::uint32_t>(knn->k));
    w.u32(static_cast<std::uint32_t>(knn->stored.size()));
    for (const auto& s : knn->stored.samples) {
      w.u32(static_cast<std::uint32_t>(s.label));
      w.f64s(s.features.values);
    }
  } else {
    const auto& lin = std::get<LinearModel>(m.classifier);
    w.f64(lin.lambda);
    w.f64s(lin.weights.data);
    w.f64s(lin.bias);
    w.f64s(lin.standardizer.mean);
    w.f64s(lin.standardizer.scale);
  }
  return w.take();
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(c)) throw Error(ErrorCode::CorruptModel, "bad magic");
  }
  const std::uint8_t version = r.u8();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                ", expected " + std::to_string(kModelFormatVersion));
  }
  const std::uint8_t kind = r.u8();
  const std::uint8_t method = r.u8();
  if (kind > 2 || method > 1) throw Error(ErrorCode::CorruptModel, "unknown kind or method tag");

  Model m;
  m.extraction.method = method == 0 ? FeatureMethod::Cepstrum : FeatureMethod::Cgpf;
  m.extraction.bins = r.u32();
  m.extraction.width = r.u32();
  m.extraction.height = r.u32();
  const std::uint32_t dims = r.u32();
  m.extraction.dims = dims;
  const std::uint32_t classes = r.u32();
  if (classes < 2 || dims == 0) throw Error(ErrorCode::CorruptModel, "implausible model shape");
  std::vector<std::string> labels;
  for (std::uint32_t i = 0; i < classes; ++i) labels.push_back(r.str());

  if (kind == 0) {
    KnnModel knn;
    knn.k = static_cast<int>(r.u32());
    const std::uint32_t n = r.u32();
    knn.stored.method = m.extraction.method;
    knn.stored.labels = std::move(labels);
    for (std::uint32_t i = 0; i < n; ++i) {
      Sample s;
      s.label = static_cast<int>(r.u32());
      if (s.label < 0 || static_cast<std::uint32_t>(s.label) >= classes) {
        throw Error(ErrorCode::CorruptModel, "stored label out of range");
      }
      s.features = {m.extraction.method, r.f64s(dims)};
      knn.stored.samples.push_back(std::move(s));
    }
    if (knn.k < 1 || static_cast<std::uint32_t>(knn.k) > n) {
      throw Error(ErrorCode::CorruptModel, "k out of range");
    }
    m.classifier = std::move(knn);
  } else {
    LinearModel lin;
    lin.kind = kind == 1 ? LinearKind::Svm : LinearKind::Lr;
    lin.method = m.extraction.method;
    lin.labels = std::move(labels);
    lin.lambda = r.f64();
    lin.weights = Matrix(classes, dims);
    lin.weights.data = r.f64s(std::size_t{classes} * dims);
    lin.bias = r.f64s(classes);
    lin.standardizer.mean = r.f64s(dims);
    lin.standardizer.scale = r.f64s(dims);
    for (double s : lin.standardizer.scale) {
      if (!(s > 0.0)) throw Error(ErrorCode::CorruptModel, "non-positive standardizer scale");
    }
    m.classifier = std::move(lin);
  }
  if (!r.done()) throw Error(ErrorCode::CorruptModel, "trailing bytes after model payload");
  return m;
}

void save_model(const Model& m, const std::filesystem::path& path) {
  const auto bytes = serialize_model(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open model " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace stripid
