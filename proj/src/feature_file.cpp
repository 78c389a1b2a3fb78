#include "stripid/feature_file.hpp"
#include "stripid/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace stripid {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptFeatureFile, why); }

long parse_int(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) corrupt("bad integer '" + s + "'");
  return v;
}

double parse_real(const std::string& s) {
  if (s.empty()) corrupt("empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) corrupt("bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_feature_table(const FeatureTable& t) {
  const Dataset& d = t.dataset;
  const std::size_t dims = d.dims();
  std::string out = "# method=" + std::string(to_string(d.method)) + ",dims=" + std::to_string(dims) +
                    ",bins=" + std::to_string(t.bins) + ",version=1\n";
  out += "label";
  for (std::size_t j = 0; j < dims; ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (const auto& s : d.samples) {
    out += d.labels.at(static_cast<std::size_t>(s.label));
    for (double v : s.features.values) out += "," + format_real(v);
    out += '\n';
  }
  return out;
}

FeatureTable parse_feature_table(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) corrupt("missing header lines");

  const std::string& meta = lines[0];
  if (meta.rfind("# ", 0) != 0) corrupt("first line must be the '# method=...' comment");
  std::map<std::string, std::string> kv;
  for (const auto& field : split_csv(meta.substr(2))) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) corrupt("bad header field '" + field + "'");
    kv[field.substr(0, eq)] = field.substr(eq + 1);
  }
  for (const char* key : {"method", "dims", "bins", "version"}) {
    if (!kv.count(key)) corrupt(std::string("header lacks ") + key);
  }
  if (kv["version"] != "1") corrupt("unsupported feature file version " + kv["version"]);
  const auto method = parse_feature_method(kv["method"]);
  if (!method) corrupt("unknown method '" + kv["method"] + "'");
  const long dims = parse_int(kv["dims"]);
  if (dims < 1) corrupt("dims must be positive");

  FeatureTable t;
  t.bins = static_cast<int>(parse_int(kv["bins"]));
  t.dataset.method = *method;

  const auto columns = split_csv(lines[1]);
  if (columns.size() != static_cast<std::size_t>(dims) + 1 || columns[0] != "label") {
    corrupt("column header does not match dims=" + std::to_string(dims));
  }

  std::map<std::string, int> index;
  for (std::size_t n = 2; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = split_csv(lines[n]);
    if (fields.size() != static_cast<std::size_t>(dims) + 1) {
      corrupt("row " + std::to_string(n + 1) + " has " + std::to_string(fields.size()) + " fields");
    }
    auto [it, inserted] = index.try_emplace(fields[0], static_cast<int>(t.dataset.labels.size()));
    if (inserted) t.dataset.labels.push_back(fields[0]);
    Sample s;
    s.label = it->second;
    s.features.method = *method;
    for (std::size_t j = 1; j < fields.size(); ++j) s.features.values.push_back(parse_real(fields[j]));
    t.dataset.samples.push_back(std::move(s));
  }
  return t;
}

void write_feature_table(const FeatureTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << format_feature_table(t);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  return parse_feature_table(read_text(path));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  const auto lines = lines_of(read_text(manifest));
  if (lines.empty() || lines[0] != "path,label") {
    throw Error(ErrorCode::Io, "manifest " + manifest.string() + " lacks the 'path,label' header");
  }
  const auto base = manifest.parent_path();
  std::vector<ManifestEntry> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto comma = lines[n].rfind(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == lines[n].size()) {
      throw Error(ErrorCode::Io, "malformed manifest row " + std::to_string(n + 1));
    }
    out.push_back({base / lines[n].substr(0, comma), lines[n].substr(comma + 1)});
  }
  return out;
}

}  // namespace stripid
