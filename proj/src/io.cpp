#include "hpl/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "hpl/error.hpp"

namespace hpl::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'H', 'P', 'L', 'M'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kHeaderSize = 13;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T read_le(std::string_view bytes, std::size_t offset) {
  T value;
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

template <typename T>
void append_le(std::string& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t offset) {
  field = trim(field);
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw FormatError("cannot parse number '" + std::string(field) + "'", offset);
  }
  return value;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

MatrixFile parse_matrix_entry(const json& doc, const char* key, const fs::path& base) {
  if (!doc.contains(key)) throw ValidationError(std::string("manifest: missing field '") + key + "'");
  const json& entry = doc.at(key);
  MatrixFile file;
  if (entry.is_string()) {
    file.path = resolve(base, entry.get<std::string>());
    file.format = format_from_path(file.path);
  } else if (entry.is_object() && entry.contains("path")) {
    file.path = resolve(base, entry.at("path").get<std::string>());
    file.format = entry.contains("format") ? parse_matrix_format(entry.at("format").get<std::string>())
                                           : format_from_path(file.path);
  } else {
    throw ValidationError(std::string("manifest: field '") + key + "' must be a path or {path, format}");
  }
  return file;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.string();
  const fs::path rel = p.lexically_relative(base);
  return rel.empty() ? p.string() : rel.generic_string();
}

Matrix load_semantics(const MatrixFile& file, bool normalize) {
  Matrix y = load_matrix(file.path, file.format);
  return normalize ? kernels::normalize_columns(std::move(y)) : y;
}

}  // namespace

MatrixFormat parse_matrix_format(std::string_view text) {
  if (text == "csv") return MatrixFormat::kCsv;
  if (text == "hplm" || text == "hplm-binary" || text == "binary") return MatrixFormat::kBinary;
  throw ValidationError("unknown matrix format '" + std::string(text) + "'");
}

std::string_view to_string(MatrixFormat format) { return format == MatrixFormat::kCsv ? "csv" : "hplm"; }

MatrixFormat format_from_path(const fs::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::kCsv : MatrixFormat::kBinary;
}

Matrix parse_csv_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line = text.substr(line_start, line_end - line_start);
    if (!trim(line).empty()) {
      std::vector<double> row;
      std::size_t field_start = 0;
      while (true) {
        std::size_t comma = line.find(',', field_start);
        const std::size_t field_end = comma == std::string_view::npos ? line.size() : comma;
        row.push_back(parse_double(line.substr(field_start, field_end - field_start), line_start + field_start));
        if (comma == std::string_view::npos) break;
        field_start = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw FormatError("row " + std::to_string(rows.size()) + " has " + std::to_string(row.size()) +
                              " fields, expected " + std::to_string(rows.front().size()),
                          line_start);
      }
      rows.push_back(std::move(row));
    }
    line_start = line_end + 1;
  }

  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  require_finite(m, "matrix");
  return m;
}

std::string format_csv_matrix(const Matrix& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      const int len = std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out.append(buf, static_cast<std::size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

Matrix decode_binary_matrix(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"HPLM\"", 0);
  }
  if (bytes.size() < 5) throw FormatError("truncated header", bytes.size());
  if (static_cast<std::uint8_t>(bytes[4]) != kVersion) {
    throw FormatError("unsupported version " + std::to_string(static_cast<unsigned char>(bytes[4])), 4);
  }
  if (bytes.size() < kHeaderSize) throw FormatError("truncated header", bytes.size());
  const auto rows = read_le<std::uint32_t>(bytes, 5);
  const auto cols = read_le<std::uint32_t>(bytes, 9);
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
  const std::uint64_t expected = kHeaderSize + count * sizeof(double);
  if (bytes.size() < expected) throw FormatError("truncated matrix data", bytes.size());
  if (bytes.size() > expected) throw FormatError("trailing bytes after matrix data", expected);

  Matrix m(rows, cols);
  std::size_t offset = kHeaderSize;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i, offset += sizeof(double)) {
      m(i, j) = read_le<double>(bytes, offset);
    }
  }
  require_finite(m, "matrix");
  return m;
}

std::string encode_binary_matrix(const Matrix& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) throw ValidationError("matrix too large for hplm format");
  std::string out;
  out.reserve(kHeaderSize + static_cast<std::size_t>(m.size()) * sizeof(double));
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  append_le(out, static_cast<std::uint32_t>(m.rows()));
  append_le(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) append_le(out, m(i, j));
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

Matrix load_matrix(const fs::path& path, MatrixFormat format) {
  const std::string bytes = read_file(path);
  try {
    return format == MatrixFormat::kCsv ? parse_csv_matrix(bytes) : decode_binary_matrix(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Matrix load_matrix(const fs::path& path) { return load_matrix(path, format_from_path(path)); }

void save_matrix(const Matrix& m, const fs::path& path, MatrixFormat format) {
  write_file_atomic(path, format == MatrixFormat::kCsv ? format_csv_matrix(m) : encode_binary_matrix(m));
}

void save_matrix(const Matrix& m, const fs::path& path) { save_matrix(m, path, format_from_path(path)); }

Labels load_labels(const fs::path& path) {
  const std::string text = read_file(path);
  Labels labels;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(start, end - start));
    if (!line.empty()) {
      int value = 0;
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
      if (ec != std::errc() || ptr != line.data() + line.size()) {
        throw FormatError(path.string() + ": cannot parse label '" + std::string(line) + "'", start);
      }
      if (value < 1) {
        throw ValidationError(path.string() + ": label out of range (" + std::to_string(value) +
                              "), labels are 1-based");
      }
      labels.push_back(value - 1);
    }
    start = end + 1;
  }
  return labels;
}

void save_labels(const Labels& labels, const fs::path& path) {
  std::string out;
  for (int label : labels) {
    out += std::to_string(label + 1);
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

DatasetManifest parse_manifest(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ValidationError("manifest must be a JSON object");

  try {
    DatasetManifest manifest;
    manifest.features_seen = parse_matrix_entry(doc, "X_s", base_dir);
    manifest.semantics_seen = parse_matrix_entry(doc, "Y_s", base_dir);
    manifest.features_unseen = parse_matrix_entry(doc, "X_u", base_dir);
    manifest.semantics_unseen = parse_matrix_entry(doc, "Y_u", base_dir);
    if (!doc.contains("labels_s")) throw ValidationError("manifest: missing field 'labels_s'");
    manifest.labels_seen = resolve(base_dir, doc.at("labels_s").get<std::string>());
    if (doc.contains("truth_u") && !doc.at("truth_u").is_null()) {
      manifest.truth_unseen = resolve(base_dir, doc.at("truth_u").get<std::string>());
    }
    if (doc.contains("truth_space")) {
      const auto space = doc.at("truth_space").get<std::string>();
      if (space == "unseen") {
        manifest.truth_space = TruthSpace::kUnseen;
      } else if (space == "all") {
        manifest.truth_space = TruthSpace::kAll;
      } else {
        throw ValidationError("manifest: truth_space must be 'unseen' or 'all'");
      }
    }
    manifest.normalize = doc.value("normalize", true);
    manifest.class_names_seen = doc.value("class_names_s", std::vector<std::string>{});
    manifest.class_names_unseen = doc.value("class_names_u", std::vector<std::string>{});
    return manifest;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

std::string manifest_to_json(const DatasetManifest& manifest, const fs::path& base_dir) {
  auto entry = [&](const MatrixFile& f) {
    return json{{"path", relative_to(f.path, base_dir)}, {"format", to_string(f.format)}};
  };
  json doc;
  doc["X_s"] = entry(manifest.features_seen);
  doc["labels_s"] = relative_to(manifest.labels_seen, base_dir);
  doc["Y_s"] = entry(manifest.semantics_seen);
  doc["X_u"] = entry(manifest.features_unseen);
  doc["Y_u"] = entry(manifest.semantics_unseen);
  if (manifest.truth_unseen) doc["truth_u"] = relative_to(*manifest.truth_unseen, base_dir);
  doc["truth_space"] = manifest.truth_space == TruthSpace::kAll ? "all" : "unseen";
  doc["normalize"] = manifest.normalize;
  if (!manifest.class_names_seen.empty()) doc["class_names_s"] = manifest.class_names_seen;
  if (!manifest.class_names_unseen.empty()) doc["class_names_u"] = manifest.class_names_unseen;
  return doc.dump(2) + "\n";
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Matrix xs = load_matrix(manifest.features_seen.path, manifest.features_seen.format);
  Matrix xu = load_matrix(manifest.features_unseen.path, manifest.features_unseen.format);
  Matrix ys = load_semantics(manifest.semantics_seen, manifest.normalize);
  Matrix yu = load_semantics(manifest.semantics_unseen, manifest.normalize);
  if (manifest.normalize) {
    xs = kernels::normalize_columns(std::move(xs));
    xu = kernels::normalize_columns(std::move(xu));
  }

  Labels labels = load_labels(manifest.labels_seen);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= ys.cols()) {
      throw ValidationError("label out of range: sample " + std::to_string(i + 1) + " has label " +
                            std::to_string(labels[i] + 1) + " but there are " + std::to_string(ys.cols()) +
                            " seen classes");
    }
  }
  std::optional<Labels> truth;
  if (manifest.truth_unseen) truth = load_labels(*manifest.truth_unseen);

  Dataset data{LabeledFeatureSet::create(std::move(xs), std::move(labels), std::move(ys), manifest.class_names_seen),
               UnlabeledFeatureSet::create(std::move(xu), std::move(yu), std::move(truth), manifest.truth_space,
                                           manifest.class_names_unseen)};
  validate_pair(data.seen, data.unseen);
  return data;
}

}  // namespace hpl::io
