#pragma once

// Matrix, label and dataset-manifest files.
//
// hplm binary layout (little-endian):
//   offset 0   "HPLM"
//   offset 4   version byte 0x01
//   offset 5   uint32 rows
//   offset 9   uint32 cols
//   offset 13  rows * cols float64 entries, column-major
//
// CSV matrices hold one matrix row per line, comma separated, no header.
// Label files hold one 1-based class index per line.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpl/model.hpp"

namespace hpl::io {

enum class MatrixFormat { kCsv, kBinary };

MatrixFormat parse_matrix_format(std::string_view text);
std::string_view to_string(MatrixFormat format);
/// ".csv" means CSV, anything else hplm binary.
MatrixFormat format_from_path(const std::filesystem::path& path);

Matrix parse_csv_matrix(std::string_view text);
std::string format_csv_matrix(const Matrix& m);
Matrix decode_binary_matrix(std::string_view bytes);
std::string encode_binary_matrix(const Matrix& m);

/// Throws IoError if unreadable, FormatError on malformed contents and
/// ValidationError (with coordinates) on NaN or infinite entries.
Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const Matrix& m, const std::filesystem::path& path);

/// Reads 1-based labels and returns them 0-based.
Labels load_labels(const std::filesystem::path& path);
/// Writes 0-based labels as 1-based, one per line.
void save_labels(const Labels& labels, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

struct MatrixFile {
  std::filesystem::path path;
  MatrixFormat format = MatrixFormat::kBinary;
};

struct DatasetManifest {
  MatrixFile features_seen;
  std::filesystem::path labels_seen;
  MatrixFile semantics_seen;
  MatrixFile features_unseen;
  MatrixFile semantics_unseen;
  std::optional<std::filesystem::path> truth_unseen;
  TruthSpace truth_space = TruthSpace::kUnseen;
  bool normalize = true;
  std::vector<std::string> class_names_seen;
  std::vector<std::string> class_names_unseen;
};

/// Parses a manifest JSON document. Relative paths resolve against `base_dir`.
DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);
/// Serializes with paths relative to `base_dir` where possible.
std::string manifest_to_json(const DatasetManifest& manifest, const std::filesystem::path& base_dir);

struct Dataset {
  LabeledFeatureSet seen;
  UnlabeledFeatureSet unseen;
};

/// Loads every file, normalizes feature and semantic columns when the
/// manifest asks for it, and validates both sets. Never returns a partially
/// valid dataset.
Dataset load_dataset(const DatasetManifest& manifest);

}  // namespace hpl::io
