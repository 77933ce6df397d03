#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "hpl/error.hpp"
#include "hpl/io.hpp"
#include "support.hpp"

using namespace hpl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hpl_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("binary round trip is bitwise and the layout is normative") {
  TempDir tmp;
  std::mt19937_64 rng(1);
  Matrix m = test::random_matrix(3, 4, rng);
  m(0, 0) = -0.0;
  m(1, 1) = std::numeric_limits<double>::denorm_min();
  io::save_matrix(m, tmp.path / "m.hplm", io::MatrixFormat::kBinary);
  const Matrix back = io::load_matrix(tmp.path / "m.hplm", io::MatrixFormat::kBinary);
  CHECK(std::memcmp(back.data(), m.data(), sizeof(double) * 12) == 0);

  const std::string bytes = io::read_file(tmp.path / "m.hplm");
  REQUIRE(bytes.size() == 13 + 8 * 12);
  CHECK(bytes.substr(0, 4) == "HPLM");
  CHECK(bytes[4] == '\x01');
  CHECK(static_cast<unsigned char>(bytes[5]) == 3);
  CHECK(bytes[6] == 0);
  CHECK(static_cast<unsigned char>(bytes[9]) == 4);
  double second;
  std::memcpy(&second, bytes.data() + 13 + 8, 8);
  CHECK(second == m(1, 0));  // column-major
}

TEST_CASE("binary decoding errors carry byte offsets") {
  const std::string good = io::encode_binary_matrix(Matrix::Ones(2, 2));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(io::decode_binary_matrix(bad_magic), FormatError);
  try {
    io::decode_binary_matrix(good.substr(0, 20));
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 20);  // where the data ran out
  }
  CHECK_THROWS_AS(io::decode_binary_matrix(good.substr(0, 7)), FormatError);
  CHECK_THROWS_AS(io::decode_binary_matrix(good + "x"), FormatError);
  std::string bad_version = good;
  bad_version[4] = 2;
  CHECK_THROWS_AS(io::decode_binary_matrix(bad_version), FormatError);

  Matrix nan = Matrix::Ones(2, 2);
  nan(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(io::decode_binary_matrix(io::encode_binary_matrix(nan)), ValidationError);
}

TEST_CASE("csv: literal parse, round trip and NaN rejection") {
  const Matrix m = io::parse_csv_matrix("1,2\n3,4");
  Matrix expected(2, 2);
  expected << 1, 2, 3, 4;
  CHECK(m == expected);

  std::mt19937_64 rng(2);
  const Matrix r = test::random_matrix(5, 3, rng);
  const Matrix back = io::parse_csv_matrix(io::format_csv_matrix(r));
  CHECK((back - r).norm() <= 1e-15 * r.norm());
  CHECK(back == r);  // %.17g is exact

  try {
    io::parse_csv_matrix("1,2\n3,NaN\n");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("col 2") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_csv_matrix("1,2\n3\n"), FormatError);
  CHECK_THROWS_AS(io::parse_csv_matrix("1,abc\n"), FormatError);
}

TEST_CASE("files: missing paths and label files") {
  TempDir tmp;
  CHECK_THROWS_AS(io::load_matrix(tmp.path / "missing.csv"), IoError);
  io::save_labels({0, 2, 1}, tmp.path / "labels.csv");
  CHECK(io::read_file(tmp.path / "labels.csv") == "1\n3\n2\n");
  CHECK(io::load_labels(tmp.path / "labels.csv") == Labels{0, 2, 1});
  io::write_file_atomic(tmp.path / "bad.csv", "1\n0\n");
  CHECK_THROWS_AS(io::load_labels(tmp.path / "bad.csv"), ValidationError);
  CHECK(io::format_from_path("a/b.csv") == io::MatrixFormat::kCsv);
  CHECK(io::format_from_path("a/b.hplm") == io::MatrixFormat::kBinary);
  CHECK(io::parse_matrix_format("hplm-binary") == io::MatrixFormat::kBinary);
  CHECK_THROWS_AS(io::parse_matrix_format("xml"), ValidationError);
}

namespace {

// Minimal 2-class, 3-sample dataset written as CSV files plus a manifest.
fs::path write_minimal(const fs::path& dir, const std::string& labels, bool normalize) {
  io::write_file_atomic(dir / "xs.csv", "3,0,1\n4,1,1\n");
  io::write_file_atomic(dir / "labels.csv", labels);
  io::write_file_atomic(dir / "ys.csv", "1,0\n0,2\n");
  io::write_file_atomic(dir / "xu.csv", "1,0\n0,1\n");
  io::write_file_atomic(dir / "yu.csv", "1\n1\n");
  io::write_file_atomic(dir / "truth.csv", "1\n1\n");
  const std::string manifest = std::string(R"({"X_s": "xs.csv", "labels_s": "labels.csv", "Y_s": "ys.csv",
    "X_u": {"path": "xu.csv", "format": "csv"}, "Y_u": "yu.csv", "truth_u": "truth.csv", "normalize": )") +
                               (normalize ? "true" : "false") + "}";
  io::write_file_atomic(dir / "manifest.json", manifest);
  return dir / "manifest.json";
}

}  // namespace

TEST_CASE("load_dataset: one-hot construction and normalization") {
  TempDir tmp;
  const io::Dataset ds = io::load_dataset(io::load_manifest(write_minimal(tmp.path, "1\n2\n2\n", true)));
  CHECK(ds.seen.onehot().rows() == 2);
  CHECK(ds.seen.onehot().cols() == 3);
  CHECK(ds.seen.onehot().colwise().sum().isOnes());
  CHECK((ds.seen.features().colwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-10);
  CHECK((ds.seen.semantics().colwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-10);
  CHECK(*ds.unseen.truth() == Labels{0, 0});
}

TEST_CASE("load_dataset: distinct rejections") {
  TempDir tmp;
  auto message = [&](const std::string& labels) {
    try {
      io::load_dataset(io::load_manifest(write_minimal(tmp.path, labels, true)));
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("1\n5\n2\n").find("label out of range") != std::string::npos);
  CHECK(message("1\n1\n1\n").find("zero samples") != std::string::npos);

  io::write_file_atomic(tmp.path / "xu.csv", "1,0\n0,1\n0,0\n");
  const fs::path manifest = tmp.path / "manifest.json";
  try {
    io::DatasetManifest mf = io::load_manifest(write_minimal(tmp.path, "1\n2\n2\n", true));
    io::write_file_atomic(tmp.path / "xu.csv", "1,0\n0,1\n0,0\n");
    io::load_dataset(mf);
    FAIL("expected a dimension mismatch");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
  }
  (void)manifest;

  // Without normalization, non-unit features are rejected rather than fixed.
  CHECK_THROWS_AS(io::load_dataset(io::load_manifest(write_minimal(tmp.path, "1\n2\n2\n", false))), ValidationError);
}

TEST_CASE("manifest: round trip through JSON and malformed documents") {
  TempDir tmp;
  const io::DatasetManifest mf = io::load_manifest(write_minimal(tmp.path, "1\n2\n2\n", true));
  const std::string text = io::manifest_to_json(mf, tmp.path);
  const io::DatasetManifest back = io::parse_manifest(text, tmp.path);
  CHECK(back.features_seen.path == mf.features_seen.path);
  CHECK(back.features_unseen.format == io::MatrixFormat::kCsv);
  CHECK(back.truth_unseen == mf.truth_unseen);
  CHECK(back.normalize == mf.normalize);
  CHECK_THROWS_AS(io::parse_manifest("{not json", tmp.path), FormatError);
  CHECK_THROWS_AS(io::parse_manifest(R"({"X_s": "a.csv"})", tmp.path), ValidationError);
}
