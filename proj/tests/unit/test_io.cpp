#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "relunmd/relunmd.hpp"

using namespace relunmd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "relunmd_io_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<unsigned char> header(std::uint32_t magic, std::vector<std::uint32_t> dims) {
  std::vector<unsigned char> out;
  auto put = [&](std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<unsigned char>(v >> s));
  };
  put(magic);
  for (auto d : dims) put(d);
  return out;
}

}  // namespace

TEST(Synthetic, SparsityNearHalf) {
  EXPECT_NEAR(zero_fraction(generate_synthetic({500, 500, 8, 1}).x), 0.5, 0.05);
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) mean += zero_fraction(generate_synthetic({200, 200, 8, seed}).x);
  mean /= 20.0;
  EXPECT_GE(mean, 0.48);
  EXPECT_LE(mean, 0.52);
}

TEST(Synthetic, DeterministicAndExact) {
  const SyntheticInstance a = generate_synthetic({30, 20, 4, 5});
  EXPECT_EQ(a.x, generate_synthetic({30, 20, 4, 5}).x);
  EXPECT_EQ(relative_error(a.x, a.w_true * a.h_true), 0.0);
  EXPECT_THROW(generate_synthetic({3, 3, 4, 1}), ParameterError);
}

TEST(Synthetic, DictionaryAndSurrogateSparsity) {
  EXPECT_NEAR(zero_fraction(sparse_dictionary(200, 50, 0.85, 1)), 0.85, 0.02);
  const Matrix s = sparse_surrogate(100, 120, 10, 0.75, 2);
  EXPECT_NEAR(zero_fraction(s), 0.75, 0.01);
  EXPECT_GE(s.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(s.maxCoeff(), 1.0);
}

// ---------------------------------------------------------------------------

TEST(Csv, RoundTrip) {
  const Matrix a = Rng(3, Stream::data).normal_matrix(10, 7) * 1e3;
  const fs::path path = scratch("round.csv");
  save_csv(a, path.string());
  const Matrix b = load_csv(path.string());
  ASSERT_EQ(b.rows(), 10);
  ASSERT_EQ(b.cols(), 7);
  EXPECT_EQ(a, b);
}

TEST(Csv, Format) {
  Matrix a(2, 2);
  a << 1.0, -0.5, 0.1, 2e-300;
  EXPECT_EQ(to_csv(a), "1,-0.5\n0.10000000000000001,2.0000000000000001e-300\n");
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse_csv(""), CsvZeroDimensionError);
  EXPECT_THROW(parse_csv("\n\n"), CsvZeroDimensionError);
  EXPECT_THROW(parse_csv("1,2\n3\n"), CsvParseError);
  try {
    parse_csv("1,2,3\n4,x5,6\n");
    FAIL();
  } catch (const CsvParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
  EXPECT_THROW(parse_csv("1,nan\n"), CsvParseError);
  EXPECT_THROW(parse_csv("1,,2\n"), CsvParseError);
  EXPECT_THROW(load_csv("/nonexistent/x.csv"), CsvError);
}

TEST(Csv, ToleratesCrlfAndSpaces) {
  const Matrix a = parse_csv("1, 2\r\n+3,4\r\n");
  Matrix want(2, 2);
  want << 1, 2, 3, 4;
  EXPECT_EQ(a, want);
}

// ---------------------------------------------------------------------------

TEST(Idx, CraftedFixture) {
  auto bytes = header(0x00000803, {2, 2, 2});
  for (unsigned char b : {0, 255, 128, 0, 255, 0, 0, 128}) bytes.push_back(b);
  const fs::path images = scratch("fixture-images");
  write_bytes(images, bytes);
  auto lbytes = header(0x00000801, {2});
  lbytes.push_back(7);
  lbytes.push_back(3);
  const fs::path labels = scratch("fixture-labels");
  write_bytes(labels, lbytes);

  const ImageDataset d = load_idx(images.string(), labels.string());
  Matrix want(2, 4);
  want << 0, 1, 128 / 255.0, 0, 1, 0, 0, 128 / 255.0;
  EXPECT_EQ(d.matrix, want);
  EXPECT_EQ(d.image_height, 2);
  EXPECT_EQ(d.image_width, 2);
  ASSERT_TRUE(d.labels);
  EXPECT_EQ(*d.labels, (std::vector<int>{7, 3}));
}

TEST(Idx, NamedErrors) {
  const fs::path bad = scratch("bad-magic");
  auto bytes = header(0x00000802, {1, 1, 1});
  bytes.push_back(0);
  write_bytes(bad, bytes);
  EXPECT_THROW(load_idx(bad.string()), IdxBadMagicError);

  const fs::path short_payload = scratch("truncated");
  auto t = header(0x00000803, {2, 2, 2});
  t.push_back(1);
  write_bytes(short_payload, t);
  EXPECT_THROW(load_idx(short_payload.string()), IdxTruncatedError);

  const fs::path short_header = scratch("short-header");
  write_bytes(short_header, {0, 0, 8});
  EXPECT_THROW(load_idx(short_header.string()), IdxTruncatedError);

  const fs::path huge = scratch("overflow");
  write_bytes(huge, header(0x00000803, {0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu}));
  EXPECT_THROW(load_idx(huge.string()), IdxDimensionOverflowError);

  const fs::path images = scratch("count-images");
  auto ib = header(0x00000803, {1, 1, 1});
  ib.push_back(9);
  write_bytes(images, ib);
  const fs::path labels = scratch("count-labels");
  auto lb = header(0x00000801, {2});
  lb.push_back(0);
  lb.push_back(1);
  write_bytes(labels, lb);
  EXPECT_THROW(load_idx(images.string(), labels.string()), IdxCountMismatchError);

  EXPECT_THROW(load_idx(scratch("missing-file").string() + "/nope"), IdxIoError);
}

TEST(Idx, WriterRoundTrip) {
  ImageDataset d;
  d.image_height = 3;
  d.image_width = 4;
  d.matrix = Matrix(5, 12);
  Rng rng(4, Stream::data);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 12; ++j) d.matrix(i, j) = static_cast<double>(rng.below(256)) / 255.0;
  d.labels = std::vector<int>{0, 1, 2, 3, 9};
  const fs::path images = scratch("rt-images"), labels = scratch("rt-labels");
  save_idx(d, images.string(), labels.string());
  const ImageDataset back = load_idx(images.string(), labels.string());
  EXPECT_EQ(back.matrix, d.matrix);
  EXPECT_EQ(back.image_height, 3);
  EXPECT_EQ(back.image_width, 4);
  EXPECT_EQ(*back.labels, *d.labels);
}

// Independent byte reader on the official training file when present.
TEST(Idx, OfficialMnistIfPresent) {
  const char* env = std::getenv("RELUNMD_MNIST_IMAGES");
  if (!env || !fs::exists(env)) GTEST_SKIP() << "set RELUNMD_MNIST_IMAGES to run";
  const ImageDataset d = load_idx(env);
  EXPECT_EQ(d.matrix.cols(), 784);
  EXPECT_GE(d.matrix.minCoeff(), 0.0);
  EXPECT_LE(d.matrix.maxCoeff(), 1.0);
  std::FILE* f = std::fopen(env, "rb");
  ASSERT_NE(f, nullptr);
  for (Index probe : {Index{0}, Index{12345}, d.matrix.size() - 1}) {
    const Index i = probe / 784, j = probe % 784;
    if (i >= d.matrix.rows()) continue;
    std::fseek(f, 16 + static_cast<long>(probe), SEEK_SET);
    const int byte = std::fgetc(f);
    EXPECT_EQ(d.matrix(i, j), byte / 255.0);
  }
  std::fclose(f);
}

// ---------------------------------------------------------------------------

TEST(Nnls, IdentityCases) {
  Rng rng(5, Stream::data);
  const Matrix b = rng.normal_matrix(4, 3);
  EXPECT_LE((nnls(Matrix::Identity(4, 4), b.cwiseAbs()).solution - b.cwiseAbs()).norm(), 1e-12);
  EXPECT_LE((nnls(Matrix::Identity(4, 4), b).solution - relu(b)).norm(), 1e-12);
}

TEST(Nnls, MatchesSupportEnumeration) {
  Rng rng(6, Stream::data);
  const Matrix a = rng.normal_matrix(4, 2);
  const Matrix b = rng.normal_matrix(4, 3);
  const NnlsResult got = nnls(a, b);
  EXPECT_TRUE(got.converged);
  EXPECT_LE((got.solution - oracle::nnls_enumerate(a, b)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(got.kkt_residual, 1e-8 * (a.transpose() * b).norm());
}

TEST(Nnls, NonConvergedStillNonnegative) {
  Rng rng(7, Stream::data);
  Matrix a = rng.normal_matrix(30, 6);
  a.col(5) = a.col(4) + 1e-6 * rng.normal_matrix(30, 1).col(0);  // ill conditioned
  const Matrix b = rng.normal_matrix(30, 5);
  const NnlsResult got = nnls(a, b, 1e-14, 2);
  EXPECT_FALSE(got.converged);
  EXPECT_GE(got.solution.minCoeff(), 0.0);
}

TEST(Nnls, Errors) {
  EXPECT_THROW(nnls(Matrix::Zero(3, 2), Matrix::Ones(3, 1)), ParameterError);
  EXPECT_THROW(nnls(Matrix::Ones(3, 2), Matrix::Ones(4, 1)), ShapeError);
}

TEST(CompressionError, ConsistentAndZeroBasis) {
  const Matrix u = sparse_dictionary(30, 6, 0.5, 3);
  const Matrix v = sparse_dictionary(6, 40, 0.3, 4);
  const Matrix x = u * v;
  EXPECT_LE(nmf_compression_error(x, u).value, 1e-8);
  EXPECT_EQ(nmf_compression_error(x, Matrix::Zero(30, 6)).value, 1.0);
  EXPECT_EQ(nmf_compression_error(x, -u).value, 1.0);
}

TEST(CompressionError, MatchesColumnwiseEnumeration) {
  Rng rng(8, Stream::data);
  const Matrix u_hat = rng.normal_matrix(6, 3);
  const Matrix x = relu(rng.normal_matrix(6, 5));
  const Matrix basis = relu(u_hat);
  const Matrix v = oracle::nnls_enumerate(basis, x);
  const double want = (x - basis * v).norm() / x.norm();
  EXPECT_NEAR(nmf_compression_error(x, u_hat).value, want, 1e-8);
}

TEST(CompressionError, MonotoneUnderBasisExpansion) {
  const Matrix u = sparse_dictionary(40, 8, 0.6, 5);
  const Matrix x = u * sparse_dictionary(8, 30, 0.4, 6) + 0.1 * sparse_dictionary(40, 30, 0.5, 7);
  Rng rng(9, Stream::data);
  Matrix current = rng.normal_matrix(40, 1);
  double previous = nmf_compression_error(x, current).value;
  for (int k = 0; k < 5; ++k) {
    Matrix grown(40, current.cols() + 1);
    grown << current, rng.normal_matrix(40, 1);
    const double e = nmf_compression_error(x, grown).value;
    EXPECT_LE(e, previous + 1e-9);
    current = grown;
    previous = e;
  }
}
