#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "htsne/error.hpp"
#include "htsne/io.hpp"
#include "oracles.hpp"

using namespace htsne;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "htsne_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string be32(std::uint32_t v) {
  return {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8), static_cast<char>(v)};
}

}  // namespace

TEST(Csv, PlainMatrix) {
  const auto t = parse_csv("1,2\n3,4\n");
  EXPECT_EQ(t.data.rows(), 2u);
  EXPECT_EQ(t.data.cols(), 2u);
  EXPECT_EQ(t.data.values(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_FALSE(t.labels.has_value());
  EXPECT_TRUE(t.header.empty());
}

TEST(Csv, HeaderIsSkipped) {
  const auto t = parse_csv("a,b\n1,2\n");
  EXPECT_EQ(t.data.rows(), 1u);
  EXPECT_EQ(t.data.values(), (std::vector<double>{1, 2}));
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
}

TEST(Csv, RaggedRowNamesRow) {
  try {
    parse_csv("1,2\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Csv, NonNumericCellNamesRowAndColumn) {
  try {
    parse_csv("x,y\n1,2\n3,abc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(Csv, LabelColumn) {
  const auto t = parse_csv("f1,f2,label\n0.5,1.5,3\n-2,4e-3,7\n");
  EXPECT_EQ(t.data.cols(), 2u);
  EXPECT_EQ(t.data.values(), (std::vector<double>{0.5, 1.5, -2, 4e-3}));
  ASSERT_TRUE(t.labels.has_value());
  EXPECT_EQ(*t.labels, (Labels{3, 7}));
}

TEST(Csv, CrLfAndBlankLines) {
  const auto t = parse_csv("1,2\r\n\r\n3,4\r\n\n");
  EXPECT_EQ(t.data.values(), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Csv, EmptyIsAnError) {
  EXPECT_THROW(parse_csv(""), ParseError);
  EXPECT_THROW(parse_csv("a,b\n"), ParseError);
}

TEST(Csv, LoadFromFile) {
  const auto path = scratch("small.csv");
  write_file(path, "1,2,3\n4,5,6\n");
  const auto t = load_csv(path);
  EXPECT_EQ(t.data.rows(), 2u);
  EXPECT_EQ(t.data.cols(), 3u);
  EXPECT_THROW(load_csv(scratch("does-not-exist.csv")), IoError);
}

TEST(Idx, TwoImageFixtureRoundTrips) {
  // Hand-built file: magic, count 2, 2 x 3 pixels, then 12 bytes.
  std::string images = be32(0x803) + be32(2) + be32(2) + be32(3);
  for (int i = 0; i < 12; ++i) images.push_back(static_cast<char>(i * 20));
  std::string labels = be32(0x801) + be32(2);
  labels.push_back(7);
  labels.push_back(1);

  const auto x = parse_idx_images(images);
  EXPECT_EQ(x.rows(), 2u);
  EXPECT_EQ(x.cols(), 6u);
  EXPECT_EQ(x(1, 5), 220.0);
  EXPECT_EQ(parse_idx_labels(labels), (Labels{7, 1}));
  EXPECT_EQ(encode_idx_images(x, 2, 3), images);
  EXPECT_EQ(encode_idx_labels({7, 1}), labels);

  write_file(scratch("img.idx"), images);
  write_file(scratch("lab.idx"), labels);
  const auto d = load_idx(scratch("img.idx"), scratch("lab.idx"));
  EXPECT_EQ(d.data.values(), x.values());
  EXPECT_EQ(d.labels, (Labels{7, 1}));
}

TEST(Idx, FullByteRange) {
  DataMatrix x(3, 4);
  for (std::size_t i = 0; i < 12; ++i) x.values()[i] = static_cast<double>((i * 23) % 256);
  x(2, 3) = 255.0;
  const auto bytes = encode_idx_images(x, 2, 2);
  EXPECT_EQ(parse_idx_images(bytes).values(), x.values());
}

TEST(Idx, MagicMismatch) {
  const std::string labels = be32(0x801) + be32(0);
  EXPECT_THROW(parse_idx_images(labels), ParseError);
  const std::string images = be32(0x803) + be32(0) + be32(28) + be32(28);
  EXPECT_THROW(parse_idx_labels(images), ParseError);
}

TEST(Idx, Truncated) {
  std::string images = be32(0x803) + be32(2) + be32(2) + be32(2) + std::string(7, '\0');
  EXPECT_THROW(parse_idx_images(images), ParseError);
  EXPECT_THROW(parse_idx_images(be32(0x803) + be32(2)), ParseError);
  EXPECT_THROW(parse_idx_labels(be32(0x801) + be32(3) + std::string(2, '\0')), ParseError);
  EXPECT_THROW(parse_idx_labels("ab"), ParseError);
}

TEST(Idx, CountMismatch) {
  write_file(scratch("img3.idx"), encode_idx_images(DataMatrix(3, 4), 2, 2));
  write_file(scratch("lab2.idx"), encode_idx_labels({1, 2}));
  EXPECT_THROW(load_idx(scratch("img3.idx"), scratch("lab2.idx")), ParseError);
}

TEST(Idx, Concatenation) {
  DataMatrix a(2, 4, {1, 2, 3, 4, 5, 6, 7, 8});
  DataMatrix b(1, 4, {9, 10, 11, 12});
  write_file(scratch("a.idx"), encode_idx_images(a, 2, 2));
  write_file(scratch("al.idx"), encode_idx_labels({0, 1}));
  write_file(scratch("b.idx"), encode_idx_images(b, 2, 2));
  write_file(scratch("bl.idx"), encode_idx_labels({9}));
  const auto d = load_idx_concat({{scratch("a.idx"), scratch("al.idx")}, {scratch("b.idx"), scratch("bl.idx")}});
  EXPECT_EQ(d.data.rows(), 3u);
  EXPECT_EQ(d.data(2, 3), 12.0);
  EXPECT_EQ(d.labels, (Labels{0, 1, 9}));
}

TEST(Idx, MnistSizeWhenAvailable) {
  const char* dir = std::getenv("HTSNE_MNIST_DIR");
  if (dir == nullptr) GTEST_SKIP() << "HTSNE_MNIST_DIR not set";
  const fs::path d(dir);
  const auto data = load_idx_concat({{d / "train-images-idx3-ubyte", d / "train-labels-idx1-ubyte"},
                                     {d / "t10k-images-idx3-ubyte", d / "t10k-labels-idx1-ubyte"}});
  EXPECT_EQ(data.data.rows(), 70000u);
  EXPECT_EQ(data.data.cols(), 784u);
}

TEST(EmbeddingCsv, RoundTripsAtFullPrecision) {
  const auto e = oracle::gaussian_embedding(50, 1e3, 4);
  Labels labels(50);
  for (std::size_t i = 0; i < 50; ++i) labels[i] = static_cast<int>(i % 4);
  const auto text = embedding_csv(e, labels);
  EXPECT_EQ(text.substr(0, 10), "x,y,label\n");
  const auto t = parse_csv(text);
  ASSERT_TRUE(t.labels.has_value());
  EXPECT_EQ(*t.labels, labels);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(t.data(i, 0), e.x(i));
    EXPECT_EQ(t.data(i, 1), e.y(i));
  }
}

TEST(EmbeddingCsv, UnlabelledGetsMinusOne) {
  const Embedding e(2, {0.5, 1.0, -1.0, 2.0});
  const auto t = parse_csv(embedding_csv(e, {}));
  EXPECT_EQ(*t.labels, (Labels{-1, -1}));
  EXPECT_THROW(embedding_csv(e, {1}), InvalidArgument);
}

TEST(Files, WriteThenRead) {
  const auto p = scratch("bytes.bin");
  std::string payload = "abc";
  payload.push_back('\0');
  payload += "\xff\n";
  write_file(p, payload);
  EXPECT_EQ(read_file(p), payload);
  EXPECT_THROW(read_file(scratch("missing/none.bin")), IoError);
}
