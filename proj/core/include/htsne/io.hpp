#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "htsne/types.hpp"

namespace htsne {

struct CsvTable {
  DataMatrix data;
  /// Present when the header's last column is named "label".
  std::optional<Labels> labels;
  /// Column names of `data`; empty when the file has no header.
  std::vector<std::string> header;
};

/// Comma-separated numeric table. The first row is a header when any of its
/// cells is not a number. Throws ParseError naming the 1-based row and column
/// of a ragged row or a non-numeric cell.
CsvTable parse_csv(std::string_view text);

/// Throws IoError if the file cannot be read.
CsvTable load_csv(const std::filesystem::path& path);

/// Big-endian IDX tensors as used by MNIST.
/// Images (magic 0x00000803) become an n x (rows * cols) matrix of byte
/// values; labels (magic 0x00000801) a vector of integers.
/// Throws ParseError on a magic mismatch or truncated payload.
DataMatrix parse_idx_images(std::string_view bytes);
Labels parse_idx_labels(std::string_view bytes);

struct IdxData {
  DataMatrix data;
  Labels labels;
};

/// Images and labels from two IDX files; throws ParseError if their counts
/// differ.
IdxData load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Several image/label file pairs stacked in order.
IdxData load_idx_concat(const std::vector<std::pair<std::filesystem::path, std::filesystem::path>>& files);

/// IDX encodings, the inverse of the parsers above.
std::string encode_idx_images(const DataMatrix& images, std::size_t rows, std::size_t cols);
std::string encode_idx_labels(const Labels& labels);

/// "x,y,label" rows with 17 significant digits; labels of -1 when absent.
std::string embedding_csv(const Embedding& emb, const Labels& labels);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace htsne
