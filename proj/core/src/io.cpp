#include "htsne/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "htsne/error.hpp"

namespace htsne {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool to_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::uint32_t read_be32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (std::size_t b = 0; b < 4; ++b) v = (v << 8) | static_cast<unsigned char>(bytes[offset + b]);
  return v;
}

void put_be32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

// Returns the header length and the item count after checking the magic.
std::size_t idx_header(std::string_view bytes, std::uint32_t magic, std::size_t dims, const char* what,
                       std::vector<std::uint32_t>& sizes) {
  const std::size_t header = 4 + 4 * dims;
  if (bytes.size() < 4) throw ParseError(std::string("IDX ") + what + ": file too short for a header");
  const std::uint32_t found = read_be32(bytes, 0);
  if (found != magic) {
    throw ParseError(std::string("IDX ") + what + ": magic " + hex(found) + ", expected " + hex(magic));
  }
  if (bytes.size() < header) throw ParseError(std::string("IDX ") + what + ": truncated header");
  sizes.clear();
  for (std::size_t d = 0; d < dims; ++d) sizes.push_back(read_be32(bytes, 4 + 4 * d));
  return header;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  bool first = true;
  bool label_column = false;
  Labels labels;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const auto cells = split(line);
    if (first) {
      first = false;
      bool numeric = true;
      double dummy = 0.0;
      for (auto c : cells) numeric = numeric && to_number(c, dummy);
      width = cells.size();
      if (!numeric) {
        for (auto c : cells) table.header.emplace_back(c);
        label_column = table.header.size() >= 2 && table.header.back() == "label";
        if (label_column) table.header.pop_back();
        continue;
      }
    }
    if (cells.size() != width) {
      throw ParseError("CSV row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                           " columns, expected " + std::to_string(width),
                       line_no, std::min(cells.size(), width) + 1);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!to_number(cells[c], v)) {
        throw ParseError("CSV row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                             ": '" + std::string(cells[c]) + "' is not a number",
                         line_no, c + 1);
      }
      if (label_column && c + 1 == cells.size()) {
        if (v != std::floor(v) || std::abs(v) > 1e9) {
          throw ParseError("CSV row " + std::to_string(line_no) + ": label '" + std::string(cells[c]) +
                               "' is not an integer",
                           line_no, c + 1);
        }
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("CSV contains no data rows");
  const std::size_t cols = label_column ? width - 1 : width;
  table.data = DataMatrix(rows, cols, std::move(values));
  if (label_column) table.labels = std::move(labels);
  return table;
}

CsvTable load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

DataMatrix parse_idx_images(std::string_view bytes) {
  std::vector<std::uint32_t> sizes;
  const std::size_t header = idx_header(bytes, kImageMagic, 3, "images", sizes);
  const std::size_t n = sizes[0];
  const std::size_t dim = static_cast<std::size_t>(sizes[1]) * sizes[2];
  if (bytes.size() - header < n * dim) {
    throw ParseError("IDX images: payload truncated, expected " + std::to_string(n * dim) + " bytes, found " +
                     std::to_string(bytes.size() - header));
  }
  DataMatrix out(n, dim);
  auto& v = out.values();
  for (std::size_t i = 0; i < n * dim; ++i) v[i] = static_cast<unsigned char>(bytes[header + i]);
  return out;
}

Labels parse_idx_labels(std::string_view bytes) {
  std::vector<std::uint32_t> sizes;
  const std::size_t header = idx_header(bytes, kLabelMagic, 1, "labels", sizes);
  const std::size_t n = sizes[0];
  if (bytes.size() - header < n) {
    throw ParseError("IDX labels: payload truncated, expected " + std::to_string(n) + " bytes, found " +
                     std::to_string(bytes.size() - header));
  }
  Labels out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<unsigned char>(bytes[header + i]);
  return out;
}

IdxData load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  IdxData out;
  out.data = parse_idx_images(read_file(images_path));
  out.labels = parse_idx_labels(read_file(labels_path));
  if (out.labels.size() != out.data.rows()) {
    throw ParseError("IDX: " + std::to_string(out.data.rows()) + " images but " +
                     std::to_string(out.labels.size()) + " labels");
  }
  return out;
}

IdxData load_idx_concat(const std::vector<std::pair<std::filesystem::path, std::filesystem::path>>& files) {
  if (files.empty()) throw InvalidArgument("no IDX files given");
  IdxData out;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (const auto& [images, labels] : files) {
    IdxData part = load_idx(images, labels);
    if (rows > 0 && part.data.cols() != cols) throw ParseError("IDX: image sizes differ between files");
    cols = part.data.cols();
    rows += part.data.rows();
    values.insert(values.end(), part.data.values().begin(), part.data.values().end());
    out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
  }
  out.data = DataMatrix(rows, cols, std::move(values));
  return out;
}

std::string encode_idx_images(const DataMatrix& images, std::size_t rows, std::size_t cols) {
  if (rows * cols != images.cols()) throw InvalidArgument("image shape does not match the matrix width");
  std::string out;
  put_be32(out, kImageMagic);
  put_be32(out, static_cast<std::uint32_t>(images.rows()));
  put_be32(out, static_cast<std::uint32_t>(rows));
  put_be32(out, static_cast<std::uint32_t>(cols));
  for (double v : images.values()) {
    if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v)) throw InvalidArgument("IDX pixels must be bytes");
    out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  return out;
}

std::string encode_idx_labels(const Labels& labels) {
  std::string out;
  put_be32(out, kLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) {
    if (l < 0 || l > 255) throw InvalidArgument("IDX labels must be bytes");
    out.push_back(static_cast<char>(static_cast<unsigned char>(l)));
  }
  return out;
}

std::string embedding_csv(const Embedding& emb, const Labels& labels) {
  if (!labels.empty() && labels.size() != emb.size()) throw InvalidArgument("one label per point is required");
  std::string out = "x,y,label\n";
  char buf[96];
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const int label = labels.empty() ? -1 : labels[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", emb.x(i), emb.y(i), label);
    out += buf;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return contents;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace htsne
