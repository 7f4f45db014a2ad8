#include "lass/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace lass::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, Index line, Index col) {
  std::string_view text = trim(field);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) {
    throw CsvError("empty field at row " + std::to_string(line) + ", column " + std::to_string(col),
                   line, col);
  }
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw CsvError("cannot parse '" + std::string(trim(field)) + "' as a number at row " +
                       std::to_string(line) + ", column " + std::to_string(col),
                   line, col);
  }
  return value;
}

}  // namespace

MatrixXd parse_csv(std::string_view text, bool skip_header) {
  std::vector<double> values;
  Index cols = 0;
  Index rows = 0;
  Index line_no = 0;
  bool header_pending = skip_header;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    Index col = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      ++col;
      values.push_back(parse_field(field, line_no, col));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = col;
    } else if (col != cols) {
      throw CsvError("row " + std::to_string(line_no) + " has " + std::to_string(col) +
                         " fields, expected " + std::to_string(cols),
                     line_no, col);
    }
    for (Index k = 0; k < col; ++k) {
      if (!std::isfinite(values[values.size() - static_cast<std::size_t>(col - k)])) {
        throw NonFiniteInput("non-finite value at row " + std::to_string(line_no) + ", column " +
                                 std::to_string(k + 1),
                             rows, k);
      }
    }
    ++rows;
  }
  if (rows == 0) throw CsvError("empty input");
  return Eigen::Map<const MatrixXd>(values.data(), rows, cols);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

MatrixXd read_csv(const std::filesystem::path& path, bool skip_header) {
  return parse_csv(read_text(path), skip_header);
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, end);
}

std::string format_csv(const MatrixXd& values) {
  std::string out;
  for (Index n = 0; n < values.rows(); ++n) {
    for (Index k = 0; k < values.cols(); ++k) {
      if (k > 0) out += ',';
      out += format_number(values(n, k));
    }
    out += '\n';
  }
  return out;
}

}  // namespace lass::io
