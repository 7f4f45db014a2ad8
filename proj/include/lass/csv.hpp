#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lass/errors.hpp"
#include "lass/types.hpp"

namespace lass::io {

// Malformed CSV text. Row and column are 1-based positions in the file
// (0 when the error is not tied to a cell).
class CsvError : public Error {
 public:
  CsvError(const std::string& what, Index row = 0, Index col = 0)
      : Error(what), row_(row), col_(col) {}
  Index row() const { return row_; }
  Index col() const { return col_; }

 private:
  Index row_;
  Index col_;
};

// Comma separated, '.' decimal point, LF or CRLF line ends, blank lines
// ignored. Every row must have the same number of fields. Non-finite values
// (nan, inf) parse but raise NonFiniteInput with the data row index.
MatrixXd parse_csv(std::string_view text, bool skip_header = false);
MatrixXd read_csv(const std::filesystem::path& path, bool skip_header = false);

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);
std::string format_csv(const MatrixXd& values);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace lass::io
