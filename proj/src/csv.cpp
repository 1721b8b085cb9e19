#include "dimv/csv.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "dimv/errors.hpp"

namespace dimv {

void validate(const CsvConvention& conv) {
  if (conv.na_token.empty()) {
    throw ValidationError("na token must not be empty");
  }
  if (std::isdigit(static_cast<unsigned char>(conv.delimiter)) ||
      conv.delimiter == '.' || conv.delimiter == '-') {
    throw ValidationError("delimiter must not be a digit, dot, or minus");
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

// Reads all data lines of a CSV as trimmed cells.
std::vector<std::vector<std::string>> read_cells(const std::string& path,
                                                 const CsvConvention& conv) {
  validate(conv);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_pending = conv.has_header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (trim(line).empty()) continue;
    auto cells = split(line, conv.delimiter);
    for (auto& c : cells) c = trim(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError("row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": cannot parse '" + cell + "'");
  }
  return value;
}

}  // namespace

MaskedMatrix read_csv(const std::string& path, const CsvConvention& conv) {
  const auto rows = read_cells(path, conv);
  if (rows.empty()) throw ParseError(path + ": no data rows");
  const std::size_t p = rows.front().size();
  Eigen::MatrixXd values =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(p));
  BoolMatrix mask = BoolMatrix::Constant(values.rows(), values.cols(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != p) {
      throw ParseError("row " + std::to_string(i + 1) + " has " +
                       std::to_string(rows[i].size()) +
                       " cells, expected " + std::to_string(p));
    }
    for (std::size_t j = 0; j < p; ++j) {
      const std::string& cell = rows[i][j];
      if (cell == conv.na_token) continue;
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_cell(cell, i + 1, j + 1);
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = true;
    }
  }
  return MaskedMatrix(std::move(values), std::move(mask));
}

namespace {

void write_table(const std::string& path, const CsvConvention& conv,
                 Eigen::Index rows, Eigen::Index cols,
                 const std::function<void(std::ostream&, Eigen::Index,
                                          Eigen::Index)>& emit_cell) {
  validate(conv);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (conv.has_header) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j > 0) out << conv.delimiter;
      out << "f" << j;
    }
    out << "\n";
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j > 0) out << conv.delimiter;
      emit_cell(out, i, j);
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

void emit_value(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_csv(const Eigen::MatrixXd& values, const std::string& path,
               const CsvConvention& conv) {
  write_table(path, conv, values.rows(), values.cols(),
              [&](std::ostream& out, Eigen::Index i, Eigen::Index j) {
                emit_value(out, values(i, j));
              });
}

void write_csv(const MaskedMatrix& x, const std::string& path,
               const CsvConvention& conv) {
  write_table(path, conv, x.rows(), x.cols(),
              [&](std::ostream& out, Eigen::Index i, Eigen::Index j) {
                if (x.mask(i, j)) {
                  emit_value(out, x.values(i, j));
                } else {
                  out << conv.na_token;
                }
              });
}

BoolMatrix read_mask_csv(const std::string& path, const CsvConvention& conv) {
  const auto rows = read_cells(path, conv);
  if (rows.empty()) throw ParseError(path + ": no data rows");
  const std::size_t p = rows.front().size();
  BoolMatrix missing = BoolMatrix::Constant(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p),
      false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != p) {
      throw ParseError("row " + std::to_string(i + 1) + " has " +
                       std::to_string(rows[i].size()) +
                       " cells, expected " + std::to_string(p));
    }
    for (std::size_t j = 0; j < p; ++j) {
      const std::string& cell = rows[i][j];
      if (cell != "0" && cell != "1") {
        throw ParseError("row " + std::to_string(i + 1) + ", column " +
                         std::to_string(j + 1) + ": mask cell must be 0 or 1");
      }
      missing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cell == "1";
    }
  }
  return missing;
}

void write_mask_csv(const BoolMatrix& missing, const std::string& path,
                    const CsvConvention& conv) {
  write_table(path, conv, missing.rows(), missing.cols(),
              [&](std::ostream& out, Eigen::Index i, Eigen::Index j) {
                out << (missing(i, j) ? '1' : '0');
              });
}

}  // namespace dimv
