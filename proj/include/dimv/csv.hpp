#pragma once

#include <string>

#include <Eigen/Dense>

#include "dimv/masked_matrix.hpp"

namespace dimv {

struct CsvConvention {
  std::string na_token = "NA";
  bool has_header = true;
  char delimiter = ',';
};

void validate(const CsvConvention& conv);

// Numeric CSV with na_token marking missing cells. Cells are trimmed of
// surrounding whitespace; anything else that does not parse as a real is a
// ParseError naming the 1-based data row and column.
MaskedMatrix read_csv(const std::string& path, const CsvConvention& conv = {});

// Complete-matrix writer; values are emitted with 17 significant digits so
// a read round-trip is exact. A generated f0..f{p-1} header is written when
// the convention asks for one.
void write_csv(const Eigen::MatrixXd& values, const std::string& path,
               const CsvConvention& conv = {});

// Masked writer: missing entries become na_token.
void write_csv(const MaskedMatrix& x, const std::string& path,
               const CsvConvention& conv = {});

// Missingness masks as 0/1 CSV, 1 = missing.
BoolMatrix read_mask_csv(const std::string& path,
                         const CsvConvention& conv = {});
void write_mask_csv(const BoolMatrix& missing, const std::string& path,
                    const CsvConvention& conv = {});

}  // namespace dimv
