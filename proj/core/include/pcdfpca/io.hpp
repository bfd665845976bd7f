#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pcdfpca/matrix.hpp"
#include "pcdfpca/model.hpp"

namespace pcdfpca {

/// Numeric CSV. A first row that does not parse as numbers is treated as a
/// header and skipped. Ragged rows or non-numeric cells raise parse_error
/// with the offending line number.
RealMatrix read_csv(std::istream& in);
RealMatrix read_csv(const std::filesystem::path& path);

/// Rows of decimal numbers with 17 significant digits (lossless for doubles).
void write_csv(std::ostream& out, const RealMatrix& m, const std::string& header = {});

/// Single-column or single-row CSV flattened to a vector.
std::vector<double> read_vector_csv(const std::filesystem::path& path);

/// Model as one JSON document; doubles round-trip exactly.
std::string model_to_json(const PcDfpcaModel& model);
PcDfpcaModel model_from_json(const std::string& text);

/// Eigenvalue curves as a JSON array of {frequency, index, value} records.
std::string eigenvalue_curves_json(const PcDfpcaModel& model);

/// Write `contents` to a temporary sibling file and rename it over `path`,
/// so a failed run never leaves a partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace pcdfpca
