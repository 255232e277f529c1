#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "optomech/fock.hpp"
#include "optomech/measures.hpp"

namespace optomech {

/// {"dim": D, "re": [[...]], "im": [[...]]}, row-major.
nlohmann::json to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

/// Columns x,p,W with 12 significant digits, x varying slowest.
void write_csv(std::ostream& os, const WignerGrid& grid);

/// Writes <stem>.bin (float64, row-major, nx rows of np values, native
/// little-endian) and <stem>.json (axis metadata).
void write_binary(const std::filesystem::path& stem, const WignerGrid& grid);
WignerGrid read_binary(const std::filesystem::path& stem);

/// Fixed 12-significant-digit float formatting used in every output file.
std::string format_number(double v);

}  // namespace optomech
