#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pqdsim/linalg.hpp"

namespace pqdsim {

// {"rows":m,"cols":n,"re":[...],"im":[...]}, row-major.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

// First line "rows,cols" (the two integers), then one "re,im" line per entry, row-major.
std::string matrix_to_csv(const ComplexMatrix& m);
ComplexMatrix matrix_from_csv(const std::string& text);

// Dispatches on extension: .csv is CSV, anything else JSON.
ComplexMatrix load_matrix(const std::filesystem::path& path);

}  // namespace pqdsim
