#pragma once

#include <string>
#include <vector>

#include "gpbold/model.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

/// Shortest round-trip decimal form of a double (deterministic output).
std::string format_double(double value);

/// Write a matrix as CSV with one header row. Column names optional
/// (defaults c0, c1, ...).
void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& col_names = {});

/// Read a numeric CSV written by write_csv (header row required). Parse
/// failures report row and column.
Matrix read_csv(const std::string& path, std::vector<std::string>* col_names = nullptr);

/// Serialize retained draws to a directory: one CSV per parameter group
/// plus meta.json.
void save_draws(const std::string& dir, const PosteriorDraws& draws);
PosteriorDraws load_draws(const std::string& dir);

void ensure_directory(const std::string& dir);

}  // namespace gpbold
