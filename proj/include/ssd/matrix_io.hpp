#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ssd/core.hpp"

namespace ssd::io {

enum class MatrixFormat { kCsv, kBinary };

// ".ssmx" and ".bin" select the binary format, anything else CSV.
MatrixFormat format_for_path(const std::filesystem::path& path);

// One row per line, comma separated, 17 significant digits.
std::string to_csv(const DenseMatrix& m);
DenseMatrix from_csv(std::string_view text);

// "SSMX", u32 rows, u32 cols, row-major little-endian f64.
std::string to_binary(const DenseMatrix& m);
DenseMatrix from_binary(std::string_view bytes);

void write_matrix(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_matrix(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Shortest round-trip-safe representation ("%.17g"), "inf"/"nan" spelled out.
std::string format_double(double v);

}  // namespace ssd::io
