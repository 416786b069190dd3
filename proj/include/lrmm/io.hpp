#pragma once

#include <filesystem>
#include <string>

#include "lrmm/linalg.hpp"
#include "lrmm/model.hpp"

namespace lrmm::io {

/// Plain CSV, one row per line, no header. Dimensions are inferred; ragged
/// rows raise ParseError.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix parse_matrix_csv(const std::string& text);

/// Values are written with 17 significant digits so reading back is exact.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
std::string format_matrix_csv(const Matrix& m);

/// Directory with manifest.json and sample_00000.csv, sample_00001.csv, ...
SampleSet load_sample_set(const std::filesystem::path& dir);
void save_sample_set(const std::filesystem::path& dir, const SampleSet& samples);

std::string format_double(double x);

}  // namespace lrmm::io
