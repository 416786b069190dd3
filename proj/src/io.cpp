#include "lrmm/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "lrmm/error.hpp"

namespace lrmm::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

double parse_number(std::string_view cell, std::size_t line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
    cell.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" +
                     std::string(cell) + "'");
  return value;
}

std::string sample_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%05zu.csv", i);
  return buf;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

Matrix parse_matrix_csv(const std::string& text) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Eigen::Index count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_number(rest.substr(0, comma), line_no));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols < 0) cols = count;
    if (count != cols)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " columns, got " + std::to_string(count));
    ++rows;
  }
  if (rows == 0) throw ParseError("empty matrix file");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
  return m;
}

Matrix read_matrix_csv(const fs::path& path) {
  try {
    return parse_matrix_csv(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  dump(path, format_matrix_csv(m));
}

SampleSet load_sample_set(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(slurp(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest.json: ") + e.what());
  }
  SampleSet out;
  try {
    out.d1 = manifest.at("d1").get<Eigen::Index>();
    out.d2 = manifest.at("d2").get<Eigen::Index>();
    const auto n = manifest.at("n").get<Eigen::Index>();
    out.noise_scale = manifest.value("noise_scale", 1.0);
    out.seed = manifest.value("seed", std::uint64_t{0});
    if (manifest.contains("labels") && !manifest["labels"].is_null()) {
      auto labels = manifest["labels"].get<std::vector<int>>();
      if (static_cast<Eigen::Index>(labels.size()) != n)
        throw ParseError("manifest.json: labels length differs from n");
      for (int s : labels)
        if (s != 1 && s != -1) throw ParseError("manifest.json: labels must be +-1");
      out.labels = std::move(labels);
    }
    out.stacked.resize(out.d1, out.d2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix x = read_matrix_csv(dir / sample_name(static_cast<std::size_t>(i)));
      if (x.rows() != out.d1 || x.cols() != out.d2)
        throw DimensionError(sample_name(static_cast<std::size_t>(i)) +
                             " does not match manifest dimensions");
      out.observation(i) = x;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest.json: ") + e.what());
  }
  return out;
}

void save_sample_set(const fs::path& dir, const SampleSet& samples) {
  fs::create_directories(dir);
  json manifest = {{"d1", samples.d1},
                   {"d2", samples.d2},
                   {"n", samples.size()},
                   {"noise_scale", samples.noise_scale},
                   {"seed", samples.seed}};
  if (samples.labels) manifest["labels"] = *samples.labels;
  dump(dir / "manifest.json", manifest.dump(2) + "\n");
  for (Eigen::Index i = 0; i < samples.size(); ++i)
    write_matrix_csv(dir / sample_name(static_cast<std::size_t>(i)),
                     samples.observation(i));
}

}  // namespace lrmm::io
