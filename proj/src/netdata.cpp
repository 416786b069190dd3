#include "lrmm/netdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "lrmm/error.hpp"
#include "lrmm/io.hpp"

namespace lrmm::net {

namespace fs = std::filesystem;

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

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (const std::logic_error&) {
    return false;
  }
  return pos == s.size();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LayerStack parse_layers(const std::string& text, bool undirected,
                        std::optional<int> node_count) {
  struct Edge {
    std::size_t layer;
    long long src, dst;
  };
  std::vector<Edge> edges;
  std::map<std::string, std::size_t> layer_index;
  LayerStack stack;
  long long max_node = -1;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields(t);
    std::string id, a, b, extra;
    if (!(fields >> id >> a >> b) || (fields >> extra))
      throw ParseError("line " + std::to_string(line_no) + ": expected layer_id src dst");
    long long src = 0, dst = 0;
    if (!parse_int(a, src) || !parse_int(b, dst) || src < 0 || dst < 0)
      throw ParseError("line " + std::to_string(line_no) + ": bad node index");
    if (node_count && (src >= *node_count || dst >= *node_count))
      throw IndexOutOfRange("line " + std::to_string(line_no) + ": node index exceeds " +
                            std::to_string(*node_count - 1));
    auto [it, fresh] = layer_index.emplace(id, stack.layer_ids.size());
    if (fresh) stack.layer_ids.push_back(id);
    edges.push_back({it->second, src, dst});
    max_node = std::max({max_node, src, dst});
  }

  stack.node_count = node_count ? *node_count : static_cast<int>(max_node + 1);
  stack.layers.assign(stack.layer_ids.size(),
                      Matrix::Zero(stack.node_count, stack.node_count));
  for (const Edge& e : edges) {
    stack.layers[e.layer](e.src, e.dst) = 1.0;
    if (undirected) stack.layers[e.layer](e.dst, e.src) = 1.0;
  }
  return stack;
}

LayerStack load_layers(const fs::path& path, bool undirected, std::optional<int> node_count) {
  try {
    return parse_layers(slurp(path), undirected, node_count);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_layers(const LayerStack& stack) {
  std::string out;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const Matrix& a = stack.layers[l];
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (a(i, j) != 0.0)
          out += stack.layer_ids[l] + '\t' + std::to_string(i) + '\t' + std::to_string(j) + '\n';
  }
  return out;
}

CenteredStack center_stack(const LayerStack& stack) {
  if (stack.layers.size() < 2)
    throw EmptyStack("centering needs at least two layers, got " +
                     std::to_string(stack.layers.size()));
  const Eigen::Index d = stack.node_count;
  CenteredStack out;
  out.mean = Matrix::Zero(d, d);
  for (const Matrix& x : stack.layers) out.mean += x;
  out.mean /= static_cast<double>(stack.layers.size());
  std::vector<Matrix> centered;
  centered.reserve(stack.layers.size());
  for (const Matrix& x : stack.layers) centered.push_back(x - out.mean);
  out.centered = SampleSet::from_matrices(centered);
  out.centered.noise_scale = 1.0;
  return out;
}

CenterPair estimate_pair(const LayerStack& stack, int r, FloorDimRule rule) {
  if (stack.layers.empty()) throw EmptyStack("no layers to estimate from");
  if (stack.layers.size() < 4)
    throw TooFewSamples("estimate_pair needs at least four layers");
  CenteredStack cs = center_stack(stack);
  EstimatorConfig cfg;
  cfg.rank = r;
  cfg.split = false;
  cfg.floor_dim_rule = rule;
  const EstimateReport rep = estimate(cs.centered, cfg);
  CenterPair pair;
  pair.mean = std::move(cs.mean);
  pair.m_hat = rep.m_hat;
  pair.m1 = pair.mean + pair.m_hat;
  pair.m2 = pair.mean - pair.m_hat;
  return pair;
}

std::vector<std::string> parse_labels(const std::string& text, int node_count) {
  std::vector<std::optional<std::string>> seen(static_cast<std::size_t>(node_count));
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos)
      throw ParseError("labels line " + std::to_string(line_no) + ": expected node,community");
    const std::string node_s = trim(t.substr(0, comma));
    const std::string community = trim(t.substr(comma + 1));
    long long node = 0;
    if (!parse_int(node_s, node)) {
      if (line_no == 1) continue;  // header
      throw ParseError("labels line " + std::to_string(line_no) + ": bad node index");
    }
    if (node < 0 || node >= node_count)
      throw LabelMismatch("labels line " + std::to_string(line_no) + ": node " + node_s +
                          " outside the network");
    seen[static_cast<std::size_t>(node)] = community;
  }
  std::vector<std::string> labels;
  labels.reserve(seen.size());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw LabelMismatch("node " + std::to_string(i) + " has no community label");
    labels.push_back(*seen[i]);
  }
  return labels;
}

std::vector<std::string> load_labels(const fs::path& path, int node_count) {
  return parse_labels(slurp(path), node_count);
}

std::vector<int> community_order(const std::vector<std::string>& labels) {
  bool numeric = true;
  std::vector<long long> keys(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    numeric = numeric && parse_int(labels[i], keys[i]);
  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return numeric ? keys[a] < keys[b] : labels[a] < labels[b];
  });
  return order;
}

Matrix permute_symmetric(const Matrix& m, const std::vector<int>& order) {
  const auto n = static_cast<Eigen::Index>(order.size());
  if (m.rows() != n || m.cols() != n)
    throw DimensionError("permutation does not match the matrix size");
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(order[i], order[j]);
  return out;
}

std::string format_pgm(const Matrix& m, double lo, double hi) {
  std::string out = "P2\n" + std::to_string(m.cols()) + ' ' + std::to_string(m.rows()) +
                    "\n255\n";
  const double span = hi - lo;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      long pixel = 0;
      if (span > 0.0)
        pixel = std::clamp(std::lround(255.0 * (m(i, j) - lo) / span), 0L, 255L);
      if (j) out += ' ';
      out += std::to_string(pixel);
    }
    out += '\n';
  }
  return out;
}

ExportedFiles reorder_and_export(const CenterPair& pair,
                                 const std::optional<fs::path>& labels_path,
                                 const fs::path& out_dir) {
  const int d = static_cast<int>(pair.m1.rows());
  ExportedFiles out;
  if (labels_path) {
    out.order = community_order(load_labels(*labels_path, d));
  } else {
    out.order.resize(static_cast<std::size_t>(d));
    std::iota(out.order.begin(), out.order.end(), 0);
  }
  const Matrix a = permute_symmetric(pair.m1, out.order);
  const Matrix b = permute_symmetric(pair.m2, out.order);
  const double lo = std::min(a.minCoeff(), b.minCoeff());
  const double hi = std::max(a.maxCoeff(), b.maxCoeff());

  fs::create_directories(out_dir);
  auto emit = [&](const std::string& name, const std::string& text) {
    dump(out_dir / name, text);
    out.paths.push_back(out_dir / name);
  };
  emit("m1.csv", io::format_matrix_csv(a));
  emit("m2.csv", io::format_matrix_csv(b));
  emit("m1.pgm", format_pgm(a, lo, hi));
  emit("m2.pgm", format_pgm(b, lo, hi));
  return out;
}

}  // namespace lrmm::net
