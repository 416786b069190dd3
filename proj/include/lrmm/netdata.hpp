#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lrmm/estimator.hpp"
#include "lrmm/linalg.hpp"
#include "lrmm/model.hpp"

namespace lrmm::net {

/// n binary d x d adjacency layers.
struct LayerStack {
  std::vector<Matrix> layers;
  int node_count = 0;
  std::vector<std::string> layer_ids;
};

struct CenterPair {
  Matrix m1;  // mean + m_hat
  Matrix m2;  // mean - m_hat
  Matrix mean;
  Matrix m_hat;
};

struct CenteredStack {
  Matrix mean;
  SampleSet centered;
};

inline constexpr int kDefaultRank = 10;

/// Edge list with whitespace-separated `layer_id src dst` rows, 0-indexed
/// nodes. Blank lines and lines starting with '#' are skipped. Layers appear in
/// first-seen order.
LayerStack load_layers(const std::filesystem::path& path, bool undirected,
                       std::optional<int> node_count = std::nullopt);
LayerStack parse_layers(const std::string& text, bool undirected,
                        std::optional<int> node_count = std::nullopt);

/// Writes every nonzero entry of every layer as a `layer_id\tsrc\tdst` row.
std::string format_layers(const LayerStack& stack);

/// X_i - mean(X); needs at least two layers.
CenteredStack center_stack(const LayerStack& stack);

/// Spectral aggregation (no split) on the centered layers, recombined around
/// the layer mean. Needs at least four layers.
CenterPair estimate_pair(const LayerStack& stack, int r = kDefaultRank,
                         FloorDimRule rule = FloorDimRule::max_dim);

/// node -> community from a `node,community` CSV (header optional).
std::vector<std::string> load_labels(const std::filesystem::path& path, int node_count);
std::vector<std::string> parse_labels(const std::string& text, int node_count);

/// Groups nodes by community (numeric order when every label is an integer,
/// lexicographic otherwise), stable by node index inside a community.
std::vector<int> community_order(const std::vector<std::string>& labels);

Matrix permute_symmetric(const Matrix& m, const std::vector<int>& order);

/// P2 grayscale image, pixel = round(255 (x - lo) / (hi - lo)); lo == hi maps
/// every pixel to 0.
std::string format_pgm(const Matrix& m, double lo, double hi);

struct ExportedFiles {
  std::vector<std::filesystem::path> paths;
  std::vector<int> order;
};

/// Writes m1.csv, m2.csv, m1.pgm, m2.pgm under out_dir after reordering rows
/// and columns by community. Both images share one min/max. Without a labels
/// file the identity order is used.
ExportedFiles reorder_and_export(const CenterPair& pair,
                                 const std::optional<std::filesystem::path>& labels_path,
                                 const std::filesystem::path& out_dir);

}  // namespace lrmm::net
