#include "fcs/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fcs/io.hpp"

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Gains below this are treated as zero so rounding noise on constant targets
// never manufactures a split.
constexpr double kGainThreshold = 1e-12;

struct SplitCandidate {
  bool found = false;
  Index dimension = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double node_sse(const Dataset& data, const std::vector<Index>& members) {
  const Index m = data.action_dim();
  const double n = static_cast<double>(members.size());
  double sse = 0.0;
  for (Index j = 0; j < m; ++j) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (Index row : members) {
      const double y = data.actions(row, j);
      s1 += y;
      s2 += y * y;
    }
    sse += s2 - s1 * s1 / n;
  }
  return std::max(sse, 0.0);
}

// Exhaustive scan over midpoints of consecutive sorted unique values, one
// dimension at a time. First strictly-better candidate wins, so ties resolve
// to the lowest dimension, then the lowest threshold.
SplitCandidate best_split(const Dataset& data, const std::vector<Index>& members,
                          Index min_samples_leaf) {
  SplitCandidate best;
  const Index n = static_cast<Index>(members.size());
  if (n < 2 * min_samples_leaf) return best;
  const Index d = data.state_dim();
  const Index m = data.action_dim();
  const double parent_sse = node_sse(data, members);

  std::vector<Index> order(members.size());
  std::vector<double> values(members.size());
  Mat prefix1(n + 1, m);
  Mat prefix2(n + 1, m);

  for (Index k = 0; k < d; ++k) {
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = 0; i < n; ++i) {
      values[static_cast<std::size_t>(i)] = data.states(members[static_cast<std::size_t>(i)], k);
    }
    std::stable_sort(order.begin(), order.end(), [&values](Index a, Index b) {
      return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
    });

    prefix1.row(0).setZero();
    prefix2.row(0).setZero();
    for (Index i = 0; i < n; ++i) {
      const Index row = members[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      prefix1.row(i + 1) = prefix1.row(i) + data.actions.row(row);
      prefix2.row(i + 1) = prefix2.row(i) + data.actions.row(row).array().square().matrix();
    }

    for (Index p = 0; p + 1 < n; ++p) {
      const double lo = values[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])];
      const double hi = values[static_cast<std::size_t>(order[static_cast<std::size_t>(p + 1)])];
      if (!(lo < hi)) continue;
      const Index n_left = p + 1;
      const Index n_right = n - n_left;
      if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;

      double child_sse = 0.0;
      for (Index j = 0; j < m; ++j) {
        const double l1 = prefix1(n_left, j);
        const double l2 = prefix2(n_left, j);
        const double r1 = prefix1(n, j) - l1;
        const double r2 = prefix2(n, j) - l2;
        child_sse += (l2 - l1 * l1 / static_cast<double>(n_left)) +
                     (r2 - r1 * r1 / static_cast<double>(n_right));
      }
      const double gain = parent_sse - std::max(child_sse, 0.0);
      if (gain > best.gain) {
        best.found = true;
        best.dimension = k;
        best.threshold = 0.5 * (lo + hi);
        best.gain = gain;
      }
    }
  }
  if (best.found && !(best.gain > kGainThreshold)) best.found = false;
  return best;
}

Vec member_mean(const Dataset& data, const std::vector<Index>& members) {
  Vec mean = Vec::Zero(data.action_dim());
  for (Index row : members) mean += data.actions.row(row).transpose();
  return mean / static_cast<double>(members.size());
}

void preorder(const RegressionTree& tree, Index node, ordered_json& out) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) {
    ordered_json leaf;
    leaf["type"] = "leaf";
    leaf["value"] = std::vector<double>(n.value.begin(), n.value.end());
    leaf["n_samples"] = n.n_samples;
    out.push_back(std::move(leaf));
    return;
  }
  ordered_json split;
  split["type"] = "split";
  split["dimension"] = n.split_dimension;
  split["threshold"] = n.threshold;
  out.push_back(std::move(split));
  preorder(tree, n.left, out);
  preorder(tree, n.right, out);
}

Index build_from_preorder(const json& nodes, std::size_t& pos, RegressionTree& tree) {
  if (pos >= nodes.size()) {
    throw ParseError("tree: pre-order node list ended early");
  }
  const json& doc = nodes[pos];
  ++pos;
  const std::string type = doc.at("type").get<std::string>();
  const Index self = static_cast<Index>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (type == "leaf") {
    const std::vector<double> value = doc.at("value").get<std::vector<double>>();
    tree.nodes[static_cast<std::size_t>(self)].value =
        Eigen::Map<const Vec>(value.data(), static_cast<Index>(value.size()));
    tree.nodes[static_cast<std::size_t>(self)].n_samples = doc.at("n_samples").get<Index>();
    return self;
  }
  if (type != "split") {
    throw ParseError("tree: node type must be \"leaf\" or \"split\", got \"" + type + "\"");
  }
  const Index dimension = doc.at("dimension").get<Index>();
  const double threshold = doc.at("threshold").get<double>();
  const Index left = build_from_preorder(nodes, pos, tree);
  const Index right = build_from_preorder(nodes, pos, tree);
  TreeNode& node = tree.nodes[static_cast<std::size_t>(self)];
  node.split_dimension = dimension;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return self;
}

}  // namespace

Index RegressionTree::n_leaves() const {
  Index count = 0;
  for (const TreeNode& node : nodes) {
    if (node.is_leaf()) ++count;
  }
  return count;
}

void RegressionTree::validate() const {
  if (d < 1 || m < 1) throw ValidationError("tree: d and m must be >= 1");
  if (nodes.empty()) throw ValidationError("tree: must have at least one node");
  const Index size = static_cast<Index>(nodes.size());
  for (Index i = 0; i < size; ++i) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    if (node.is_leaf()) {
      if (node.right >= 0) throw ValidationError("tree: node " + std::to_string(i) +
                                                 ": leaf with a right child");
      if (node.value.size() != m) {
        throw ValidationError("tree: node " + std::to_string(i) + ": leaf value has length " +
                              std::to_string(node.value.size()) + ", expected " +
                              std::to_string(m));
      }
      if (!node.value.allFinite()) {
        throw ValidationError("tree: node " + std::to_string(i) + ": non-finite leaf value");
      }
    } else {
      if (node.split_dimension < 0 || node.split_dimension >= d) {
        throw ValidationError("tree: node " + std::to_string(i) + ": split dimension " +
                              std::to_string(node.split_dimension) + " out of range");
      }
      if (!std::isfinite(node.threshold)) {
        throw ValidationError("tree: node " + std::to_string(i) + ": non-finite threshold");
      }
      if (node.left <= i || node.left >= size || node.right <= i || node.right >= size) {
        throw ValidationError("tree: node " + std::to_string(i) + ": child index out of order");
      }
    }
  }
}

RegressionTree tree_fit(const Dataset& data, Index max_leaves, Index min_samples_leaf) {
  data.validate();
  if (max_leaves < 2) throw InvalidInputError("tree_fit: max_leaves must be >= 2");
  if (min_samples_leaf < 1) throw InvalidInputError("tree_fit: min_samples_leaf must be >= 1");

  RegressionTree tree;
  tree.d = data.state_dim();
  tree.m = data.action_dim();

  std::vector<std::vector<Index>> members;
  std::vector<SplitCandidate> candidates;

  std::vector<Index> all(static_cast<std::size_t>(data.size()));
  std::iota(all.begin(), all.end(), Index{0});
  tree.nodes.emplace_back();
  tree.nodes[0].value = member_mean(data, all);
  tree.nodes[0].n_samples = data.size();
  candidates.push_back(best_split(data, all, min_samples_leaf));
  members.push_back(std::move(all));

  Index leaves = 1;
  while (leaves < max_leaves) {
    // Deterministic best-first order: max gain, then lowest node index.
    Index pick = -1;
    for (Index i = 0; i < static_cast<Index>(tree.nodes.size()); ++i) {
      const SplitCandidate& c = candidates[static_cast<std::size_t>(i)];
      if (!c.found) continue;
      if (pick < 0 || c.gain > candidates[static_cast<std::size_t>(pick)].gain) pick = i;
    }
    if (pick < 0) break;

    const SplitCandidate chosen = candidates[static_cast<std::size_t>(pick)];
    std::vector<Index> left_members;
    std::vector<Index> right_members;
    for (Index row : members[static_cast<std::size_t>(pick)]) {
      if (data.states(row, chosen.dimension) <= chosen.threshold) {
        left_members.push_back(row);
      } else {
        right_members.push_back(row);
      }
    }

    const Index left = static_cast<Index>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(left)].value = member_mean(data, left_members);
    tree.nodes[static_cast<std::size_t>(left)].n_samples = static_cast<Index>(left_members.size());
    candidates.push_back(best_split(data, left_members, min_samples_leaf));
    members.push_back(std::move(left_members));

    const Index right = static_cast<Index>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(right)].value = member_mean(data, right_members);
    tree.nodes[static_cast<std::size_t>(right)].n_samples =
        static_cast<Index>(right_members.size());
    candidates.push_back(best_split(data, right_members, min_samples_leaf));
    members.push_back(std::move(right_members));

    TreeNode& parent = tree.nodes[static_cast<std::size_t>(pick)];
    parent.split_dimension = chosen.dimension;
    parent.threshold = chosen.threshold;
    parent.left = left;
    parent.right = right;
    parent.value.resize(0);
    candidates[static_cast<std::size_t>(pick)].found = false;
    members[static_cast<std::size_t>(pick)].clear();
    ++leaves;
  }

  tree.validate();
  return tree;
}

Vec tree_predict(const RegressionTree& tree, const Vec& state) {
  if (state.size() != tree.d) {
    throw InvalidInputError("tree_predict: state has length " + std::to_string(state.size()) +
                            ", expected " + std::to_string(tree.d));
  }
  Index node = 0;
  while (!tree.nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    node = state(n.split_dimension) <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].value;
}

ordered_json tree_to_json(const RegressionTree& tree) {
  tree.validate();
  ordered_json doc;
  doc["version"] = 1;
  doc["d"] = tree.d;
  doc["m"] = tree.m;
  doc["nodes"] = ordered_json::array();
  preorder(tree, 0, doc["nodes"]);
  return doc;
}

RegressionTree tree_from_json(const json& doc) {
  RegressionTree tree;
  try {
    const int version = doc.at("version").get<int>();
    if (version != 1) {
      throw ParseError("tree: unsupported version " + std::to_string(version));
    }
    tree.d = doc.at("d").get<Index>();
    tree.m = doc.at("m").get<Index>();
    const json& nodes = doc.at("nodes");
    if (!nodes.is_array()) throw ParseError("tree: \"nodes\" must be an array");
    std::size_t pos = 0;
    build_from_preorder(nodes, pos, tree);
    if (pos != nodes.size()) {
      throw ParseError("tree: trailing nodes after the pre-order traversal");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("tree: ") + e.what());
  }
  tree.validate();
  return tree;
}

std::string serialize_tree(const RegressionTree& tree) { return tree_to_json(tree).dump(2) + "\n"; }

RegressionTree deserialize_tree(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("tree: ") + e.what());
  }
  return tree_from_json(doc);
}

RegressionTree load_tree(const std::string& path) {
  try {
    return deserialize_tree(read_text_file(path));
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_tree(const RegressionTree& tree, const std::string& path) {
  write_file_atomic(path, serialize_tree(tree));
}

}  // namespace fcs
