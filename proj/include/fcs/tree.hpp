#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fcs/dataset.hpp"
#include "fcs/types.hpp"

namespace fcs {

// Nodes live in one vector; children are indices. Leaves have child = -1 and
// carry the mean action of their training members.
struct TreeNode {
  Index split_dimension = -1;
  double threshold = 0.0;
  Index left = -1;
  Index right = -1;
  Vec value;  // leaves only
  Index n_samples = 0;

  bool is_leaf() const { return left < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  Index d = 0;
  Index m = 0;

  Index n_leaves() const;
  void validate() const;
};

// Greedy best-first CART: always split the leaf with the largest total
// variance reduction, summed over action dimensions, until max_leaves or no
// strictly-improving split remains.
RegressionTree tree_fit(const Dataset& data, Index max_leaves = 16,
                        Index min_samples_leaf = 5);

Vec tree_predict(const RegressionTree& tree, const Vec& state);

nlohmann::ordered_json tree_to_json(const RegressionTree& tree);
RegressionTree tree_from_json(const nlohmann::json& doc);
std::string serialize_tree(const RegressionTree& tree);
RegressionTree deserialize_tree(const std::string& text);
RegressionTree load_tree(const std::string& path);
void save_tree(const RegressionTree& tree, const std::string& path);

}  // namespace fcs
