#pragma once

#include "fcs/types.hpp"

#include <string>
#include <vector>

namespace fcs {

// Ordered collection of logged (state, action) pairs. episode_starts marks
// trajectory boundaries when known; empty means unknown/one block.
struct Dataset {
  Mat states;   // n x d
  Mat actions;  // n x m
  std::vector<Index> episode_starts;  // sorted, first entry 0 when non-empty
  std::vector<std::string> feature_names;  // optional, size d or empty
  std::vector<std::string> action_names;   // optional, size m or empty

  Index size() const { return states.rows(); }
  Index state_dim() const { return states.cols(); }
  Index action_dim() const { return actions.cols(); }

  void validate() const;
};

Dataset subset(const Dataset& data, const std::vector<Index>& rows);

// CSV with header s0..s{d-1},a0..a{m-1}[,episode]; the episode column holds a
// non-decreasing episode id per row.
std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text);

// JSONL of {"state":[..],"action":[..],"episode":int}; episode optional.
std::string dataset_to_jsonl(const Dataset& data);
Dataset dataset_from_jsonl(const std::string& text);

// Dispatches on extension: .csv or .jsonl.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

}  // namespace fcs
