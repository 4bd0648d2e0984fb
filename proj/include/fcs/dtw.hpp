#pragma once

#include <string>

#include "fcs/types.hpp"

namespace fcs {

// One rollout: row t of `states` pairs with row t of `actions`. Action width
// may be zero (state-only traces); state width may not.
struct Trajectory {
  Mat states;   // T x d
  Mat actions;  // T x m (m >= 0)

  Index length() const { return states.rows(); }
  Index state_dim() const { return states.cols(); }
  Index action_dim() const { return actions.cols(); }
  void validate() const;
};

enum class DtwMode { Both, StateOnly, ActionOnly };

std::string to_string(DtwMode mode);
DtwMode dtw_mode_from_string(const std::string& name);

struct DtwOptions {
  DtwMode mode = DtwMode::Both;
  // Per-dimension z-scoring with mean/std pooled over both trajectories.
  bool z_normalize = false;
};

struct DtwResult {
  double cost = 0.0;             // accumulated cost of the optimal path
  Index path_length = 0;         // steps on that path (diagonal-preferred ties)
  double normalized_cost = 0.0;  // cost / path_length, for reference only
};

// Classic dynamic program, full warping window, steps {(1,0),(0,1),(1,1)},
// Euclidean local cost on the concatenated state-action vectors.
DtwResult dtw_alignment(const Trajectory& a, const Trajectory& b,
                        const DtwOptions& options = {});
double dtw_distance(const Trajectory& a, const Trajectory& b,
                    const DtwOptions& options = {});

// JSONL, one {t, state, action} object per step, t counted from 0.
std::string trajectory_to_jsonl(const Trajectory& trajectory);
Trajectory trajectory_from_jsonl(const std::string& text);
Trajectory load_trajectory(const std::string& path);
void save_trajectory(const Trajectory& trajectory, const std::string& path);

}  // namespace fcs
