#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "fcs/dataset.hpp"
#include "fcs/dtw.hpp"
#include "fcs/rng.hpp"
#include "fcs/types.hpp"

namespace fcs {

// 2-D lander with the 8-dim state layout of the usual continuous lander task:
// position, velocities, tilt, angular velocity, leg contact flags.
struct LanderState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  double leg1 = 0.0;
  double leg2 = 0.0;

  Vec to_vec() const;
  static LanderState from_vec(const Vec& v);
};

// PD law: main = clip(k1 (y_target - y) - k2 vy + hover_bias),
//         side = clip(-k3 x - k4 vx - k5 theta - k6 omega).
//
// The lateral loop is non-minimum phase: side thrust both pushes the hull and
// torques it the opposite way, so correcting a rightward drift starts with a
// brief rightward push that tilts the nozzle into the drift.  With the signs
// flipped to the "obvious" ones the loop has no stable gain region at all.
//
// Both loops are deliberately lightly damped.  The default gains put the
// linearised vertical poles at -0.55 +- 0.71i (zeta ~ 0.6) and the lateral
// (x, vx, theta, omega) poles at -0.33 +- 1.07i, -0.88, -1.10, so descents
// oscillate gently all the way down instead of settling onto a constant-action
// glide.  That keeps the logged actions varying with the state everywhere in
// the data; a critically damped tracker converges to "thrust = hover_bias,
// side = 0" after a few seconds and leaves nothing state-dependent to distill.
// hover_bias equals gravity / thrust_gain, so the bias term alone cancels
// gravity at zero tilt and the PD terms only shape the transient.
struct TeacherGains {
  double k1 = 0.16;
  double k2 = 0.22;
  double k3 = -0.24;
  double k4 = -0.62;
  double k5 = -2.24;
  double k6 = -2.56;
  double hover_bias = 0.5;
  double y_target = -0.5;
};

struct EnvConfig {
  double gravity = 2.5;
  double thrust_gain = 5.0;
  double side_gain = 4.0;
  double arm = 0.5;         // torque moment of the side thruster
  double dt = 0.05;
  Index max_steps = 1000;
  double init_noise_scale = 1.0;
  std::uint64_t seed = 42;
  double pad_half_width = 2.5;
  double leg_spread = 0.4;  // lateral leg offset from the hull center
  Index warmup_steps = 6;   // teacher steps folded into each initial draw
  TeacherGains teacher;

  void validate() const;
};

nlohmann::ordered_json env_config_to_json(const EnvConfig& config);
// Partial documents are fine (absent keys keep defaults); unknown keys error.
EnvConfig env_config_from_json(const nlohmann::json& doc);
EnvConfig load_env_config(const std::string& path);
void save_env_config(const EnvConfig& config, const std::string& path);

const std::vector<std::string>& lander_feature_names();
const std::vector<std::string>& lander_action_names();

// Semi-implicit Euler; actions clipped to [-1, 1] before use.
LanderState env_step(const LanderState& state, const Vec& action, const EnvConfig& config);

Vec scripted_teacher(const LanderState& state, const TeacherGains& gains);
Vec scripted_teacher(const Vec& state, const TeacherGains& gains);

bool landed(const LanderState& state);

using Policy = std::function<Vec(const Vec&)>;

// Trajectory of visited (state, action) pairs, terminal landed state included;
// stops on both-leg contact or after max_steps entries.
Trajectory rollout(const Policy& policy, const EnvConfig& config,
                   const LanderState& initial_state);

// Draws from a box around the nominal drop point (deviations scaled by
// init_noise_scale), then advances warmup_steps teacher steps so episodes
// begin a moment after control handoff rather than at an arbitrary pose.
LanderState random_initial_state(Rng& rng, const EnvConfig& config);

// Teacher rollouts from randomized initial states until n_samples pairs are
// collected (the tail episode is truncated).
Dataset generate_dataset(const EnvConfig& config, Index n_samples, std::uint64_t seed);

}  // namespace fcs
