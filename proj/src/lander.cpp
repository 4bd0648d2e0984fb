#include "fcs/lander.hpp"

#include <algorithm>
#include <cmath>

#include "fcs/io.hpp"

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double clip_unit(double v) { return std::clamp(v, -1.0, 1.0); }

void read_field(const json& doc, const char* key, double& out) {
  if (doc.contains(key)) out = doc.at(key).get<double>();
}

void read_field(const json& doc, const char* key, Index& out) {
  if (doc.contains(key)) out = doc.at(key).get<Index>();
}

void read_field(const json& doc, const char* key, std::uint64_t& out) {
  if (doc.contains(key)) out = doc.at(key).get<std::uint64_t>();
}

void reject_unknown_keys(const json& doc, const std::vector<std::string>& known,
                         const std::string& where) {
  for (const auto& item : doc.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ParseError(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

}  // namespace

Vec LanderState::to_vec() const {
  Vec v(8);
  v << x, y, vx, vy, theta, omega, leg1, leg2;
  return v;
}

LanderState LanderState::from_vec(const Vec& v) {
  if (v.size() != 8) {
    throw InvalidInputError("lander state: expected 8 dimensions, got " +
                            std::to_string(v.size()));
  }
  LanderState s;
  s.x = v(0);
  s.y = v(1);
  s.vx = v(2);
  s.vy = v(3);
  s.theta = v(4);
  s.omega = v(5);
  s.leg1 = v(6);
  s.leg2 = v(7);
  return s;
}

void EnvConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("env config: dt must be > 0");
  if (max_steps < 1) throw ValidationError("env config: max_steps must be >= 1");
  if (!(thrust_gain > 0.0)) throw ValidationError("env config: thrust_gain must be > 0");
  if (init_noise_scale < 0.0) {
    throw ValidationError("env config: init_noise_scale must be >= 0");
  }
  if (!(pad_half_width > 0.0)) throw ValidationError("env config: pad_half_width must be > 0");
  if (leg_spread < 0.0) throw ValidationError("env config: leg_spread must be >= 0");
  if (warmup_steps < 0) throw ValidationError("env config: warmup_steps must be >= 0");
  for (double v : {gravity, thrust_gain, side_gain, arm, dt, init_noise_scale, pad_half_width,
                   leg_spread, teacher.k1, teacher.k2, teacher.k3, teacher.k4, teacher.k5,
                   teacher.k6, teacher.hover_bias, teacher.y_target}) {
    if (!std::isfinite(v)) throw ValidationError("env config: non-finite value");
  }
}

ordered_json env_config_to_json(const EnvConfig& config) {
  ordered_json doc;
  doc["gravity"] = config.gravity;
  doc["thrust_gain"] = config.thrust_gain;
  doc["side_gain"] = config.side_gain;
  doc["arm"] = config.arm;
  doc["dt"] = config.dt;
  doc["max_steps"] = config.max_steps;
  doc["init_noise_scale"] = config.init_noise_scale;
  doc["seed"] = config.seed;
  doc["pad_half_width"] = config.pad_half_width;
  doc["leg_spread"] = config.leg_spread;
  doc["warmup_steps"] = config.warmup_steps;
  ordered_json teacher;
  teacher["k1"] = config.teacher.k1;
  teacher["k2"] = config.teacher.k2;
  teacher["k3"] = config.teacher.k3;
  teacher["k4"] = config.teacher.k4;
  teacher["k5"] = config.teacher.k5;
  teacher["k6"] = config.teacher.k6;
  teacher["hover_bias"] = config.teacher.hover_bias;
  teacher["y_target"] = config.teacher.y_target;
  doc["teacher"] = std::move(teacher);
  return doc;
}

EnvConfig env_config_from_json(const json& doc) {
  EnvConfig config;
  try {
    reject_unknown_keys(doc, {"gravity", "thrust_gain", "side_gain", "arm", "dt", "max_steps",
                              "init_noise_scale", "seed", "pad_half_width", "leg_spread",
                              "warmup_steps", "teacher"},
                        "env config");
    read_field(doc, "gravity", config.gravity);
    read_field(doc, "thrust_gain", config.thrust_gain);
    read_field(doc, "side_gain", config.side_gain);
    read_field(doc, "arm", config.arm);
    read_field(doc, "dt", config.dt);
    read_field(doc, "max_steps", config.max_steps);
    read_field(doc, "init_noise_scale", config.init_noise_scale);
    read_field(doc, "seed", config.seed);
    read_field(doc, "pad_half_width", config.pad_half_width);
    read_field(doc, "leg_spread", config.leg_spread);
    read_field(doc, "warmup_steps", config.warmup_steps);
    if (doc.contains("teacher")) {
      const json& t = doc.at("teacher");
      reject_unknown_keys(t, {"k1", "k2", "k3", "k4", "k5", "k6", "hover_bias", "y_target"},
                          "env config: teacher");
      read_field(t, "k1", config.teacher.k1);
      read_field(t, "k2", config.teacher.k2);
      read_field(t, "k3", config.teacher.k3);
      read_field(t, "k4", config.teacher.k4);
      read_field(t, "k5", config.teacher.k5);
      read_field(t, "k6", config.teacher.k6);
      read_field(t, "hover_bias", config.teacher.hover_bias);
      read_field(t, "y_target", config.teacher.y_target);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("env config: ") + e.what());
  }
  config.validate();
  return config;
}

EnvConfig load_env_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return env_config_from_json(doc);
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_env_config(const EnvConfig& config, const std::string& path) {
  write_file_atomic(path, env_config_to_json(config).dump(2) + "\n");
}

const std::vector<std::string>& lander_feature_names() {
  static const std::vector<std::string> names = {"x",     "y",     "vx",   "vy",
                                                 "theta", "omega", "leg1", "leg2"};
  return names;
}

const std::vector<std::string>& lander_action_names() {
  static const std::vector<std::string> names = {"main", "side"};
  return names;
}

LanderState env_step(const LanderState& state, const Vec& action, const EnvConfig& config) {
  if (action.size() != 2) {
    throw InvalidInputError("env_step: expected 2 action dimensions, got " +
                            std::to_string(action.size()));
  }
  const double thrust = clip_unit(action(0));
  const double side = clip_unit(action(1));

  LanderState next = state;
  next.vy = state.vy + (config.thrust_gain * thrust * std::cos(state.theta) - config.gravity) *
                           config.dt;
  next.vx = state.vx + (config.thrust_gain * thrust * std::sin(state.theta) +
                        config.side_gain * side) *
                           config.dt;
  next.omega = state.omega + (-config.side_gain * side * config.arm) * config.dt;
  next.x = state.x + next.vx * config.dt;
  next.y = state.y + next.vy * config.dt;
  next.theta = state.theta + next.omega * config.dt;

  // Legs sit at body-frame (-+leg_spread, 0); contact = below ground over the pad.
  const double c = std::cos(next.theta);
  const double s = std::sin(next.theta);
  const auto contact = [&](double offset) {
    const double wx = next.x + offset * c;
    const double wy = next.y + offset * s;
    return (wy <= 0.0 && std::fabs(wx) <= config.pad_half_width) ? 1.0 : 0.0;
  };
  next.leg1 = contact(-config.leg_spread);
  next.leg2 = contact(config.leg_spread);
  return next;
}

Vec scripted_teacher(const LanderState& state, const TeacherGains& g) {
  Vec action(2);
  action(0) = clip_unit(g.k1 * (g.y_target - state.y) - g.k2 * state.vy + g.hover_bias);
  action(1) =
      clip_unit(-g.k3 * state.x - g.k4 * state.vx - g.k5 * state.theta - g.k6 * state.omega);
  return action;
}

Vec scripted_teacher(const Vec& state, const TeacherGains& gains) {
  return scripted_teacher(LanderState::from_vec(state), gains);
}

bool landed(const LanderState& state) { return state.leg1 > 0.5 && state.leg2 > 0.5; }

Trajectory rollout(const Policy& policy, const EnvConfig& config,
                   const LanderState& initial_state) {
  config.validate();
  std::vector<Vec> states;
  std::vector<Vec> actions;
  LanderState s = initial_state;
  for (Index t = 0; t < config.max_steps; ++t) {
    const Vec sv = s.to_vec();
    const Vec a = policy(sv);
    if (a.size() != 2 || !a.allFinite()) {
      throw InvalidInputError("rollout: policy returned an invalid action at step " +
                              std::to_string(t));
    }
    states.push_back(sv);
    actions.push_back(a);
    if (landed(s)) break;
    s = env_step(s, a, config);
  }

  Trajectory trajectory;
  trajectory.states.resize(static_cast<Index>(states.size()), 8);
  trajectory.actions.resize(static_cast<Index>(actions.size()), 2);
  for (std::size_t i = 0; i < states.size(); ++i) {
    trajectory.states.row(static_cast<Index>(i)) = states[i].transpose();
    trajectory.actions.row(static_cast<Index>(i)) = actions[i].transpose();
  }
  return trajectory;
}

LanderState random_initial_state(Rng& rng, const EnvConfig& config) {
  const double n = config.init_noise_scale;
  LanderState s;
  s.x = n * rng.uniform(-1.8, 1.8);
  s.y = 7.0 + n * rng.uniform(-2.0, 2.0);
  s.vx = n * rng.uniform(-0.9, 0.9);
  s.vy = -0.5 + n * rng.uniform(-0.75, 0.75);
  s.theta = n * rng.uniform(-0.5, 0.5);
  s.omega = n * rng.uniform(-0.3, 0.3);
  for (Index t = 0; t < config.warmup_steps && !landed(s); ++t)
    s = env_step(s, scripted_teacher(s, config.teacher), config);
  return s;
}

Dataset generate_dataset(const EnvConfig& config, Index n_samples, std::uint64_t seed) {
  config.validate();
  if (n_samples < 1) throw InvalidInputError("generate_dataset: n_samples must be >= 1");

  Rng rng(seed);
  const Policy teacher = [&config](const Vec& s) { return scripted_teacher(s, config.teacher); };

  std::vector<Vec> states;
  std::vector<Vec> actions;
  std::vector<Index> episode_starts;
  while (static_cast<Index>(states.size()) < n_samples) {
    episode_starts.push_back(static_cast<Index>(states.size()));
    const Trajectory traj = rollout(teacher, config, random_initial_state(rng, config));
    for (Index t = 0; t < traj.length() && static_cast<Index>(states.size()) < n_samples; ++t) {
      states.push_back(traj.states.row(t).transpose());
      actions.push_back(traj.actions.row(t).transpose());
    }
  }

  Dataset data;
  data.states.resize(n_samples, 8);
  data.actions.resize(n_samples, 2);
  for (Index i = 0; i < n_samples; ++i) {
    data.states.row(i) = states[static_cast<std::size_t>(i)].transpose();
    data.actions.row(i) = actions[static_cast<std::size_t>(i)].transpose();
  }
  data.episode_starts = std::move(episode_starts);
  data.feature_names = lander_feature_names();
  data.action_names = lander_action_names();
  data.validate();
  return data;
}

}  // namespace fcs
