#include "fcs/dtw.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "fcs/io.hpp"

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Mat select_features(const Trajectory& t, DtwMode mode) {
  switch (mode) {
    case DtwMode::StateOnly:
      return t.states;
    case DtwMode::ActionOnly:
      return t.actions;
    case DtwMode::Both: {
      Mat f(t.length(), t.state_dim() + t.action_dim());
      f.leftCols(t.state_dim()) = t.states;
      f.rightCols(t.action_dim()) = t.actions;
      return f;
    }
  }
  throw InvalidInputError("dtw: unknown mode");
}

void z_normalize_pooled(Mat& fa, Mat& fb) {
  const double n = static_cast<double>(fa.rows() + fb.rows());
  for (Index k = 0; k < fa.cols(); ++k) {
    const double mean = (fa.col(k).sum() + fb.col(k).sum()) / n;
    const double var = ((fa.col(k).array() - mean).square().sum() +
                        (fb.col(k).array() - mean).square().sum()) /
                       n;
    const double sd = std::sqrt(var);
    fa.col(k).array() -= mean;
    fb.col(k).array() -= mean;
    if (sd > 1e-12) {
      fa.col(k) /= sd;
      fb.col(k) /= sd;
    }
  }
}

}  // namespace

void Trajectory::validate() const {
  if (states.rows() < 1) throw ValidationError("trajectory: must have at least one step");
  if (actions.rows() != states.rows()) {
    throw ValidationError("trajectory: states and actions disagree on step count (" +
                          std::to_string(states.rows()) + " vs " +
                          std::to_string(actions.rows()) + ")");
  }
  if (states.cols() < 1) throw ValidationError("trajectory: state dimension must be >= 1");
  if (!states.allFinite() || !actions.allFinite()) {
    throw ValidationError("trajectory: entries must be finite");
  }
}

std::string to_string(DtwMode mode) {
  switch (mode) {
    case DtwMode::Both:
      return "both";
    case DtwMode::StateOnly:
      return "state";
    case DtwMode::ActionOnly:
      return "action";
  }
  return "both";
}

DtwMode dtw_mode_from_string(const std::string& name) {
  if (name == "both") return DtwMode::Both;
  if (name == "state") return DtwMode::StateOnly;
  if (name == "action") return DtwMode::ActionOnly;
  throw ParseError("dtw mode: expected one of both|state|action, got \"" + name + "\"");
}

DtwResult dtw_alignment(const Trajectory& a, const Trajectory& b, const DtwOptions& options) {
  a.validate();
  b.validate();
  if (a.state_dim() != b.state_dim() || a.action_dim() != b.action_dim()) {
    throw InvalidInputError("dtw: trajectory dimensions disagree (d=" +
                            std::to_string(a.state_dim()) + ", m=" +
                            std::to_string(a.action_dim()) + " vs d=" +
                            std::to_string(b.state_dim()) + ", m=" +
                            std::to_string(b.action_dim()) + ")");
  }
  Mat fa = select_features(a, options.mode);
  Mat fb = select_features(b, options.mode);
  if (fa.cols() == 0) {
    throw InvalidInputError("dtw: mode \"" + to_string(options.mode) +
                            "\" selects no feature dimensions");
  }
  if (options.z_normalize) z_normalize_pooled(fa, fb);

  const Index ta = fa.rows();
  const Index tb = fb.rows();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Rolling rows over j; lengths ride along so the reference normalization
  // reports the diagonal-preferred optimal path.
  std::vector<double> prev_cost(static_cast<std::size_t>(tb), kInf);
  std::vector<double> curr_cost(static_cast<std::size_t>(tb), kInf);
  std::vector<Index> prev_len(static_cast<std::size_t>(tb), 0);
  std::vector<Index> curr_len(static_cast<std::size_t>(tb), 0);

  for (Index i = 0; i < ta; ++i) {
    for (Index j = 0; j < tb; ++j) {
      const double local = (fa.row(i) - fb.row(j)).norm();
      double best;
      Index best_len;
      if (i == 0 && j == 0) {
        best = 0.0;
        best_len = 0;
      } else {
        const double diag = (i > 0 && j > 0) ? prev_cost[static_cast<std::size_t>(j - 1)] : kInf;
        const double up = i > 0 ? prev_cost[static_cast<std::size_t>(j)] : kInf;
        const double left = j > 0 ? curr_cost[static_cast<std::size_t>(j - 1)] : kInf;
        best = diag;
        best_len = (i > 0 && j > 0) ? prev_len[static_cast<std::size_t>(j - 1)] : 0;
        if (up < best) {
          best = up;
          best_len = prev_len[static_cast<std::size_t>(j)];
        }
        if (left < best) {
          best = left;
          best_len = curr_len[static_cast<std::size_t>(j - 1)];
        }
      }
      curr_cost[static_cast<std::size_t>(j)] = best + local;
      curr_len[static_cast<std::size_t>(j)] = best_len + 1;
    }
    std::swap(prev_cost, curr_cost);
    std::swap(prev_len, curr_len);
  }

  DtwResult result;
  result.cost = prev_cost[static_cast<std::size_t>(tb - 1)];
  result.path_length = prev_len[static_cast<std::size_t>(tb - 1)];
  result.normalized_cost = result.cost / static_cast<double>(result.path_length);
  return result;
}

double dtw_distance(const Trajectory& a, const Trajectory& b, const DtwOptions& options) {
  return dtw_alignment(a, b, options).cost;
}

std::string trajectory_to_jsonl(const Trajectory& trajectory) {
  trajectory.validate();
  std::ostringstream out;
  for (Index t = 0; t < trajectory.length(); ++t) {
    ordered_json line;
    line["t"] = t;
    line["state"] = std::vector<double>(trajectory.states.row(t).begin(),
                                        trajectory.states.row(t).end());
    line["action"] = std::vector<double>(trajectory.actions.row(t).begin(),
                                         trajectory.actions.row(t).end());
    out << line.dump() << "\n";
  }
  return out.str();
}

Trajectory trajectory_from_jsonl(const std::string& text) {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> actions;
  std::istringstream in(text);
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
      const Index t = doc.at("t").get<Index>();
      if (t != static_cast<Index>(states.size())) {
        throw ParseError("expected t = " + std::to_string(states.size()) + ", got " +
                         std::to_string(t));
      }
      states.push_back(doc.at("state").get<std::vector<double>>());
      actions.push_back(doc.at("action").get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw ParseError("trajectory jsonl:" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("trajectory jsonl:" + std::to_string(line_no) + ": " + e.what());
    }
    if (states.back().size() != states.front().size() ||
        actions.back().size() != actions.front().size()) {
      throw ParseError("trajectory jsonl:" + std::to_string(line_no) +
                       ": inconsistent vector widths");
    }
  }
  if (states.empty()) throw ParseError("trajectory jsonl: no steps");

  Trajectory trajectory;
  trajectory.states.resize(static_cast<Index>(states.size()),
                           static_cast<Index>(states.front().size()));
  trajectory.actions.resize(static_cast<Index>(actions.size()),
                            static_cast<Index>(actions.front().size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t k = 0; k < states[i].size(); ++k) {
      trajectory.states(static_cast<Index>(i), static_cast<Index>(k)) = states[i][k];
    }
    for (std::size_t k = 0; k < actions[i].size(); ++k) {
      trajectory.actions(static_cast<Index>(i), static_cast<Index>(k)) = actions[i][k];
    }
  }
  trajectory.validate();
  return trajectory;
}

Trajectory load_trajectory(const std::string& path) {
  try {
    return trajectory_from_jsonl(read_text_file(path));
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_trajectory(const Trajectory& trajectory, const std::string& path) {
  write_file_atomic(path, trajectory_to_jsonl(trajectory));
}

}  // namespace fcs
