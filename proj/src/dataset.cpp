#include "fcs/dataset.hpp"

#include "fcs/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Episode id of each row, reconstructed from episode_starts.
std::vector<Index> episode_ids(const Dataset& data) {
  std::vector<Index> ids(static_cast<std::size_t>(data.size()), 0);
  Index episode = -1;
  std::size_t next_start = 0;
  for (Index i = 0; i < data.size(); ++i) {
    if (next_start < data.episode_starts.size() && data.episode_starts[next_start] == i) {
      ++episode;
      ++next_start;
    }
    ids[static_cast<std::size_t>(i)] = std::max<Index>(episode, 0);
  }
  return ids;
}

}  // namespace

void Dataset::validate() const {
  if (states.rows() != actions.rows()) {
    throw ValidationError("dataset: states and actions must have equal counts");
  }
  if (states.rows() < 1) throw ValidationError("dataset: empty");
  if (states.cols() < 1) throw ValidationError("dataset: state dimension must be >= 1");
  if (actions.cols() < 1) throw ValidationError("dataset: action dimension must be >= 1");
  if (!states.allFinite()) throw ValidationError("dataset: non-finite state entry");
  if (!actions.allFinite()) throw ValidationError("dataset: non-finite action entry");
  if (!episode_starts.empty()) {
    if (episode_starts.front() != 0) {
      throw ValidationError("dataset: episode_starts must begin at index 0");
    }
    for (std::size_t i = 0; i + 1 < episode_starts.size(); ++i) {
      if (episode_starts[i] >= episode_starts[i + 1]) {
        throw ValidationError("dataset: episode_starts must be strictly increasing");
      }
    }
    if (episode_starts.back() >= size()) {
      throw ValidationError("dataset: episode start beyond last row");
    }
  }
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != states.cols()) {
    throw ValidationError("dataset: feature_names length must equal state dimension");
  }
  if (!action_names.empty() && static_cast<Index>(action_names.size()) != actions.cols()) {
    throw ValidationError("dataset: action_names length must equal action dimension");
  }
}

Dataset subset(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.states.resize(static_cast<Index>(rows.size()), data.state_dim());
  out.actions.resize(static_cast<Index>(rows.size()), data.action_dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= data.size()) {
      throw InvalidInputError("subset: row index out of range");
    }
    out.states.row(static_cast<Index>(i)) = data.states.row(rows[i]);
    out.actions.row(static_cast<Index>(i)) = data.actions.row(rows[i]);
  }
  out.feature_names = data.feature_names;
  out.action_names = data.action_names;
  return out;
}

std::string dataset_to_csv(const Dataset& data) {
  const Index d = data.state_dim();
  const Index m = data.action_dim();
  const bool episodes = !data.episode_starts.empty();
  std::ostringstream out;
  for (Index k = 0; k < d; ++k) out << "s" << k << ",";
  for (Index j = 0; j < m; ++j) {
    out << "a" << j;
    if (j + 1 < m || episodes) out << ",";
  }
  if (episodes) out << "episode";
  out << "\n";

  const std::vector<Index> ids = episodes ? episode_ids(data) : std::vector<Index>();
  for (Index i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < d; ++k) out << format_double(data.states(i, k)) << ",";
    for (Index j = 0; j < m; ++j) {
      out << format_double(data.actions(i, j));
      if (j + 1 < m || episodes) out << ",";
    }
    if (episodes) out << ids[static_cast<std::size_t>(i)];
    out << "\n";
  }
  return out.str();
}

Dataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv:1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split(line, ',');
  Index d = 0;
  Index m = 0;
  bool episodes = false;
  std::size_t pos = 0;
  while (pos < header.size() && header[pos] == "s" + std::to_string(d)) {
    ++d;
    ++pos;
  }
  while (pos < header.size() && header[pos] == "a" + std::to_string(m)) {
    ++m;
    ++pos;
  }
  if (pos < header.size() && header[pos] == "episode") {
    episodes = true;
    ++pos;
  }
  if (d < 1 || m < 1 || pos != header.size()) {
    throw ParseError("csv:1: header must be s0..s{d-1},a0..a{m-1}[,episode]");
  }

  std::vector<double> values;
  std::vector<Index> starts;
  Index n = 0;
  Index prev_episode = -1;
  int line_no = 1;
  const std::size_t expect_cols = static_cast<std::size_t>(d + m) + (episodes ? 1 : 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    const std::string at = "csv:" + std::to_string(line_no);
    if (cells.size() != expect_cols) {
      throw ParseError(at + ": expected " + std::to_string(expect_cols) + " columns, got " +
                       std::to_string(cells.size()));
    }
    for (Index c = 0; c < d + m; ++c) {
      const double v = parse_double(cells[static_cast<std::size_t>(c)],
                                    at + " column " + header[static_cast<std::size_t>(c)]);
      if (!std::isfinite(v)) {
        throw ParseError(at + ": non-finite value in column " + header[static_cast<std::size_t>(c)]);
      }
      values.push_back(v);
    }
    if (episodes) {
      const long long id = parse_int(cells.back(), at + " column episode");
      if (id < 0) throw ParseError(at + ": episode id must be >= 0");
      if (id < prev_episode) throw ParseError(at + ": episode ids must be non-decreasing");
      if (id != prev_episode) starts.push_back(n);
      prev_episode = static_cast<Index>(id);
    }
    ++n;
  }
  if (n == 0) throw ParseError("csv: no data rows");

  Dataset data;
  data.states.resize(n, d);
  data.actions.resize(n, m);
  std::size_t v = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) data.states(i, k) = values[v++];
    for (Index j = 0; j < m; ++j) data.actions(i, j) = values[v++];
  }
  data.episode_starts = std::move(starts);
  data.validate();
  return data;
}

std::string dataset_to_jsonl(const Dataset& data) {
  const bool episodes = !data.episode_starts.empty();
  const std::vector<Index> ids = episodes ? episode_ids(data) : std::vector<Index>();
  std::ostringstream out;
  for (Index i = 0; i < data.size(); ++i) {
    ordered_json row;
    json state = json::array();
    for (Index k = 0; k < data.state_dim(); ++k) state.push_back(data.states(i, k));
    json action = json::array();
    for (Index j = 0; j < data.action_dim(); ++j) action.push_back(data.actions(i, j));
    row["state"] = state;
    row["action"] = action;
    if (episodes) row["episode"] = ids[static_cast<std::size_t>(i)];
    out << row.dump() << "\n";
  }
  return out.str();
}

Dataset dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> states;
  std::vector<double> actions;
  std::vector<Index> starts;
  Index d = -1;
  Index m = -1;
  Index n = 0;
  Index prev_episode = -1;
  bool any_episode = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string at = "jsonl:" + std::to_string(line_no);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(at + ": invalid JSON: " + e.what());
    }
    if (!row.is_object() || !row.contains("state") || !row.contains("action")) {
      throw ParseError(at + ": expected object with state and action arrays");
    }
    const json& state = row.at("state");
    const json& action = row.at("action");
    if (!state.is_array() || !action.is_array()) {
      throw ParseError(at + ": state and action must be arrays");
    }
    if (d < 0) d = static_cast<Index>(state.size());
    if (m < 0) m = static_cast<Index>(action.size());
    if (static_cast<Index>(state.size()) != d || static_cast<Index>(action.size()) != m) {
      throw ParseError(at + ": inconsistent state/action dimensions");
    }
    for (const auto& e : state) {
      if (!e.is_number()) throw ParseError(at + ": state entries must be numbers");
      const double v = e.get<double>();
      if (!std::isfinite(v)) throw ParseError(at + ": non-finite state value");
      states.push_back(v);
    }
    for (const auto& e : action) {
      if (!e.is_number()) throw ParseError(at + ": action entries must be numbers");
      const double v = e.get<double>();
      if (!std::isfinite(v)) throw ParseError(at + ": non-finite action value");
      actions.push_back(v);
    }
    if (row.contains("episode")) {
      any_episode = true;
      const json& ep = row.at("episode");
      if (!ep.is_number_integer()) throw ParseError(at + ": episode must be an integer");
      const Index id = ep.get<Index>();
      if (id < 0) throw ParseError(at + ": episode id must be >= 0");
      if (id < prev_episode) throw ParseError(at + ": episode ids must be non-decreasing");
      if (id != prev_episode) starts.push_back(n);
      prev_episode = id;
    } else if (any_episode) {
      throw ParseError(at + ": episode field present on some rows but not all");
    }
    ++n;
  }
  if (n == 0) throw ParseError("jsonl: no data rows");

  Dataset data;
  data.states.resize(n, d);
  data.actions.resize(n, m);
  std::size_t si = 0;
  std::size_t ai = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) data.states(i, k) = states[si++];
    for (Index j = 0; j < m; ++j) data.actions(i, j) = actions[ai++];
  }
  data.episode_starts = std::move(starts);
  data.validate();
  return data;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    if (ends_with(path, ".jsonl")) return dataset_from_jsonl(text);
    return dataset_from_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_dataset(const Dataset& data, const std::string& path) {
  if (ends_with(path, ".jsonl")) {
    write_file_atomic(path, dataset_to_jsonl(data));
  } else {
    write_file_atomic(path, dataset_to_csv(data));
  }
}

}  // namespace fcs
