#include "fcs/metrics.hpp"

#include "fcs/io.hpp"

#include <cmath>
#include <sstream>

namespace fcs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Regularized incomplete beta function I_x(a, b) by continued fraction
// (modified Lentz). Relative accuracy ~1e-14 for the arguments used here.
double incomplete_beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incomplete_beta_cf(a, b, x) / a;
  }
  return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double degrees_of_freedom) {
  if (!(degrees_of_freedom > 0.0)) {
    throw InvalidInputError("student_t_two_sided_p: degrees of freedom must be > 0");
  }
  const double x = degrees_of_freedom / (degrees_of_freedom + t * t);
  return regularized_incomplete_beta(degrees_of_freedom / 2.0, 0.5, x);
}

double frad(const Vec& activations) {
  for (Index i = 0; i < activations.size(); ++i) {
    if (!std::isfinite(activations(i)) || activations(i) < 0.0) {
      throw InvalidInputError("frad: activations must be finite and >= 0");
    }
  }
  const double total = sorted_sum(activations);
  if (total <= 0.0) return 1.0;  // sentinel: the fallback path applies
  std::vector<double> shares_sq(static_cast<std::size_t>(activations.size()));
  for (Index i = 0; i < activations.size(); ++i) {
    const double share = activations(i) / total;
    shares_sq[static_cast<std::size_t>(i)] = share * share;
  }
  return sorted_sum(std::move(shares_sq));
}

double mean_frad(const FcsModel& model, const Mat& states) {
  if (states.rows() < 1) throw InvalidInputError("mean_frad: empty state set");
  double acc = 0.0;
  Index used = 0;
  for (Index i = 0; i < states.rows(); ++i) {
    const InferResult r = infer(model, states.row(i).transpose());
    if (r.used_fallback) continue;
    acc += frad(r.activations);
    ++used;
  }
  if (used == 0) return 1.0;
  return acc / static_cast<double>(used);
}

double fsc(const FcsModel& model, const Mat& states) {
  if (states.rows() < 1) throw InvalidInputError("fsc: empty state set");
  if (states.cols() != model.d) throw InvalidInputError("fsc: state dimension mismatch");
  double acc = 0.0;
  for (Index i = 0; i < states.rows(); ++i) {
    double per_state = 0.0;
    for (Index k = 0; k < model.d; ++k) {
      double max_mem = 0.0;
      for (const FuzzyRule& rule : model.rules) {
        max_mem = std::max(max_mem,
                           membership(model.family, states(i, k), rule.centroid(k), rule.spread(k)));
      }
      per_state += max_mem;
    }
    acc += per_state / static_cast<double>(model.d);
  }
  return acc / static_cast<double>(states.rows());
}

double asg(const FcsModel& model) {
  const Index n = model.n_rules();
  const Index m = model.m;
  double acc = 0.0;
  for (Index j = 0; j < m; ++j) {
    std::vector<double> biases(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      biases[static_cast<std::size_t>(i)] = model.rules[static_cast<std::size_t>(i)].biases(j);
    }
    const double mean = sorted_sum(biases) / static_cast<double>(n);
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const double dev = biases[static_cast<std::size_t>(i)] - mean;
      sq[static_cast<std::size_t>(i)] = dev * dev;
    }
    acc += sorted_sum(std::move(sq)) / static_cast<double>(n);
  }
  return acc / static_cast<double>(m);
}

double fidelity(const Predictor& predict, const Dataset& data, double tau) {
  if (!(tau > 0.0)) throw InvalidInputError("fidelity: tau must be > 0");
  data.validate();
  Index matches = 0;
  for (Index i = 0; i < data.size(); ++i) {
    const Vec pred = predict(data.states.row(i).transpose());
    const double err = (pred - data.actions.row(i).transpose()).cwiseAbs().maxCoeff();
    if (err <= tau) ++matches;
  }
  return 100.0 * static_cast<double>(matches) / static_cast<double>(data.size());
}

double fidelity(const FcsModel& model, const Dataset& data, double tau) {
  return fidelity([&model](const Vec& s) { return infer(model, s).action; }, data, tau);
}

double mse(const Predictor& predict, const Dataset& data) {
  data.validate();
  double acc = 0.0;
  for (Index i = 0; i < data.size(); ++i) {
    const Vec pred = predict(data.states.row(i).transpose());
    acc += (pred - data.actions.row(i).transpose()).squaredNorm();
  }
  return acc / static_cast<double>(data.size() * data.action_dim());
}

double mse(const FcsModel& model, const Dataset& data) {
  return mse([&model](const Vec& s) { return infer(model, s).action; }, data);
}

MetricsReport evaluate(const FcsModel& model, const Dataset& data, double tau) {
  if (!(tau > 0.0)) throw InvalidInputError("evaluate: tau must be > 0");
  data.validate();
  if (data.state_dim() != model.d || data.action_dim() != model.m) {
    throw InvalidInputError("evaluate: model dimensions (d=" + std::to_string(model.d) +
                            ", m=" + std::to_string(model.m) + ") do not match dataset (d=" +
                            std::to_string(data.state_dim()) + ", m=" +
                            std::to_string(data.action_dim()) + ")");
  }

  MetricsReport report;
  report.tau = tau;
  report.n_samples = data.size();

  double sq_acc = 0.0;
  double frad_acc = 0.0;
  Index frad_used = 0;
  Index matches = 0;
  for (Index i = 0; i < data.size(); ++i) {
    const InferResult r = infer(model, data.states.row(i).transpose());
    const Vec err = r.action - data.actions.row(i).transpose();
    sq_acc += err.squaredNorm();
    if (err.cwiseAbs().maxCoeff() <= tau) ++matches;
    if (r.used_fallback) {
      ++report.zero_activation_count;
    } else {
      frad_acc += frad(r.activations);
      ++frad_used;
    }
  }
  report.mse = sq_acc / static_cast<double>(data.size() * data.action_dim());
  report.fidelity_percent = 100.0 * static_cast<double>(matches) / static_cast<double>(data.size());
  report.mean_frad = frad_used > 0 ? frad_acc / static_cast<double>(frad_used) : 1.0;
  report.fsc = fsc(model, data.states);
  report.asg = asg(model);
  return report;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidInputError("paired_t_test: unequal sample lengths");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidInputError("paired_t_test: need at least 2 pairs");

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw InvalidInputError("paired_t_test: non-finite input");
    }
    diff[i] = a[i] - b[i];
  }
  const double mean = sorted_sum(diff) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (diff[i] - mean) * (diff[i] - mean);
  const double ss = sorted_sum(std::move(sq));
  if (ss <= 0.0) {
    throw InvalidInputError("paired_t_test: zero variance of differences");
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult result;
  result.degrees_of_freedom = static_cast<double>(n - 1);
  result.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.p_value = student_t_two_sided_p(result.t_statistic, result.degrees_of_freedom);
  return result;
}

ordered_json MetricsReport::to_json() const {
  ordered_json doc;
  doc["fidelity_percent"] = fidelity_percent;
  doc["mse"] = mse;
  doc["mean_frad"] = mean_frad;
  doc["fsc"] = fsc;
  doc["asg"] = asg;
  doc["n_samples"] = n_samples;
  doc["tau"] = tau;
  doc["zero_activation_count"] = zero_activation_count;
  return doc;
}

MetricsReport MetricsReport::from_json(const json& doc) {
  MetricsReport r;
  try {
    r.fidelity_percent = doc.at("fidelity_percent").get<double>();
    r.mse = doc.at("mse").get<double>();
    r.mean_frad = doc.at("mean_frad").get<double>();
    r.fsc = doc.at("fsc").get<double>();
    r.asg = doc.at("asg").get<double>();
    r.n_samples = doc.at("n_samples").get<Index>();
    r.tau = doc.at("tau").get<double>();
    r.zero_activation_count = doc.at("zero_activation_count").get<Index>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("metrics report: ") + e.what());
  }
  return r;
}

std::string MetricsReport::csv_header() {
  return "fidelity_percent,mse,mean_frad,fsc,asg,n_samples,tau,zero_activation_count";
}

std::string MetricsReport::csv_row() const {
  std::ostringstream out;
  out << format_double(fidelity_percent) << "," << format_double(mse) << ","
      << format_double(mean_frad) << "," << format_double(fsc) << "," << format_double(asg) << ","
      << n_samples << "," << format_double(tau) << "," << zero_activation_count;
  return out.str();
}

}  // namespace fcs
