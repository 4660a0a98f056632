#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracpf/errors.hpp"
#include "fracpf/random.hpp"

namespace fracpf {

/// Nonuniform time levels 0 = t_0 < t_1 < ... < t_N. Steps are 1-based:
/// step(k) = t_k - t_{k-1}, ratio(k) = step(k) / step(k+1).
class TimeMesh {
 public:
  TimeMesh() : nodes_{0.0} {}

  explicit TimeMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty() || nodes_.front() != 0.0) throw std::invalid_argument("TimeMesh: first node must be 0");
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      if (!(nodes_[k] > nodes_[k - 1]) || !std::isfinite(nodes_[k]))
        throw std::invalid_argument("TimeMesh: nodes must be finite and strictly increasing");
    }
  }

  std::size_t steps() const { return nodes_.size() - 1; }
  double node(std::size_t k) const { return nodes_.at(k); }
  double final_time() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }

  double step(std::size_t k) const {
    detail::require(k >= 1 && k < nodes_.size(), "TimeMesh::step: index out of range");
    return nodes_[k] - nodes_[k - 1];
  }

  double ratio(std::size_t k) const {
    detail::require(k >= 1 && k + 1 < nodes_.size(), "TimeMesh::ratio: index out of range");
    return step(k) / step(k + 1);
  }

  double min_step() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < nodes_.size(); ++k) m = std::min(m, step(k));
    return m;
  }

  double max_step() const {
    double m = 0.0;
    for (std::size_t k = 1; k < nodes_.size(); ++k) m = std::max(m, step(k));
    return m;
  }

  double max_ratio() const {
    double m = 0.0;
    for (std::size_t k = 1; k + 1 < nodes_.size(); ++k) m = std::max(m, ratio(k));
    return m;
  }

  void append_step(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("TimeMesh: step must be positive");
    const double t = nodes_.back() + tau;
    if (!(t > nodes_.back())) throw std::invalid_argument("TimeMesh: step below time resolution");
    nodes_.push_back(t);
  }

  void append_node(double t) {
    if (!(t > nodes_.back()) || !std::isfinite(t))
      throw std::invalid_argument("TimeMesh: node must exceed the last node");
    nodes_.push_back(t);
  }

  /// Drop everything after step n.
  void truncate(std::size_t n) {
    detail::require(n < nodes_.size(), "TimeMesh::truncate: index out of range");
    nodes_.resize(n + 1);
  }

  friend bool operator==(const TimeMesh&, const TimeMesh&) = default;

 private:
  std::vector<double> nodes_;
};

/// t_k = T0 (k/N0)^gamma, k = 0..N0.
inline TimeMesh build_graded(double T0, std::size_t N0, double gamma) {
  if (!(T0 > 0.0)) throw std::invalid_argument("build_graded: T0 must be positive");
  if (N0 < 1) throw std::invalid_argument("build_graded: N0 must be >= 1");
  if (!(gamma >= 1.0)) throw std::invalid_argument("build_graded: gamma must be >= 1");
  std::vector<double> nodes(N0 + 1);
  nodes[0] = 0.0;
  for (std::size_t k = 1; k < N0; ++k) {
    nodes[k] = T0 * std::pow(static_cast<double>(k) / static_cast<double>(N0), gamma);
  }
  nodes[N0] = T0;
  return TimeMesh(std::move(nodes));
}

/// Append N1 equal steps ending exactly at T.
inline TimeMesh extend_uniform(const TimeMesh& mesh, double T, std::size_t N1) {
  const double T0 = mesh.final_time();
  if (!(T > T0)) throw std::invalid_argument("extend_uniform: T must exceed the last node");
  if (N1 < 1) throw std::invalid_argument("extend_uniform: N1 must be >= 1");
  std::vector<double> nodes = mesh.nodes();
  const double tau = (T - T0) / static_cast<double>(N1);
  for (std::size_t k = 1; k < N1; ++k) nodes.push_back(T0 + static_cast<double>(k) * tau);
  nodes.push_back(T);
  return TimeMesh(std::move(nodes));
}

/// Append N1 steps tau_k = (T - T0) eps_k / sum(eps), eps_k uniform in (0,1)
/// drawn from a counter-based generator.
inline TimeMesh extend_random(const TimeMesh& mesh, double T, std::size_t N1, std::uint64_t seed) {
  const double T0 = mesh.final_time();
  if (!(T > T0)) throw std::invalid_argument("extend_random: T must exceed the last node");
  if (N1 < 1) throw std::invalid_argument("extend_random: N1 must be >= 1");
  const CounterRng rng(seed);
  std::vector<double> eps(N1);
  double sum = 0.0;
  for (std::size_t k = 0; k < N1; ++k) {
    eps[k] = rng.uniform_open(k);
    sum += eps[k];
  }
  std::vector<double> nodes = mesh.nodes();
  double t = T0;
  for (std::size_t k = 0; k + 1 < N1; ++k) {
    t += (T - T0) * eps[k] / sum;
    nodes.push_back(t);
  }
  nodes.push_back(T);
  return TimeMesh(std::move(nodes));
}

/// Step-size control from the energy rate:
/// tau = max{tau_min, tau_max / sqrt(1 + kappa |E'(t)|^2)}.
class AdaptiveController {
 public:
  AdaptiveController(double kappa, double tau_min, double tau_max)
      : kappa_(kappa), tau_min_(tau_min), tau_max_(tau_max) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("AdaptiveController: kappa must be >= 0");
    if (!(tau_min > 0.0) || !(tau_max >= tau_min))
      throw std::invalid_argument("AdaptiveController: need 0 < tau_min <= tau_max");
  }

  double kappa() const { return kappa_; }
  double tau_min() const { return tau_min_; }
  double tau_max() const { return tau_max_; }

  /// Record an accepted (time, energy) pair.
  void record(double t, double energy) {
    prev_ = last_;
    last_ = Sample{t, energy};
  }

  /// Backward difference of the two most recent accepted energies.
  std::optional<double> energy_rate() const {
    if (!prev_ || !last_) return std::nullopt;
    return (last_->energy - prev_->energy) / (last_->t - prev_->t);
  }

  double step_for_rate(double energy_rate) const {
    if (std::isinf(energy_rate)) return tau_min_;
    const double r = kappa_ * energy_rate * energy_rate;
    if (std::isinf(r)) return tau_min_;
    return std::clamp(tau_max_ / std::sqrt(1.0 + r), tau_min_, tau_max_);
  }

  /// Next step from the recorded history; tau_max until two samples exist.
  double next_step() const { return step_for_rate(energy_rate().value_or(0.0)); }

 private:
  struct Sample {
    double t;
    double energy;
  };
  double kappa_;
  double tau_min_;
  double tau_max_;
  std::optional<Sample> prev_;
  std::optional<Sample> last_;
};

inline double next_adaptive_step(const AdaptiveController& ctrl, double energy_rate) {
  return ctrl.step_for_rate(energy_rate);
}

}  // namespace fracpf
