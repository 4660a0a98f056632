#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "fracpf/errors.hpp"
#include "fracpf/field.hpp"
#include "fracpf/frac_kernels.hpp"
#include "fracpf/soe.hpp"
#include "fracpf/time_mesh.hpp"

namespace fracpf {

/// sum_{k=1}^{n-1} a_{n-k}^{(n)} increments[k-1]: the lagged part of the L1+
/// sum at level n = row.n. The a_0 term belongs to the implicit step.
template <class Value>
Value history_direct(std::span<const Value> increments, const KernelRow& row, const Value& zero) {
  detail::require(increments.size() + 1 == row.n, "history_direct: history length must be n-1");
  Value h = zero;
  for (std::size_t k = 1; k < row.n; ++k) axpy(h, row.coeffs[row.n - k], increments[k - 1]);
  return h;
}

/// Stores every increment and evaluates the lagged sum with O(n) work per step.
template <class Value>
class DirectHistory {
 public:
  DirectHistory(double alpha, Value zero) : alpha_(alpha), zero_(std::move(zero)) {}

  std::size_t size() const { return increments_.size(); }

  Value lagged(const TimeMesh& mesh, std::size_t n) const {
    detail::require(n == increments_.size() + 1, "DirectHistory: step index does not follow the history");
    if (n == 1) return zero_;
    return history_direct<Value>(increments_, l1plus_row(mesh, alpha_, n), zero_);
  }

  void push(const TimeMesh&, Value increment) { increments_.push_back(std::move(increment)); }

  const std::vector<Value>& increments() const { return increments_; }

 private:
  double alpha_;
  Value zero_;
  std::vector<Value> increments_;
};

/// Sum-of-exponentials history. The newest increment is weighted exactly by
/// a_1^{(n)}; older ones are folded into one accumulator per exponential mode:
///   Y_l^{(m)} = e^{-theta_l tau_m} Y_l^{(m-1)} + incr_m (1 - e^{-theta_l tau_m}) / (theta_l tau_m),
/// and the lagged sum at level n is
///   a_1^{(n)} incr_{n-1} + sum_l w_l e^{-theta_l tau_{n-1}} (1 - e^{-theta_l tau_n}) / (theta_l tau_n) Y_l^{(n-2)}.
template <class Value>
class FastHistory {
 public:
  FastHistory(double alpha, std::shared_ptr<const SoeApproximation> soe, Value zero)
      : alpha_(alpha), soe_(std::move(soe)), zero_(std::move(zero)) {
    detail::require(soe_ != nullptr, "FastHistory: missing SOE table");
    detail::require(std::abs(soe_->alpha - alpha) < 1e-15, "FastHistory: SOE built for a different alpha");
  }

  std::size_t size() const { return count_; }
  std::size_t modes() const { return soe_->size(); }
  const SoeApproximation& soe() const { return *soe_; }

  /// Field-sized operations (axpy or scale-add) performed so far.
  std::size_t field_ops() const { return field_ops_; }

  Value lagged(const TimeMesh& mesh, std::size_t n) const {
    detail::require(n == count_ + 1, "FastHistory: step index does not follow the history");
    Value h = zero_;
    if (n == 1) return h;
    axpy(h, l1plus_coeff(mesh, alpha_, n, n - 1), *pending_);
    ++field_ops_;
    if (n == 2) return h;

    const double tau_prev = mesh.step(n - 1);
    const double tau_n = mesh.step(n);
    // Lags covered here lie in [tau_{n-1}, t_n].
    const double slack = 1.0 + 1e-12;
    if (tau_prev * slack < soe_->delta || mesh.node(n) > soe_->T * slack)
      throw ContractError("FastHistory: lag outside the SOE validity window");
    for (std::size_t l = 0; l < soe_->size(); ++l) {
      const double theta = soe_->rates[l];
      const double factor = soe_->weights[l] * std::exp(-theta * tau_prev) * phi1(theta * tau_n);
      axpy(h, factor, modes_[l]);
      ++field_ops_;
    }
    return h;
  }

  void push(const TimeMesh& mesh, Value increment) {
    if (pending_) {
      // Fold increment number count_ (step length tau_{count_}).
      const double tau = mesh.step(count_);
      if (modes_.empty()) modes_.assign(soe_->size(), zero_);
      for (std::size_t l = 0; l < soe_->size(); ++l) {
        const double x = soe_->rates[l] * tau;
        scale_add(modes_[l], std::exp(-x), phi1(x), *pending_);
        ++field_ops_;
      }
    }
    pending_ = std::move(increment);
    ++count_;
  }

 private:
  // (1 - e^{-x}) / x
  static double phi1(double x) { return x < 1e-300 ? 1.0 : -std::expm1(-x) / x; }

  double alpha_;
  std::shared_ptr<const SoeApproximation> soe_;
  Value zero_;
  std::vector<Value> modes_;
  std::optional<Value> pending_;
  std::size_t count_ = 0;
  mutable std::size_t field_ops_ = 0;
};

enum class HistoryMode { direct, fast };

/// Increment history with a runtime-selected evaluation strategy.
template <class Value>
class IncrementHistory {
 public:
  explicit IncrementHistory(DirectHistory<Value> h) : impl_(std::move(h)) {}
  explicit IncrementHistory(FastHistory<Value> h) : impl_(std::move(h)) {}

  static IncrementHistory direct(double alpha, Value zero) {
    return IncrementHistory(DirectHistory<Value>(alpha, std::move(zero)));
  }
  static IncrementHistory fast(double alpha, std::shared_ptr<const SoeApproximation> soe, Value zero) {
    return IncrementHistory(FastHistory<Value>(alpha, std::move(soe), std::move(zero)));
  }

  HistoryMode mode() const { return std::holds_alternative<DirectHistory<Value>>(impl_) ? HistoryMode::direct : HistoryMode::fast; }

  std::size_t size() const {
    return std::visit([](const auto& h) { return h.size(); }, impl_);
  }
  Value lagged(const TimeMesh& mesh, std::size_t n) const {
    return std::visit([&](const auto& h) { return h.lagged(mesh, n); }, impl_);
  }
  void push(const TimeMesh& mesh, Value increment) {
    std::visit([&](auto& h) { h.push(mesh, std::move(increment)); }, impl_);
  }

  const FastHistory<Value>* as_fast() const { return std::get_if<FastHistory<Value>>(&impl_); }
  const DirectHistory<Value>* as_direct() const { return std::get_if<DirectHistory<Value>>(&impl_); }

 private:
  std::variant<DirectHistory<Value>, FastHistory<Value>> impl_;
};

}  // namespace fracpf
