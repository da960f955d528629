#pragma once

// Closed-form upper bounds on the ratio OPT_A / OPT_N.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "imgap/common.hpp"

namespace imgap {

namespace detail {

inline void require_k_at_least_two(std::size_t k) {
  if (k < 2) throw InvalidArgument("bound needs k >= 2, got k=" + std::to_string(k));
}

/// (1 - c/k)^k without cancellation for large k.
inline double power_term(double c, std::size_t k) {
  const double kd = static_cast<double>(k);
  if (c >= kd) return 0.0;
  return std::exp(kd * std::log1p(-c / kd));
}

}  // namespace detail

/// In-arborescences: 2 / (1 - (1 - 2/k)^k).
inline double bound_in_arborescence(std::size_t k) {
  detail::require_k_at_least_two(k);
  return 2.0 / (1.0 - detail::power_term(2.0, k));
}

/// Any graph: k.
inline double bound_budget(std::size_t k) {
  if (k < 1) throw InvalidArgument("budget bound needs k >= 1");
  return static_cast<double>(k);
}

/// Any graph on n nodes: ceil(n^(1/3)), by integer search so perfect cubes
/// are exact.
inline std::uint64_t bound_cube_root(std::uint64_t n) {
  if (n < 1) throw InvalidArgument("cube-root bound needs n >= 1");
  std::uint64_t c = 1;
  while (c * c * c < n) ++c;
  return c;
}

/// alpha-bounded graphs: min{k, alpha/k + 2 + 1/(1 - (1 - 1/k)^k)}.
inline double bound_alpha(std::uint64_t alpha, std::size_t k) {
  detail::require_k_at_least_two(k);
  const double kd = static_cast<double>(k);
  const double tail = static_cast<double>(alpha) / kd + 2.0 + 1.0 / (1.0 - detail::power_term(1.0, k));
  return std::min(kd, tail);
}

/// k-free form: the positive root of k = alpha/k + 2 + e/(e-1).
inline double bound_alpha_closed_form(std::uint64_t alpha) {
  constexpr double e = std::numbers::e;
  const double a = static_cast<double>(alpha);
  return (std::sqrt(4.0 * (e - 1.0) * (e - 1.0) * a + (3.0 * e - 2.0) * (3.0 * e - 2.0)) + 3.0 * e - 2.0) /
         (2.0 * (e - 1.0));
}

/// 0-bounded graphs: min{k, 3 / (1 - max{0, 1 - 3/k}^k)}.
inline double bound_zero_bounded(std::size_t k) {
  detail::require_k_at_least_two(k);
  return std::min(static_cast<double>(k), 3.0 / (1.0 - detail::power_term(3.0, k)));
}

/// Limit of bound_in_arborescence: 2e^2 / (e^2 - 1).
inline double in_arborescence_limit() {
  const double e2 = std::exp(2.0);
  return 2.0 * e2 / (e2 - 1.0);
}

/// Limit of bound_zero_bounded: 3e^3 / (e^3 - 1).
inline double zero_bounded_limit() {
  const double e3 = std::exp(3.0);
  return 3.0 * e3 / (e3 - 1.0);
}

/// Earlier in-arborescence bound, 2e / (e - 1), kept for comparison columns.
inline double prior_in_arborescence_bound() {
  constexpr double e = std::numbers::e;
  return 2.0 * e / (e - 1.0);
}

}  // namespace imgap
