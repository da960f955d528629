#pragma once

// Shared vocabulary for the imgap library: node ids, node sets, bitmask
// helpers, tolerances, error types and the seeded RNG derivation.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace imgap {

using NodeId = std::uint32_t;
/// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;
/// Node set over graphs with at most 64 nodes (bit v set <=> node v present).
using NodeMask = std::uint64_t;

inline constexpr std::size_t kMaxMaskNodes = 64;
inline constexpr std::size_t kDefaultMaxEdges = 20;
inline constexpr std::uint64_t kDefaultMaxCombinations = 1'000'000;

/// Relative tolerance for equality of probabilities and spreads.
inline constexpr double kRelTol = 1e-9;
/// Absolute slack for inequality checks on n-normalized values.
inline constexpr double kSlack = 1e-7;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An exact oracle would need more enumeration than its configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A partial realization that no positive-probability live-edge graph produces.
class InconsistentObservation : public Error {
 public:
  using Error::Error;
};

/// A policy broke its contract (e.g. re-selected a seed).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

inline bool approx_equal(double a, double b, double rel = kRelTol) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---- node sets -------------------------------------------------------------

inline NodeSet normalized(NodeSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

constexpr NodeMask bit(NodeId v) { return NodeMask{1} << v; }
constexpr bool contains(NodeMask m, NodeId v) { return (m >> v) & 1U; }
constexpr std::size_t count(NodeMask m) { return static_cast<std::size_t>(std::popcount(m)); }

inline NodeMask full_mask(std::size_t n) {
  return n >= 64 ? ~NodeMask{0} : (NodeMask{1} << n) - 1;
}

inline NodeMask to_mask(const NodeSet& s) {
  NodeMask m = 0;
  for (NodeId v : s) {
    if (v >= kMaxMaskNodes) throw InvalidArgument("node id " + std::to_string(v) + " does not fit a 64-node mask");
    m |= bit(v);
  }
  return m;
}

inline NodeSet to_set(NodeMask m) {
  NodeSet s;
  s.reserve(count(m));
  while (m) {
    s.push_back(static_cast<NodeId>(std::countr_zero(m)));
    m &= m - 1;
  }
  return s;
}

// ---- randomness ------------------------------------------------------------

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under `master`. Depends only on the pair, so the
/// assignment of streams to workers never changes the random numbers drawn.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform draw in [0,1) with 53 random bits; portable across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [lo, hi]. Rejection sampling, so the sequence does not
/// depend on the standard library's distribution implementation.
inline std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return rng();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range + 1) % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return lo + x % range;
}

}  // namespace imgap
