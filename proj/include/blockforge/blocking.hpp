#pragma once

#include <vector>

#include "blockforge/curve.hpp"

namespace blockforge::blocking {

using plane::Plane;
using plane::ProjLine;

// Line-by-line incidence profile of a point set B in the plane.
//   k_value: max |B ∩ L| over lines; t_level: min |B ∩ L| (so B is blocking
//   iff t_level >= 1, and meets every line in >= t points iff t_level >= t).
//   is_trivial: some line lies inside B entirely.
struct BlockingReport {
  bool is_blocking = false;
  bool is_trivial = false;
  u32 k_value = 0;
  u32 t_level = 0;
  u64 set_size = 0;
  u64 unblocked_count = 0;
  std::vector<u64> unblocked_lines;  // capped sample unless full list asked
  bool unblocked_is_full = false;
};

constexpr std::size_t kUnblockedSampleCap = 64;

// Exhaustive scan over all q^2 + q + 1 lines, walking the q + 1 points of
// each. Deterministic for any worker count.
BlockingReport analyze(const Plane& pl, const std::vector<u64>& point_indices,
                       int threads = 1, bool full_unblocked = false);

// Indices of lines meeting the set in no rational point.
std::vector<u64> skew_lines(const Plane& pl,
                            const std::vector<u64>& point_indices,
                            int threads = 1);

// Union of rational points of several curves, as sorted plane indices.
std::vector<u64> union_rational_points(
    const std::vector<curve::PlaneCurve>& curves, const Plane& pl);

// Sum of degrees: an upper bound for the k-value of a union of curves with
// pairwise distinct components (each line meets the union in at most
// sum(d_i) points or lies inside it). Throws if two inputs share a
// component; the check is divisibility of one form by the other, which is
// exact for irreducible inputs.
u64 bezout_k_bound(const std::vector<curve::PlaneCurve>& curves);

}  // namespace blockforge::blocking
