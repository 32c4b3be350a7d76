#pragma once

#include <optional>

#include "blockforge/blocking.hpp"

namespace blockforge::pencil {

using gf::FieldCtx;
using gf::FieldCtxPtr;
using gf::Fq;

// The target family: for a line ux + y + vz = 0 the curve y z^(d-1) =
// x^d - alpha z^d meets it in a rational affine point iff alpha lies in
// value_set(u, v) = { a^d + u a + v : a in F_q }. Covering every (u, v) cell
// with some chosen alpha is therefore equivalent to the curve union blocking
// the plane (lines with zero y-coefficient all pass through [0:1:0], which
// every curve of the family contains).

// All (u, v) cells whose value set contains alpha, as sorted u*q + v keys.
std::vector<u64> cover_target(const FieldCtxPtr& ctx, u32 d, Fq alpha);

// Largest guaranteed size of the greedy output: 1 + max{ l >= 0 :
// d^l <= q^2 (d-1)^l }, evaluated in exact big-integer arithmetic.
u64 greedy_size_bound(u32 d, u64 q);

struct GreedyStep {
  Fq alpha = 0;
  u64 newly_covered = 0;  // cells removed from the uncovered pool
};

struct PencilResult {
  u32 d = 0;
  FieldCtxPtr ctx;
  std::vector<Fq> alphas;  // chosen order
  u64 bound = 0;
  std::vector<GreedyStep> steps;
  std::vector<curve::PlaneCurve> curves;
  blocking::BlockingReport report;
  u64 union_size = 0;
};

// Greedy cover of the (u, v) grid: each step picks the alpha (not yet
// chosen, smallest code on ties) covering the most uncovered cells. Checked
// per step, in exact arithmetic: the covered total after k steps is at least
// q^2 (1 - ((d-1)/d)^k). The final union of curves is verified blocking by
// the exhaustive line scan.
PencilResult greedy_construct(const FieldCtxPtr& ctx, u32 d, int threads = 1,
                              u32 q_budget = 512);

// Both routes of the covering criterion: (a) every (u, v) cell meets some
// chosen value set, (b) the curve union blocks every line. The verdicts must
// agree; disagreement is a fatal internal flag. Returns the shared verdict.
bool verify_cover_equivalence(const FieldCtxPtr& ctx, u32 d,
                              const std::vector<Fq>& alphas, int threads = 1);

// Exact minimum number of alphas covering the grid, by branch and bound over
// the q candidate sets; returns nullopt when the node budget runs out.
std::optional<u64> exact_min_cover(const FieldCtxPtr& ctx, u32 d,
                                   u64 node_budget = 2'000'000,
                                   u32 q_budget = 31);

// Smallest x such that s - x is a non-d'-th power for every s in S, with
// d' = gcd(d, q-1) > 1 required. Such an x leaves the cell (0, x) uncovered,
// so none exists when S covers the grid.
std::optional<Fq> nonresidue_witness(const FieldCtxPtr& ctx,
                                     const std::vector<Fq>& alphas, u32 d);

}  // namespace blockforge::pencil
