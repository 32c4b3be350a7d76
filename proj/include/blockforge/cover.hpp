#pragma once

#include <functional>
#include <optional>

#include "blockforge/blocking.hpp"

namespace blockforge::cover {

using curve::CertifiedCurve;
using gf::FieldCtx;
using gf::FieldCtxPtr;
using gf::Fq;
using plane::Plane;
using plane::ProjPoint;

// Randomized domination in a bipartite graph (A to be dominated, B the
// candidate side): sample every b independently with probability
// min(1, t ln|A| / delta), patch greedily, retry with derived seeds until
// the selection fits under ceil(|B| t ln|A| / delta). delta is the minimum
// A-side degree, computed exactly.

struct BipartiteInstance {
  u64 a_size = 0;
  std::vector<std::vector<u64>> b_masks;  // per-b bitmask over A indices

  u64 b_size() const { return b_masks.size(); }
  bool adjacent(u64 b, u64 a) const {
    return (b_masks[b][a >> 6] >> (a & 63)) & 1;
  }
  u64 degree_of_a(u64 a) const;
  u64 delta() const;
};

BipartiteInstance complete_bipartite(u64 a, u64 b);
BipartiteInstance perfect_matching(u64 n);

struct DominationResult {
  std::vector<u64> selected;  // sorted candidate indices
  u64 bound = 0;
  u64 delta = 0;
  double sample_p = 0.0;
  u64 attempts = 0;
  u64 sampled_count = 0;  // size after sampling in the accepted attempt
  u64 patched_count = 0;  // greedy additions in the accepted attempt
  bool verified = false;  // exhaustive re-check of the domination level
};

// extra_patch may append further candidates (by membership flags) after the
// count-level patching of an attempt and before the bound test; it must be
// deterministic.
using ExtraPatch = std::function<void(std::vector<u8>& member)>;

DominationResult tfold_dominate(const BipartiteInstance& inst, u32 t,
                                u64 seed, const ExtraPatch& extra = nullptr);

// The t = 1 case: plain randomized domination.
DominationResult stein_dominate(const BipartiteInstance& inst, u64 seed);

// A = all lines of the plane, B = a pool of certified curves; adjacency
// means the curve has a rational point on the line. curve_points keeps the
// rational points (plane indices) per pool member for the t-fold builder.
struct LinesVsCurves {
  BipartiteInstance inst;
  std::vector<std::vector<u64>> curve_points;
};
LinesVsCurves lines_vs_curves_instance(const Plane& pl,
                                       const std::vector<CertifiedCurve>& pool,
                                       int threads = 1);

struct BuildResult {
  u32 t = 1;
  std::vector<u64> selected;  // pool indices
  std::vector<curve::PlaneCurve> curves;
  DominationResult dom;
  blocking::BlockingReport report;
  double log_reference = 0.0;  // 4 ln q at t = 1, (2 (t+1)!/t) ln q otherwise
};

// Domination at curve-count level t, then pointwise residual patching until
// every line meets the union in at least t points, verified by the
// exhaustive line scan. Fails loudly when even the full pool cannot reach
// level t on some line.
BuildResult build_tfold_family(const FieldCtxPtr& ctx, u32 d, u32 t,
                               const std::vector<CertifiedCurve>& pool,
                               u64 seed, int threads = 1);

// The t = 1 case: a blocking family.
BuildResult build_blocking_family(const FieldCtxPtr& ctx, u32 d,
                                  const std::vector<CertifiedCurve>& pool,
                                  u64 seed, int threads = 1);

// Exact number of geometrically irreducible degree-d forms (normalized)
// vanishing on every point of S, by full enumeration. Supported sizes:
// d = 2 with q <= 5, d = 3 with q <= 3.
u64 count_irreducible_through(const std::vector<ProjPoint>& s, u32 d,
                              const FieldCtxPtr& ctx);

// Independent route to the same count: a form is geometrically reducible
// exactly when some line of the plane over F_{q^m} divides it (m = 2 for
// conics, m = 3 for cubics; subfield lines are included in the scan), so
// divisibility is tested against every such line by restriction.
u64 count_irreducible_through_direct(const std::vector<ProjPoint>& s, u32 d,
                                     const FieldCtxPtr& ctx);

// One enumeration pass collecting the whole irreducible-count profile.
struct PsiReport {
  u32 d = 0;
  u64 q = 0;
  u64 psi_empty = 0;            // all irreducible forms
  std::vector<u64> psi_point;   // per plane point index
  bool psi_point_constant = false;
  u64 psi_pair_max = 0;         // over distinct point pairs
  u64 pair_bound = 0;           // (q^(N-2) - 1) / (q - 1)
};
PsiReport psi_survey(const FieldCtxPtr& ctx, u32 d, bool independent_route,
                     int threads = 1);

// True iff the k x N evaluation matrix of the points at the degree-d
// monomials has full row rank k; needs k <= d + 1 and distinct points.
bool interpolation_rank_check(const std::vector<ProjPoint>& points, u32 d,
                              const FieldCtxPtr& ctx);

// D binom(d/D + 2, 2) <= binom(d + 2, 2) for every divisor D of d.
bool binom_convexity_check(u32 d);

}  // namespace blockforge::cover
