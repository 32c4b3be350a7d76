#pragma once

#include <map>
#include <optional>

#include "blockforge/blocking.hpp"

namespace blockforge::census {

using curve::CertifiedCurve;
using gf::FieldCtx;
using gf::FieldCtxPtr;
using gf::Fq;
using plane::Plane;
using plane::ProjLine;

// Splitting statistics of curve unions over all lines. A line is transverse
// to the union when the restriction to every component is squarefree and
// nonzero; it then carries one factor-degree partition per component. The
// multiset of observed tuples is compared against the product-class
// prediction: a tuple (lambda_1, ..., lambda_m) is expected on
// q^2 / prod_i z(lambda_i) lines, where z is the centralizer order of the
// cycle type inside the symmetric group.

// One descending partition of d_i per component.
using ClassKey = std::vector<std::vector<u32>>;

// prod_k k^{m_k} m_k! for a partition with m_k parts equal to k.
u64 partition_centralizer(const std::vector<u32>& partition);

struct ClassStat {
  u64 observed = 0;
  u64 z = 1;               // product of per-component centralizer orders
  double predicted = 0.0;  // q^2 / z
  double deviation = 0.0;  // observed - predicted
  double normalized = 0.0; // deviation / q^(3/2)
  double tolerance = 0.0;  // 10 q^(3/2) / sqrt(z)
  int verdict = 0;         // 0 within tolerance, 1 above, 2 above 3x
};

struct CensusResult {
  FieldCtxPtr ctx;
  std::vector<u32> degrees;
  u64 total_lines = 0;
  u64 non_transverse = 0;
  std::map<ClassKey, ClassStat> classes;
  u64 warn_count = 0;
  u64 fail_count = 0;
  // Lines with no rational point of the union: counted once through the
  // class data (all-derangement tuples plus contactless non-transverse
  // lines) and once by the exhaustive point-membership scan; the two line
  // sets must match exactly.
  u64 observed_skew = 0;
  u64 full_cycle_observed = 0;        // every partition a single part
  double full_cycle_predicted = 0.0;  // q^2 prod 1/d_i
  std::vector<u64> component_points;  // |C_i(F_q)|
};

// The tuple of factor-degree partitions at the line, or nullopt when the
// line is tangent to or contained in some component. Every curve must carry
// a geometric-irreducibility certificate.
std::optional<ClassKey> frobenius_class(const std::vector<CertifiedCurve>& cs,
                                        const Plane& pl, const ProjLine& ln);

// Exhaustive loop over all lines with the consistency checks described
// above: totals, per-component incidence double counting (sum over lines of
// rational contact equals |C_i(F_q)|(q+1)), and exact agreement of the two
// skew-line routes.
CensusResult chebotarev_census(const std::vector<CertifiedCurve>& cs,
                               int threads = 1);

struct SkewBoundReport {
  u64 observed_skew = 0;
  u64 full_cycle_observed = 0;
  double full_cycle_predicted = 0.0;
  double tolerance = 0.0;  // 10 q^(3/2)
  bool within_tolerance = false;
  bool skew_positive = false;
};

// The skew-line data of a census, against the product-of-degrees main term.
SkewBoundReport skew_line_bound_check(const CensusResult& census);

}  // namespace blockforge::census
