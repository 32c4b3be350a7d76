#pragma once

#include "blockforge/curve.hpp"

namespace blockforge::conics {

using curve::PlaneCurve;
using gf::FieldCtx;
using gf::FieldCtxPtr;
using gf::Fq;
using plane::Plane;
using plane::ProjLine;

// Nonsingularity machinery for ternary quadratic forms. Everything here
// requires odd characteristic: the symmetric-matrix determinant test and the
// quadratic-character classification both divide by 2.

struct ConicForm {
  FieldCtxPtr ctx;
  // a200 x^2 + a020 y^2 + a002 z^2 + a110 xy + a101 xz + a011 yz, normalized
  // like every ternary form: first nonzero coefficient 1 in the graded-lex
  // monomial order (a200, a110, a101, a020, a011, a002).
  Fq a200 = 0, a020 = 0, a002 = 0, a110 = 0, a101 = 0, a011 = 0;
  bool nonsingular = false;  // determinant verdict, fixed at construction
  bool operator==(const ConicForm& o) const {
    return a200 == o.a200 && a020 == o.a020 && a002 == o.a002 &&
           a110 == o.a110 && a101 == o.a101 && a011 == o.a011;
  }
};

ConicForm make_conic(FieldCtxPtr ctx, Fq a200, Fq a020, Fq a002, Fq a110,
                     Fq a101, Fq a011);
ConicForm conic_from_curve(const PlaneCurve& c);
PlaneCurve conic_to_curve(const ConicForm& c);

// Rejection sampling of six coefficients until the determinant is nonzero.
ConicForm random_nonsingular_conic(const FieldCtxPtr& ctx, Rng& rng);

// Restriction of the conic to the line bx + cy - z = 0, substituting
// z = bx + cy: A x^2 + B xy + C y^2. Its discriminant B^2 - 4AC, as a
// polynomial in (b, c), has degree at most 2 in each variable; the mixed
// top coefficients (2,2), (2,1), (1,2) cancel identically, which the
// constructor asserts.
struct DualDiscriminant {
  FieldCtxPtr ctx;
  std::array<std::array<Fq, 3>, 3> grid{};  // grid[i][j] * alpha^i beta^j
  Fq eval(Fq alpha, Fq beta) const;
  // Homogenization to a ternary quadratic form (degree exactly 2 required);
  // the affine polynomial is irreducible iff this form has no linear factor.
  PlaneCurve as_projective_curve() const;
};

DualDiscriminant dual_discriminant(const ConicForm& c);
bool proportional(const DualDiscriminant& a, const DualDiscriminant& b);

// Chart classification of the line bx + cy - z = 0 against the conic:
// valid only when both quadratic coefficients of the restriction are
// nonzero ("condition one"); then the discriminant's quadratic character
// decides. At most 4q chart cells fail condition one per conic.
enum class ChartClass { ConditionOneFails, Skew, Tangent, Secant };
ChartClass classify_line(const ConicForm& c, Fq b, Fq cc);

// Authoritative route for any line: the number of distinct rational points
// of the conic on the line (0 / 1 / 2), read off the factor degrees of the
// restriction. Rejects singular conics (a line could be a component).
enum class DirectClass { Skew, Tangent, Secant };
DirectClass direct_classify(const ConicForm& c, const Plane& pl,
                            const ProjLine& ln);

// Exhaustive sweep of the q^2 chart cells: asserts that the chart
// classification agrees with the direct one wherever condition one holds,
// and returns the number of failing cells (always <= 4q).
u64 verify_trichotomy(const ConicForm& c, int threads = 1);

// Classification totals over all q^2 + q + 1 lines of the plane, by the
// direct route. For a nonsingular conic: tangent = q+1, secant = q(q+1)/2,
// external = q(q-1)/2.
struct LineClassTotals {
  u64 tangent = 0;
  u64 secant = 0;
  u64 external = 0;
};
LineClassTotals conic_line_class_totals(const ConicForm& c, int threads = 1);

// Exhaustive scan over chart cells (b, c) for a list of pairwise distinct
// nonsingular conics: counts cells where every discriminant value is a
// nonsquare, and cells whose line is skew to every conic by the direct
// route. The two counts are computed independently and must agree. The main
// term q^2 / 2^ell comes with a heuristic tolerance 2^ell (2 ell + 1) q;
// exceeding it is reported, not fatal.
struct SkewCensusResult {
  u32 ell = 0;
  u64 q = 0;
  u64 nonsquare_count = 0;
  u64 skew_all_count = 0;
  double main_term = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = true;
  bool positive = false;
};
SkewCensusResult simultaneous_nonsquare_census(
    const FieldCtxPtr& ctx, const std::vector<ConicForm>& conics,
    int threads = 1);

}  // namespace blockforge::conics
