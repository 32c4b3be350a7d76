#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blockforge/plane.hpp"

namespace blockforge::curve {

using gf::FieldCtx;
using gf::FieldCtxPtr;
using gf::Fq;
using plane::Plane;
using plane::ProjLine;
using plane::ProjPoint;

// Monomials x^i y^j z^k of total degree d in graded lexicographic order with
// x > y > z: descending i, then descending j. N(d) = binom(d+2, 2).
u32 monomial_count(u32 d);
std::vector<std::array<u32, 3>> monomials(u32 d);
u32 monomial_index(u32 d, u32 i, u32 j);

// Homogeneous ternary form of degree d; coefficients follow the monomial
// order above and the first nonzero coefficient is 1.
struct PlaneCurve {
  FieldCtxPtr ctx;
  u32 degree = 0;
  std::vector<Fq> coeffs;
  bool operator==(const PlaneCurve& o) const {
    return degree == o.degree && coeffs == o.coeffs;
  }
};

PlaneCurve make_curve(FieldCtxPtr ctx, u32 degree, std::vector<Fq> coeffs);
bool is_zero_form(const PlaneCurve& c);

// Value at the fixed normalized representative of the point.
Fq evaluate(const PlaneCurve& c, const ProjPoint& pt);

// All rational points, as plane indices in canonical order.
std::vector<u64> rational_points(const PlaneCurve& c, const Plane& pl);

// Restriction to a line: R(s, t) = C(s*P0 + t*P1) where (P0, P1) is the
// canonical basis of the line (its two smallest points). coeff[j] multiplies
// s^(d-j) t^j; identically zero means the line is a component.
struct BinaryForm {
  u32 degree = 0;
  std::vector<Fq> coeff;
  bool zero = false;
};
BinaryForm restrict_to_line(const PlaneCurve& c, const Plane& pl,
                            const ProjLine& ln);

// Dehomogenized restriction: f(u) = sum coeff[j] u^j (u = t/s). The factor s
// accounts for the root at infinity with multiplicity d - deg f.
gf::Poly binary_to_univariate(const BinaryForm& b);

// Splitting behaviour of a line against a curve. Transverse lines carry the
// partition of d given by the factor degrees of the restriction (the
// at-infinity factor contributes a part 1 when present); any repeated factor
// is a Tangency; identically zero restriction means Component.
struct LineProfile {
  enum Kind { Component, Tangency, Transverse } kind = Transverse;
  std::vector<u32> partition;  // descending parts, only for Transverse
};
LineProfile line_profile(const PlaneCurve& c, const Plane& pl,
                         const ProjLine& ln);

// (degree, multiplicity) pairs of the restriction including the at-infinity
// factor; empty only for components.
std::vector<std::pair<u32, u32>> restriction_factor_degrees(
    const PlaneCurve& c, const Plane& pl, const ProjLine& ln);

// Does G divide F (as forms over the same field)? Decided by solving the
// linear system F = G * H in the unknown coefficients of H.
bool divides(const PlaneCurve& g, const PlaneCurve& f);

// Exact irreducibility over F_q for degree <= 5: trial divisibility by every
// line, plus every degree-2 form when d >= 4.
bool is_irreducible_fq(const PlaneCurve& c);

struct IrreducibilityCertificate {
  enum Status {
    GeomIrreducible,
    FqReducible,
    FqIrredGeomReducible,
    Unknown
  } status = Unknown;
  enum Witness {
    None,
    FamilyPencil,
    FamilyGraph,
    FamilyFermat,
    FqDivisor,        // a proper divisor over F_q exists
    ExtLineFactor,    // line factor over F_{q^m}, m = ext_degree
    PointCountBound,  // |C(F_q)| > d^2/4 certifies geometric irreducibility
    DeterminantRank   // nonsingular conic via the symmetric matrix
  } witness = None;
  u32 ext_degree = 1;          // m for ExtLineFactor
  std::vector<Fq> line_coeff;  // codes in F_{q^m} for ExtLineFactor
};

struct CertifiedCurve {
  PlaneCurve curve;
  IrreducibilityCertificate cert;
};

// A line factor (coefficient triple over F_{q^m}), deterministically chosen,
// if one exists. Complete: any line component either is a coordinate line or
// shows up among candidates built from the roots of the restrictions to the
// three coordinate lines.
std::optional<std::vector<Fq>> line_factor_over_extension(const PlaneCurve& c,
                                                          u32 m);

// Coefficient-wise image of the form under a field embedding.
PlaneCurve embed_curve(const PlaneCurve& c, const gf::FieldEmbedding& emb,
                       FieldCtxPtr big);

// det of the symmetric matrix attached to a conic, doubled to avoid division
// by 2: det [[2a, d, e], [d, 2b, f], [e, f, 2c]] for ax^2+by^2+cz^2+dxy+exz+fyz.
// Odd characteristic only; nonzero iff the conic is nonsingular.
Fq conic_symmetric_det(const PlaneCurve& c);

// Exact for d <= 3; for d >= 4 geometric irreducibility is certified either
// by a rational point count above d^2/4 (sound bound for a curve with a
// proper conjugate factorization) or stays Unknown. Conjugate line factors
// over F_{q^m}, m | d, are searched as reducibility witnesses.
IrreducibilityCertificate geometric_irreducibility(const PlaneCurve& c);

// ---- certified samplers ----

// y z^(d-1) = x^d - alpha z^d, stored normalized; geometrically irreducible
// for every alpha (degree-1 in y with coprime cofactors) and carrying exactly
// q + 1 rational points (the affine graph plus [0:1:0]).
CertifiedCurve pencil_curve(const FieldCtxPtr& ctx, u32 d, Fq alpha);

// y*A(x, z) + B(x, z) with A, B homogeneous of degrees d-1, d and
// gcd(A, B) = 1; geometrically irreducible by the same linear-in-y argument.
CertifiedCurve graph_curve(const FieldCtxPtr& ctx, u32 d, Rng& rng);

// a x^d + b y^d + c z^d with abc != 0 and p not dividing d: smooth, hence
// geometrically irreducible.
CertifiedCurve fermat_curve(const FieldCtxPtr& ctx, u32 d, Fq a, Fq b, Fq c);

// Enumerate all normalized degree-d forms (first nonzero coefficient 1) in
// canonical order; the callback may return false to stop.
void enumerate_normalized_forms(const FieldCtxPtr& ctx, u32 d,
                                const std::function<bool(PlaneCurve&)>& fn);

}  // namespace blockforge::curve
