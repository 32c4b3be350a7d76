#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <vector>

#include "blockforge/curve.hpp"
#include "doctest.h"

using namespace blockforge;
using namespace blockforge::curve;

namespace {

// Conic helper in graded-lex coefficient order:
// [x^2, xy, xz, y^2, yz, z^2].
PlaneCurve conic(const gf::FieldCtxPtr& ctx, std::vector<Fq> c) {
  return make_curve(ctx, 2, std::move(c));
}

PlaneCurve fermat_conic(const gf::FieldCtxPtr& ctx) {
  return conic(ctx, {1, 0, 0, 1, 0, ctx->neg(1)});  // x^2 + y^2 - z^2
}

u64 enumerate_count(const gf::FieldCtxPtr& ctx, u32 d) {
  u64 n = 0;
  enumerate_normalized_forms(ctx, d, [&](PlaneCurve&) {
    ++n;
    return true;
  });
  return n;
}

}  // namespace

TEST_CASE("graded-lex monomial order") {
  CHECK(monomial_count(1) == 3);
  CHECK(monomial_count(2) == 6);
  CHECK(monomial_count(3) == 10);
  std::vector<std::array<u32, 3>> expect2 = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1},
                                             {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  CHECK(monomials(2) == expect2);
  for (u32 d = 1; d <= 5; ++d) {
    auto ms = monomials(d);
    REQUIRE(ms.size() == monomial_count(d));
    for (u32 k = 0; k < ms.size(); ++k) {
      CHECK(ms[k][0] + ms[k][1] + ms[k][2] == d);
      CHECK(monomial_index(d, ms[k][0], ms[k][1]) == k);
    }
  }
}

TEST_CASE("forms are normalized up to scalar") {
  auto F = gf::make_field(5, 1);
  PlaneCurve a = conic(F, {2, 0, 0, 2, 0, 3});
  PlaneCurve b = fermat_conic(F);
  CHECK(a == b);  // 2(x^2 + y^2 - z^2) normalizes back
  CHECK(!is_zero_form(b));
  CHECK_THROWS_AS((void)make_curve(F, 2, {0, 0, 0, 0, 0, 0}), InvalidInput);
  CHECK_THROWS_AS((void)make_curve(F, 2, {1, 0, 0}), InvalidInput);
}

TEST_CASE("evaluation at plane points") {
  auto F5 = gf::make_field(5, 1);
  Plane pl(F5);
  CHECK(evaluate(fermat_conic(F5), pl.make_point(0, 1, 1)) == 0);
  PlaneCurve xy = conic(F5, {0, 1, 0, 0, 0, 0});
  CHECK(evaluate(xy, pl.make_point(1, 0, 0)) == 0);
  CHECK(evaluate(xy, pl.make_point(1, 1, 0)) != 0);
}

TEST_CASE("rational points of the Fermat conic match a from-scratch scan") {
  auto F5 = gf::make_field(5, 1);
  Plane pl(F5);
  auto pts = rational_points(fermat_conic(F5), pl);
  CHECK(pts.size() == 6);  // q + 1
  // Independent scan with plain integer arithmetic mod 5.
  std::vector<u64> expect;
  for (u64 i = 0; i < pl.size(); ++i) {
    auto pt = pl.point(i);
    u32 v = (pt.c[0] * pt.c[0] + pt.c[1] * pt.c[1] + 4 * pt.c[2] * pt.c[2]) % 5;
    if (v == 0) expect.push_back(i);
  }
  CHECK(pts == expect);
}

TEST_CASE("restriction to a line in its canonical basis") {
  auto F5 = gf::make_field(5, 1);
  Plane pl(F5);
  // z = 0 in basis ([0:1:0], [1:0:0]): C(s*(0,1,0) + t*(1,0,0)) = t^2 + s^2.
  BinaryForm b = restrict_to_line(fermat_conic(F5), pl, pl.make_line(0, 0, 1));
  CHECK(!b.zero);
  CHECK(b.degree == 2);
  CHECK(b.coeff == std::vector<Fq>{1, 0, 1});
  // A contained line restricts to zero.
  PlaneCurve xy = conic(F5, {0, 1, 0, 0, 0, 0});
  CHECK(restrict_to_line(xy, pl, pl.make_line(1, 0, 0)).zero);

  // Dehomogenization keeps the coefficient list.
  gf::Poly f = binary_to_univariate(b);
  CHECK(f.c == std::vector<Fq>{1, 0, 1});
}

TEST_CASE("line profiles split into component, tangency, transverse") {
  auto F5 = gf::make_field(5, 1);
  auto F3 = gf::make_field(3, 1);
  Plane pl5(F5), pl3(F3);

  LineProfile t5 = line_profile(fermat_conic(F5), pl5, pl5.make_line(0, 0, 1));
  CHECK(t5.kind == LineProfile::Transverse);
  CHECK(t5.partition == std::vector<u32>{1, 1});  // -1 is a square mod 5

  LineProfile t3 = line_profile(fermat_conic(F3), pl3, pl3.make_line(0, 0, 1));
  CHECK(t3.kind == LineProfile::Transverse);
  CHECK(t3.partition == std::vector<u32>{2});  // s^2 + t^2 stays irreducible

  // Tangent at [0:1:1]: the gradient line y - z = 0.
  LineProfile tan =
      line_profile(fermat_conic(F5), pl5, pl5.make_line(0, 1, F5->neg(1)));
  CHECK(tan.kind == LineProfile::Tangency);

  PlaneCurve xy = conic(F5, {0, 1, 0, 0, 0, 0});
  CHECK(line_profile(xy, pl5, pl5.make_line(1, 0, 0)).kind ==
        LineProfile::Component);

  // Factor-degree pairs agree with the profiles.
  CHECK(restriction_factor_degrees(fermat_conic(F5), pl5,
                                   pl5.make_line(0, 0, 1)) ==
        std::vector<std::pair<u32, u32>>{{1, 1}, {1, 1}});
  CHECK(restriction_factor_degrees(fermat_conic(F3), pl3,
                                   pl3.make_line(0, 0, 1)) ==
        std::vector<std::pair<u32, u32>>{{2, 1}});
  CHECK(restriction_factor_degrees(xy, pl5, pl5.make_line(1, 0, 0)).empty());
}

TEST_CASE("transverse partitions always sum to the degree") {
  // The at-infinity factor must be counted: check over every line for a few
  // curves of degree 2 and 3.
  auto F7 = gf::make_field(7, 1);
  Plane pl(F7);
  std::vector<PlaneCurve> cs = {
      fermat_conic(F7), pencil_curve(F7, 3, 2).curve,
      make_curve(F7, 3, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1})};  // x^3+y^3+z^3
  for (const auto& c : cs)
    for (u64 i = 0; i < pl.size(); ++i) {
      LineProfile prof = line_profile(c, pl, pl.line(i));
      if (prof.kind != LineProfile::Transverse) continue;
      u32 total = 0;
      for (u32 part : prof.partition) total += part;
      CHECK(total == c.degree);
      CHECK(std::is_sorted(prof.partition.rbegin(), prof.partition.rend()));
    }
}

TEST_CASE("divisibility of forms") {
  auto F5 = gf::make_field(5, 1);
  PlaneCurve x = make_curve(F5, 1, {1, 0, 0});
  PlaneCurve y = make_curve(F5, 1, {0, 1, 0});
  PlaneCurve xy = conic(F5, {0, 1, 0, 0, 0, 0});
  PlaneCurve xplusy = make_curve(F5, 1, {1, 1, 0});
  PlaneCurve diffsq = conic(F5, {1, 0, 0, F5->neg(1), 0, 0});  // x^2 - y^2
  CHECK(divides(x, xy));
  CHECK(divides(y, xy));
  CHECK(divides(xplusy, diffsq));
  CHECK(!divides(x, fermat_conic(F5)));
  CHECK(!divides(xplusy, xy));
}

TEST_CASE("irreducibility over the base field on stock examples") {
  auto F3 = gf::make_field(3, 1);
  auto F5 = gf::make_field(5, 1);
  CHECK(!is_irreducible_fq(conic(F5, {0, 1, 0, 0, 0, 0})));  // xy
  CHECK(is_irreducible_fq(fermat_conic(F5)));
  // x^2 + y^2: irreducible over F_3, splits over F_5 (since -1 = 2^2).
  CHECK(is_irreducible_fq(conic(F3, {1, 0, 0, 1, 0, 0})));
  CHECK(!is_irreducible_fq(conic(F5, {1, 0, 0, 1, 0, 0})));
}

TEST_CASE("geometric irreducibility certificates") {
  auto F3 = gf::make_field(3, 1);
  auto F5 = gf::make_field(5, 1);

  auto good = geometric_irreducibility(fermat_conic(F5));
  CHECK(good.status == IrreducibilityCertificate::GeomIrreducible);
  CHECK(good.witness == IrreducibilityCertificate::DeterminantRank);

  auto split = geometric_irreducibility(conic(F5, {0, 1, 0, 0, 0, 0}));
  CHECK(split.status == IrreducibilityCertificate::FqReducible);

  auto conj = geometric_irreducibility(conic(F3, {1, 0, 0, 1, 0, 0}));
  CHECK(conj.status == IrreducibilityCertificate::FqIrredGeomReducible);
  CHECK(conj.witness == IrreducibilityCertificate::ExtLineFactor);
  CHECK(conj.ext_degree == 2);
  // The witness line really divides the form over F_9.
  auto [F9, emb] = gf::extend_field(F3, 2);
  PlaneCurve big = embed_curve(conic(F3, {1, 0, 0, 1, 0, 0}), emb, F9);
  REQUIRE(conj.line_coeff.size() == 3);
  PlaneCurve witness_line = make_curve(
      F9, 1, {conj.line_coeff[0], conj.line_coeff[1], conj.line_coeff[2]});
  CHECK(divides(witness_line, big));
}

TEST_CASE("conic determinant vanishes exactly on geometrically split conics") {
  for (u32 p : {3u, 5u, 7u}) {
    auto F = gf::make_field(p, 1);
    u64 checked = 0, verified_factors = 0;
    enumerate_normalized_forms(F, 2, [&](PlaneCurve& c) {
      Fq det = conic_symmetric_det(c);
      auto lf = line_factor_over_extension(c, 2);
      CHECK((det == 0) == lf.has_value());
      if (lf.has_value() && verified_factors < 200) {
        auto [big, emb] = gf::extend_field(F, 2);
        PlaneCurve bc = embed_curve(c, emb, big);
        PlaneCurve ln =
            make_curve(big, 1, {(*lf)[0], (*lf)[1], (*lf)[2]});
        CHECK(divides(ln, bc));
        ++verified_factors;
      }
      ++checked;
      return true;
    });
    u64 n = 1;
    for (int i = 0; i < 6; ++i) n *= p;
    CHECK(checked == (n - 1) / (p - 1));
  }
}

TEST_CASE("conic determinant agrees with cofactor expansion") {
  for (u32 p : {3u, 5u, 7u, 11u}) {
    auto F = gf::make_field(p, 1);
    Rng rng(2024 + p);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Fq> c(6);
      bool any = false;
      for (auto& x : c) {
        x = static_cast<Fq>(rng.bounded(p));
        any = any || x != 0;
      }
      if (!any) continue;
      PlaneCurve cv = make_curve(F, 2, c);
      // Matrix [[2a,d,e],[d,2b,f],[e,f,2c]] for a x^2 + b y^2 + c z^2 +
      // d xy + e xz + f yz, in graded-lex coeff order [a, d, e, b, f, c].
      Fq a = cv.coeffs[0], d = cv.coeffs[1], e = cv.coeffs[2];
      Fq b = cv.coeffs[3], f = cv.coeffs[4], cz = cv.coeffs[5];
      auto M = [&](Fq u, Fq v) { return F->mul(u, v); };
      Fq two = F->from_int(2);
      Fq m00 = M(two, a), m11 = M(two, b), m22 = M(two, cz);
      Fq det = F->sub(
          F->add(F->mul(m00, F->sub(M(m11, m22), M(f, f))),
                 F->mul(e, F->sub(M(d, f), M(m11, e)))),
          F->mul(d, F->sub(M(d, m22), M(f, e))));
      CHECK(conic_symmetric_det(cv) == det);
    }
  }
}

TEST_CASE("pencil curves: shape, certificate, and exactly q+1 points") {
  auto F7 = gf::make_field(7, 1);
  CertifiedCurve c0 = pencil_curve(F7, 3, 0);
  // y z^2 = x^3: normalized x^3 - y z^2.
  CHECK(c0.curve.coeffs ==
        std::vector<Fq>{1, 0, 0, 0, 0, 0, 0, 0, 6, 0});
  CHECK(c0.cert.status == IrreducibilityCertificate::GeomIrreducible);
  CHECK(c0.cert.witness == IrreducibilityCertificate::FamilyPencil);

  for (auto [p, r, d] : std::vector<std::array<u32, 3>>{
           {7, 1, 3}, {3, 2, 4}, {2, 3, 5}, {5, 2, 3}, {13, 1, 2}}) {
    auto F = gf::make_field(p, r);
    Plane pl(F);
    for (Fq alpha : {static_cast<Fq>(0), static_cast<Fq>(1),
                     static_cast<Fq>(F->q - 1)}) {
      auto cc = pencil_curve(F, d, alpha);
      auto pts = rational_points(cc.curve, pl);
      // The graph points [x : x^d - alpha : 1] plus [0:1:0].
      std::set<u64> expect;
      expect.insert(pl.point_index(pl.make_point(0, 1, 0)));
      for (u32 x = 0; x < F->q; ++x)
        expect.insert(pl.point_index(
            pl.make_point(x, F->sub(F->pow(x, d), alpha), 1)));
      CHECK(pts.size() == F->q + 1);
      CHECK(std::vector<u64>(expect.begin(), expect.end()) == pts);
    }
  }
}

TEST_CASE("graph curves are reproducible and certified") {
  auto F7 = gf::make_field(7, 1);
  Rng a(55), b(55);
  CertifiedCurve c1 = graph_curve(F7, 3, a);
  CertifiedCurve c2 = graph_curve(F7, 3, b);
  CHECK(c1.curve == c2.curve);
  CHECK(c1.cert.status == IrreducibilityCertificate::GeomIrreducible);
  CHECK(c1.cert.witness == IrreducibilityCertificate::FamilyGraph);
  CHECK(c1.curve.degree == 3);
  // A later draw from the same stream gives a different curve.
  CertifiedCurve c3 = graph_curve(F7, 3, a);
  CHECK(!(c3.curve == c1.curve));
}

TEST_CASE("diagonal curves need invertible degree and nonzero coefficients") {
  auto F7 = gf::make_field(7, 1);
  CertifiedCurve f = fermat_curve(F7, 3, 1, 1, 6);
  CHECK(f.cert.status == IrreducibilityCertificate::GeomIrreducible);
  CHECK(f.cert.witness == IrreducibilityCertificate::FamilyFermat);
  CHECK(f.curve.coeffs ==
        std::vector<Fq>{1, 0, 0, 0, 0, 0, 1, 0, 0, 6});
  CHECK_THROWS_AS((void)fermat_curve(F7, 7, 1, 1, 1), InvalidInput);
  CHECK_THROWS_AS((void)fermat_curve(F7, 3, 0, 1, 1), InvalidInput);
}

TEST_CASE("enumeration covers every normalized form exactly once") {
  auto F2 = gf::make_field(2, 1);
  auto F3 = gf::make_field(3, 1);
  CHECK(enumerate_count(F3, 1) == 13);
  CHECK(enumerate_count(F2, 2) == 63);
  CHECK(enumerate_count(F3, 2) == 364);

  std::set<std::vector<Fq>> seen;
  enumerate_normalized_forms(F3, 1, [&](PlaneCurve& c) {
    CHECK(c.degree == 1);
    u32 lead = 0;
    while (lead < c.coeffs.size() && c.coeffs[lead] == 0) ++lead;
    REQUIRE(lead < c.coeffs.size());
    CHECK(c.coeffs[lead] == 1);
    CHECK(seen.insert(c.coeffs).second);
    return true;
  });
  CHECK(seen.size() == 13);

  u64 calls = 0;
  enumerate_normalized_forms(F3, 2, [&](PlaneCurve&) {
    ++calls;
    return calls < 5;
  });
  CHECK(calls == 5);
}
