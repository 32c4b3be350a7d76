#include "blockforge/conics.hpp"

#include <algorithm>
#include <atomic>

namespace blockforge::conics {

namespace {

void require_odd(const FieldCtxPtr& ctx) {
  require(static_cast<bool>(ctx), "null field context");
  require(ctx->p != 2, "conic machinery needs odd characteristic");
}

std::array<Fq, 6> coeff_tuple(const ConicForm& c) {
  return {c.a200, c.a110, c.a101, c.a020, c.a011, c.a002};
}

}  // namespace

ConicForm make_conic(FieldCtxPtr ctx, Fq a200, Fq a020, Fq a002, Fq a110,
                     Fq a101, Fq a011) {
  require_odd(ctx);
  // Reuse the form normalization and the determinant test.
  PlaneCurve cv =
      curve::make_curve(ctx, 2, {a200, a110, a101, a020, a011, a002});
  return conic_from_curve(cv);
}

ConicForm conic_from_curve(const PlaneCurve& c) {
  require_odd(c.ctx);
  require(c.degree == 2, "conic expected");
  require(!curve::is_zero_form(c), "zero form is not a conic");
  ConicForm out;
  out.ctx = c.ctx;
  out.a200 = c.coeffs[0];
  out.a110 = c.coeffs[1];
  out.a101 = c.coeffs[2];
  out.a020 = c.coeffs[3];
  out.a011 = c.coeffs[4];
  out.a002 = c.coeffs[5];
  out.nonsingular = curve::conic_symmetric_det(c) != 0;
  return out;
}

PlaneCurve conic_to_curve(const ConicForm& c) {
  return curve::make_curve(
      c.ctx, 2, {c.a200, c.a110, c.a101, c.a020, c.a011, c.a002});
}

ConicForm random_nonsingular_conic(const FieldCtxPtr& ctx, Rng& rng) {
  require_odd(ctx);
  const u32 q = ctx->q;
  for (int attempt = 0; attempt < 4096; ++attempt) {
    std::array<Fq, 6> a{};
    bool any = false;
    for (auto& x : a) {
      x = static_cast<Fq>(rng.bounded(q));
      any = any || x != 0;
    }
    if (!any) continue;
    // Order: a200 xx, a110 xy, a101 xz, a020 yy, a011 yz, a002 zz.
    PlaneCurve cv = curve::make_curve(ctx, 2,
                                      {a[0], a[1], a[2], a[3], a[4], a[5]});
    if (curve::conic_symmetric_det(cv) == 0) continue;
    ConicForm out = conic_from_curve(cv);
    invariant(out.nonsingular, "determinant verdict changed by normalization");
    return out;
  }
  throw InternalInvariant("nonsingular conic sampling kept failing");
}

Fq DualDiscriminant::eval(Fq alpha, Fq beta) const {
  const FieldCtx& F = *ctx;
  // Horner in alpha of the three row polynomials in beta.
  Fq acc = 0;
  for (int i = 2; i >= 0; --i) {
    Fq row = 0;
    for (int j = 2; j >= 0; --j) row = F.add(F.mul(row, beta), grid[i][j]);
    acc = F.add(F.mul(acc, alpha), row);
  }
  return acc;
}

PlaneCurve DualDiscriminant::as_projective_curve() const {
  require(grid[2][0] != 0 || grid[1][1] != 0 || grid[0][2] != 0,
          "homogenization needs total degree exactly 2");
  // alpha^2, alpha beta, alpha gamma, beta^2, beta gamma, gamma^2.
  return curve::make_curve(ctx, 2,
                           {grid[2][0], grid[1][1], grid[1][0], grid[0][2],
                            grid[0][1], grid[0][0]});
}

DualDiscriminant dual_discriminant(const ConicForm& c) {
  require_odd(c.ctx);
  const FieldCtx& F = *c.ctx;
  DualDiscriminant out;
  out.ctx = c.ctx;

  // S(alpha, beta) = 2 a002 alpha beta + a011 alpha + a101 beta + a110,
  // A(alpha) = a200 + a101 alpha + a002 alpha^2,
  // C(beta)  = a020 + a011 beta  + a002 beta^2: D = S^2 - 4 A C, expanded
  // as coefficient grids so the cancellation of the top terms is visible.
  Fq s[3][3] = {};
  s[1][1] = F.mul(F.from_int(2), c.a002);
  s[1][0] = c.a011;
  s[0][1] = c.a101;
  s[0][0] = c.a110;
  Fq a[3] = {c.a200, c.a101, c.a002};
  Fq cc[3] = {c.a020, c.a011, c.a002};

  Fq grid[3][3] = {};
  for (int i1 = 0; i1 < 2; ++i1)
    for (int j1 = 0; j1 < 2; ++j1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j2 = 0; j2 < 2; ++j2)
          grid[i1 + i2][j1 + j2] = F.add(grid[i1 + i2][j1 + j2],
                                         F.mul(s[i1][j1], s[i2][j2]));
  const Fq four = F.from_int(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      grid[i][j] = F.sub(grid[i][j], F.mul(four, F.mul(a[i], cc[j])));

  invariant(grid[2][2] == 0 && grid[2][1] == 0 && grid[1][2] == 0,
            "mixed top coefficients of the discriminant must cancel");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.grid[i][j] = grid[i][j];
  return out;
}

bool proportional(const DualDiscriminant& a, const DualDiscriminant& b) {
  require(a.ctx == b.ctx, "mismatched fields");
  const FieldCtx& F = *a.ctx;
  Fq ratio = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Fq x = a.grid[i][j], y = b.grid[i][j];
      if ((x == 0) != (y == 0)) return false;
      if (x == 0) continue;
      Fq r = F.div(x, y);
      if (ratio == 0)
        ratio = r;
      else if (r != ratio)
        return false;
    }
  return true;  // includes the doubly-zero case
}

ChartClass classify_line(const ConicForm& c, Fq b, Fq cc) {
  require_odd(c.ctx);
  require(c.nonsingular, "classification needs a nonsingular conic");
  const FieldCtx& F = *c.ctx;
  require(F.valid(b) && F.valid(cc), "chart coordinates out of range");
  // Quadratic coefficients of the restriction z = bx + cy.
  Fq qa = F.add(c.a200, F.add(F.mul(c.a002, F.mul(b, b)), F.mul(c.a101, b)));
  Fq qc = F.add(c.a020, F.add(F.mul(c.a002, F.mul(cc, cc)), F.mul(c.a011, cc)));
  if (qa == 0 || qc == 0) return ChartClass::ConditionOneFails;
  Fq d = dual_discriminant(c).eval(b, cc);
  if (d == 0) return ChartClass::Tangent;
  return F.is_square(d) ? ChartClass::Secant : ChartClass::Skew;
}

DirectClass direct_classify(const ConicForm& c, const Plane& pl,
                            const ProjLine& ln) {
  require(c.nonsingular, "direct classification needs a nonsingular conic");
  auto parts = curve::restriction_factor_degrees(conic_to_curve(c), pl, ln);
  invariant(!parts.empty(), "a line cannot be a component of this conic");
  u32 rational = 0;
  for (auto [deg, mult] : parts)
    if (deg == 1) ++rational;
  switch (rational) {
    case 0:
      return DirectClass::Skew;
    case 1:
      return DirectClass::Tangent;
    case 2:
      return DirectClass::Secant;
    default:
      throw InternalInvariant("conic met a line in more than two points");
  }
}

u64 verify_trichotomy(const ConicForm& c, int threads) {
  require_odd(c.ctx);
  require(c.nonsingular, "trichotomy check needs a nonsingular conic");
  const u32 q = c.ctx->q;
  Plane pl(c.ctx);
  int workers = resolve_threads(threads);
  std::vector<u64> fails(static_cast<std::size_t>(workers < 1 ? 1 : workers),
                         0);
  std::atomic<bool> mismatch{false};
  parallel_for(q, workers, [&](int w, std::size_t bbegin, std::size_t bend) {
    for (std::size_t b = bbegin; b < bend; ++b) {
      for (u32 v = 0; v < q; ++v) {
        ChartClass cls = classify_line(c, static_cast<Fq>(b), v);
        if (cls == ChartClass::ConditionOneFails) {
          ++fails[static_cast<std::size_t>(w)];
          continue;
        }
        DirectClass direct = direct_classify(
            c, pl, pl.line_from_bc(static_cast<Fq>(b), v));
        bool ok = (cls == ChartClass::Skew && direct == DirectClass::Skew) ||
                  (cls == ChartClass::Tangent &&
                   direct == DirectClass::Tangent) ||
                  (cls == ChartClass::Secant && direct == DirectClass::Secant);
        if (!ok) mismatch.store(true, std::memory_order_relaxed);
      }
    }
  });
  invariant(!mismatch.load(),
            "chart and direct classifications disagree under condition one");
  u64 total = 0;
  for (u64 f : fails) total += f;
  invariant(total <= 4ULL * q, "too many condition-one failures");
  return total;
}

LineClassTotals conic_line_class_totals(const ConicForm& c, int threads) {
  require(c.nonsingular, "class totals need a nonsingular conic");
  Plane pl(c.ctx);
  const u64 n = pl.size();
  int workers = resolve_threads(threads);
  std::vector<LineClassTotals> shard(
      static_cast<std::size_t>(workers < 1 ? 1 : workers));
  parallel_for(n, workers, [&](int w, std::size_t begin, std::size_t end) {
    auto& s = shard[static_cast<std::size_t>(w)];
    for (std::size_t idx = begin; idx < end; ++idx) {
      switch (direct_classify(c, pl, pl.line(idx))) {
        case DirectClass::Tangent:
          ++s.tangent;
          break;
        case DirectClass::Secant:
          ++s.secant;
          break;
        case DirectClass::Skew:
          ++s.external;
          break;
      }
    }
  });
  LineClassTotals out;
  for (const auto& s : shard) {
    out.tangent += s.tangent;
    out.secant += s.secant;
    out.external += s.external;
  }
  return out;
}

SkewCensusResult simultaneous_nonsquare_census(
    const FieldCtxPtr& ctx, const std::vector<ConicForm>& conics,
    int threads) {
  require_odd(ctx);
  SkewCensusResult out;
  out.ell = static_cast<u32>(conics.size());
  for (const auto& c : conics) {
    require(c.ctx == ctx, "census conics must live in the given field");
    require(c.nonsingular, "census conics must be nonsingular");
  }
  for (std::size_t i = 0; i < conics.size(); ++i)
    for (std::size_t j = i + 1; j < conics.size(); ++j)
      require(!(coeff_tuple(conics[i]) == coeff_tuple(conics[j])),
              "census conics must be pairwise distinct");
  const FieldCtx& F = *ctx;
  const u32 q = F.q;
  out.q = q;

  std::vector<DualDiscriminant> discs;
  for (const auto& c : conics) discs.push_back(dual_discriminant(c));
  std::vector<PlaneCurve> curves;
  for (const auto& c : conics) curves.push_back(conic_to_curve(c));
  Plane pl(ctx);

  int workers = resolve_threads(threads);
  struct Shard {
    u64 nonsquare = 0;
    u64 skew = 0;
  };
  std::vector<Shard> shard(static_cast<std::size_t>(workers < 1 ? 1 : workers));
  parallel_for(q, workers, [&](int w, std::size_t bbegin, std::size_t bend) {
    auto& s = shard[static_cast<std::size_t>(w)];
    for (std::size_t b = bbegin; b < bend; ++b) {
      for (u32 v = 0; v < q; ++v) {
        bool all_nonsquare = true;
        for (const auto& d : discs) {
          Fq val = d.eval(static_cast<Fq>(b), v);
          if (F.is_square(val)) {  // zero counts as a square
            all_nonsquare = false;
            break;
          }
        }
        if (all_nonsquare) ++s.nonsquare;

        bool all_skew = true;
        ProjLine ln = pl.line_from_bc(static_cast<Fq>(b), v);
        for (const auto& cv : curves) {
          auto parts = curve::restriction_factor_degrees(cv, pl, ln);
          bool has_rational = false;
          for (auto [deg, mult] : parts)
            if (deg == 1) has_rational = true;
          if (has_rational) {
            all_skew = false;
            break;
          }
        }
        if (all_skew) ++s.skew;
      }
    }
  });
  for (const auto& s : shard) {
    out.nonsquare_count += s.nonsquare;
    out.skew_all_count += s.skew;
  }
  invariant(out.nonsquare_count == out.skew_all_count,
            "character census and direct skew scan disagree");

  out.main_term =
      static_cast<double>(q) * static_cast<double>(q) /
      static_cast<double>(u64(1) << std::min<u32>(out.ell, 62));
  out.tolerance = static_cast<double>(u64(1) << std::min<u32>(out.ell, 62)) *
                  (2.0 * out.ell + 1.0) * static_cast<double>(q);
  double dev = static_cast<double>(out.skew_all_count) - out.main_term;
  out.within_tolerance = (dev < 0 ? -dev : dev) <= out.tolerance;
  out.positive = out.skew_all_count > 0;
  return out;
}

}  // namespace blockforge::conics
