#include "blockforge/cover.hpp"

#include <algorithm>
#include <cmath>

namespace blockforge::cover {

namespace {

std::size_t word_count(u64 bits) { return static_cast<std::size_t>((bits + 63) / 64); }

void check_pool(const std::vector<CertifiedCurve>& pool) {
  require(!pool.empty(), "empty candidate pool");
  for (const auto& c : pool)
    require(c.cert.status ==
                curve::IrreducibilityCertificate::GeomIrreducible,
            "every pool curve needs a geometric-irreducibility certificate");
  for (std::size_t i = 1; i < pool.size(); ++i)
    require(pool[i].curve.ctx == pool[0].curve.ctx,
            "pool curves must share one field");
}

u64 factorial_u64(u32 n) {
  u64 f = 1;
  for (u32 k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

u64 BipartiteInstance::degree_of_a(u64 a) const {
  u64 deg = 0;
  for (const auto& mask : b_masks) deg += (mask[a >> 6] >> (a & 63)) & 1;
  return deg;
}

u64 BipartiteInstance::delta() const {
  require(a_size >= 1, "empty A side");
  u64 best = b_size();
  for (u64 a = 0; a < a_size; ++a) best = std::min(best, degree_of_a(a));
  return best;
}

BipartiteInstance complete_bipartite(u64 a, u64 b) {
  BipartiteInstance inst;
  inst.a_size = a;
  inst.b_masks.assign(b, std::vector<u64>(word_count(a), 0));
  for (auto& mask : inst.b_masks) {
    for (u64 i = 0; i < a; ++i) mask[i >> 6] |= u64(1) << (i & 63);
  }
  return inst;
}

BipartiteInstance perfect_matching(u64 n) {
  BipartiteInstance inst;
  inst.a_size = n;
  inst.b_masks.assign(n, std::vector<u64>(word_count(n), 0));
  for (u64 i = 0; i < n; ++i) inst.b_masks[i][i >> 6] |= u64(1) << (i & 63);
  return inst;
}

DominationResult tfold_dominate(const BipartiteInstance& inst, u32 t,
                                u64 seed, const ExtraPatch& extra) {
  require(t >= 1, "domination level must be at least 1");
  require(inst.a_size >= 2, "need at least two vertices to dominate");
  require(inst.b_size() >= 1, "empty candidate side");
  const u64 nb = inst.b_size();
  const u64 delta = inst.delta();
  require(delta >= t, "some vertex has fewer than t neighbours");

  const double ln_a = std::log(static_cast<double>(inst.a_size));
  const double p = std::min(1.0, t * ln_a / static_cast<double>(delta));
  const u64 bound = static_cast<u64>(
      std::ceil(static_cast<double>(nb) * t * ln_a /
                static_cast<double>(delta)));

  Rng base(seed);
  for (u64 attempt = 0; attempt < 1000; ++attempt) {
    Rng rng = base.fork(attempt);
    std::vector<u8> member(nb, 0);
    u64 sampled = 0;
    for (u64 b = 0; b < nb; ++b)
      if (rng.uniform01() < p) {
        member[b] = 1;
        ++sampled;
      }

    std::vector<u32> cnt(inst.a_size, 0);
    auto add_counts = [&](u64 b) {
      const auto& mask = inst.b_masks[b];
      for (std::size_t w = 0; w < mask.size(); ++w) {
        u64 word = mask[w];
        while (word) {
          cnt[(w << 6) + static_cast<std::size_t>(__builtin_ctzll(word))]++;
          word &= word - 1;
        }
      }
    };
    for (u64 b = 0; b < nb; ++b)
      if (member[b]) add_counts(b);

    u64 patched = 0;
    std::vector<u64> needy(word_count(inst.a_size), 0);
    for (;;) {
      std::fill(needy.begin(), needy.end(), 0);
      bool any = false;
      for (u64 a = 0; a < inst.a_size; ++a)
        if (cnt[a] < t) {
          needy[a >> 6] |= u64(1) << (a & 63);
          any = true;
        }
      if (!any) break;
      u64 best_b = nb, best_gain = 0;
      for (u64 b = 0; b < nb; ++b) {
        if (member[b]) continue;
        u64 gain = 0;
        for (std::size_t w = 0; w < needy.size(); ++w)
          gain += static_cast<u64>(
              __builtin_popcountll(needy[w] & inst.b_masks[b][w]));
        if (gain > best_gain) {
          best_gain = gain;
          best_b = b;
        }
      }
      invariant(best_b < nb, "no candidate helps an undominated vertex");
      member[best_b] = 1;
      ++patched;
      add_counts(best_b);
    }

    if (extra) extra(member);

    u64 total = 0;
    for (u8 m : member) total += m;
    if (total > bound) continue;

    // Exhaustive re-check from the final membership.
    std::fill(cnt.begin(), cnt.end(), 0);
    for (u64 b = 0; b < nb; ++b)
      if (member[b]) add_counts(b);
    for (u64 a = 0; a < inst.a_size; ++a)
      invariant(cnt[a] >= t, "patched selection fails to dominate");

    DominationResult out;
    for (u64 b = 0; b < nb; ++b)
      if (member[b]) out.selected.push_back(b);
    out.bound = bound;
    out.delta = delta;
    out.sample_p = p;
    out.attempts = attempt + 1;
    out.sampled_count = sampled;
    out.patched_count = patched;
    out.verified = true;
    return out;
  }
  throw InternalInvariant("domination kept exceeding the size bound");
}

DominationResult stein_dominate(const BipartiteInstance& inst, u64 seed) {
  return tfold_dominate(inst, 1, seed);
}

LinesVsCurves lines_vs_curves_instance(const Plane& pl,
                                       const std::vector<CertifiedCurve>& pool,
                                       int threads) {
  check_pool(pool);
  require(pool[0].curve.ctx == pl.ctx(), "pool curves must live in the plane");
  LinesVsCurves out;
  const u64 lines = pl.size();
  out.inst.a_size = lines;
  out.inst.b_masks.assign(pool.size(), std::vector<u64>(word_count(lines), 0));
  out.curve_points.assign(pool.size(), {});
  int workers = resolve_threads(threads);
  parallel_for(pool.size(), workers,
               [&](int, std::size_t begin, std::size_t end) {
                 for (std::size_t b = begin; b < end; ++b) {
                   out.curve_points[b] =
                       curve::rational_points(pool[b].curve, pl);
                   auto& mask = out.inst.b_masks[b];
                   for (u64 pt : out.curve_points[b])
                     for (const auto& ln : pl.lines_through(pl.point(pt))) {
                       u64 li = pl.line_index(ln);
                       mask[li >> 6] |= u64(1) << (li & 63);
                     }
                 }
               });
  return out;
}

BuildResult build_tfold_family(const FieldCtxPtr& ctx, u32 d, u32 t,
                               const std::vector<CertifiedCurve>& pool,
                               u64 seed, int threads) {
  require(static_cast<bool>(ctx), "null field context");
  require(t >= 1, "level must be at least 1");
  require(d >= std::min<u32>(t, 3),
          "degree too small for the requested level");
  check_pool(pool);
  for (const auto& c : pool)
    require(c.curve.degree == d, "pool degree mismatch");
  require(pool[0].curve.ctx == ctx, "pool curves must live in the field");

  Plane pl(ctx);
  const u64 lines = pl.size();
  const u32 q = pl.q();
  int workers = resolve_threads(threads);
  LinesVsCurves lvc = lines_vs_curves_instance(pl, pool, workers);

  // Whole-pool feasibility at point level: the union of every pool curve
  // must already meet each line in at least t points.
  std::vector<u64> pool_union(word_count(lines), 0);  // over point indices
  for (const auto& pts : lvc.curve_points)
    for (u64 pt : pts) pool_union[pt >> 6] |= u64(1) << (pt & 63);
  for (u64 li = 0; li < lines; ++li) {
    u32 have = 0;
    for (u64 pt : pl.point_indices_on_line(pl.line(li)))
      have += (pool_union[pt >> 6] >> (pt & 63)) & 1;
    if (have < t)
      throw InvalidInput(
          "pool cannot reach the requested level on every line");
  }

  ExtraPatch patch = [&](std::vector<u8>& member) {
    std::vector<u64> covered(word_count(lines), 0);  // point indices
    auto add_points = [&](u64 b) {
      for (u64 pt : lvc.curve_points[b])
        covered[pt >> 6] |= u64(1) << (pt & 63);
    };
    for (u64 b = 0; b < member.size(); ++b)
      if (member[b]) add_points(b);
    std::vector<u32> have(lines, 0);
    std::vector<std::vector<u64>> line_points(lines);
    for (u64 li = 0; li < lines; ++li) {
      line_points[li] = pl.point_indices_on_line(pl.line(li));
      for (u64 pt : line_points[li])
        have[li] += (covered[pt >> 6] >> (pt & 63)) & 1;
    }
    for (;;) {
      bool any_need = false;
      for (u64 li = 0; li < lines && !any_need; ++li)
        if (have[li] < t) any_need = true;
      if (!any_need) break;
      u64 best_b = member.size(), best_gain = 0;
      std::vector<u32> tally(lines, 0);
      for (u64 b = 0; b < member.size(); ++b) {
        if (member[b]) continue;
        std::vector<u64> fresh;
        for (u64 pt : lvc.curve_points[b])
          if (!((covered[pt >> 6] >> (pt & 63)) & 1)) fresh.push_back(pt);
        if (fresh.empty()) continue;
        std::fill(tally.begin(), tally.end(), 0);
        for (u64 pt : fresh)
          for (const auto& ln : pl.lines_through(pl.point(pt)))
            ++tally[pl.line_index(ln)];
        u64 gain = 0;
        for (u64 li = 0; li < lines; ++li)
          if (have[li] < t)
            gain += std::min<u64>(t - have[li], tally[li]);
        if (gain > best_gain) {
          best_gain = gain;
          best_b = b;
        }
      }
      invariant(best_b < member.size() && best_gain > 0,
                "pointwise patching stalled despite a feasible pool");
      for (u64 pt : lvc.curve_points[best_b])
        if (!((covered[pt >> 6] >> (pt & 63)) & 1)) {
          covered[pt >> 6] |= u64(1) << (pt & 63);
          for (const auto& ln : pl.lines_through(pl.point(pt)))
            ++have[pl.line_index(ln)];
        }
      member[best_b] = 1;
    }
  };

  BuildResult out;
  out.t = t;
  out.dom = tfold_dominate(lvc.inst, t, seed, patch);
  out.selected = out.dom.selected;
  std::vector<u64> union_words(word_count(pl.size()), 0);
  for (u64 b : out.selected) {
    out.curves.push_back(pool[b].curve);
    for (u64 pt : lvc.curve_points[b])
      union_words[pt >> 6] |= u64(1) << (pt & 63);
  }
  std::vector<u64> union_points;
  for (u64 pt = 0; pt < pl.size(); ++pt)
    if ((union_words[pt >> 6] >> (pt & 63)) & 1) union_points.push_back(pt);
  out.report = blocking::analyze(pl, union_points, workers);
  invariant(out.report.is_blocking && out.report.t_level >= t,
            "built family fails the exhaustive level check");
  if (t == 1)
    out.log_reference = 4.0 * std::log(static_cast<double>(q));
  else
    out.log_reference = 2.0 *
                        static_cast<double>(factorial_u64(t + 1)) /
                        static_cast<double>(t) *
                        std::log(static_cast<double>(q));
  return out;
}

BuildResult build_blocking_family(const FieldCtxPtr& ctx, u32 d,
                                  const std::vector<CertifiedCurve>& pool,
                                  u64 seed, int threads) {
  return build_tfold_family(ctx, d, 1, pool, seed, threads);
}

namespace {

void check_psi_budget(u32 d, u64 q) {
  require(d == 2 || d == 3, "only conics and cubics are enumerable");
  bool ok = (d == 2 && q <= 5) || (d == 3 && q <= 3);
  if (!ok)
    throw BudgetExceeded("full form enumeration beyond the supported sizes");
}

// A geometrically reducible conic has a line factor over F_{q^2} (either a
// rational line or a conjugate pair). A geometrically reducible cubic has a
// line factor over F_q in every splitting type except the conjugate triple,
// which instead has one over F_{q^3}. F_q lines embed into either scan, so
// scanning all lines of the extension plane is a complete test.
bool irreducible_by_line_scan(const curve::PlaneCurve& c,
                              const Plane& big_pl,
                              const gf::FieldEmbedding& emb,
                              const FieldCtxPtr& big) {
  if (c.degree == 3) {
    // F_q lines first: cheaper, and the F_{q^3} scan then certifies the
    // conjugate-triple case.
    Plane small_pl(c.ctx);
    for (u64 li = 0; li < small_pl.size(); ++li)
      if (curve::restrict_to_line(c, small_pl, small_pl.line(li)).zero)
        return false;
  }
  curve::PlaneCurve lifted = curve::embed_curve(c, emb, big);
  for (u64 li = 0; li < big_pl.size(); ++li)
    if (curve::restrict_to_line(lifted, big_pl, big_pl.line(li)).zero)
      return false;
  return true;
}

}  // namespace

u64 count_irreducible_through(const std::vector<ProjPoint>& s, u32 d,
                              const FieldCtxPtr& ctx) {
  require(static_cast<bool>(ctx), "null field context");
  check_psi_budget(d, ctx->q);
  u64 count = 0;
  curve::enumerate_normalized_forms(ctx, d, [&](curve::PlaneCurve& c) {
    for (const auto& pt : s)
      if (curve::evaluate(c, pt) != 0) return true;
    if (curve::geometric_irreducibility(c).status ==
        curve::IrreducibilityCertificate::GeomIrreducible)
      ++count;
    return true;
  });
  return count;
}

u64 count_irreducible_through_direct(const std::vector<ProjPoint>& s, u32 d,
                                     const FieldCtxPtr& ctx) {
  require(static_cast<bool>(ctx), "null field context");
  check_psi_budget(d, ctx->q);
  const u32 m = d == 2 ? 2 : 3;
  auto [big, emb] = gf::extend_field(ctx, m);
  Plane big_pl(big);
  u64 count = 0;
  curve::enumerate_normalized_forms(ctx, d, [&](curve::PlaneCurve& c) {
    for (const auto& pt : s)
      if (curve::evaluate(c, pt) != 0) return true;
    if (irreducible_by_line_scan(c, big_pl, emb, big)) ++count;
    return true;
  });
  return count;
}

PsiReport psi_survey(const FieldCtxPtr& ctx, u32 d, bool independent_route,
                     int threads) {
  require(static_cast<bool>(ctx), "null field context");
  check_psi_budget(d, ctx->q);
  const u64 q = ctx->q;
  Plane pl(ctx);
  const u64 n = pl.size();

  std::vector<curve::PlaneCurve> forms;
  curve::enumerate_normalized_forms(ctx, d, [&](curve::PlaneCurve& c) {
    forms.push_back(c);
    return true;
  });

  const u32 m = d == 2 ? 2 : 3;
  FieldCtxPtr big;
  gf::FieldEmbedding emb;
  if (independent_route) std::tie(big, emb) = gf::extend_field(ctx, m);
  Plane big_pl(independent_route ? big : ctx);

  int workers = resolve_threads(threads);
  struct Shard {
    u64 psi_empty = 0;
    std::vector<u64> psi_point;
    std::vector<u64> psi_pair;  // flattened point-pair matrix
  };
  std::vector<Shard> shard(static_cast<std::size_t>(workers < 1 ? 1 : workers));
  for (auto& s : shard) {
    s.psi_point.assign(n, 0);
    s.psi_pair.assign(n * n, 0);
  }

  parallel_for(forms.size(), workers,
               [&](int w, std::size_t begin, std::size_t end) {
                 Shard& s = shard[static_cast<std::size_t>(w)];
                 for (std::size_t idx = begin; idx < end; ++idx) {
                   const auto& c = forms[idx];
                   bool irred;
                   if (independent_route)
                     irred = irreducible_by_line_scan(c, big_pl, emb, big);
                   else
                     irred =
                         curve::geometric_irreducibility(c).status ==
                         curve::IrreducibilityCertificate::GeomIrreducible;
                   if (!irred) continue;
                   ++s.psi_empty;
                   auto pts = curve::rational_points(c, pl);
                   for (u64 pt : pts) ++s.psi_point[pt];
                   for (std::size_t i = 0; i < pts.size(); ++i)
                     for (std::size_t j = i + 1; j < pts.size(); ++j)
                       ++s.psi_pair[pts[i] * n + pts[j]];
                 }
               });

  PsiReport out;
  out.d = d;
  out.q = q;
  std::vector<u64> pair(n * n, 0);
  out.psi_point.assign(n, 0);
  for (const auto& s : shard) {
    out.psi_empty += s.psi_empty;
    for (u64 i = 0; i < n; ++i) out.psi_point[i] += s.psi_point[i];
    for (u64 i = 0; i < n * n; ++i) pair[i] += s.psi_pair[i];
  }
  out.psi_point_constant =
      std::all_of(out.psi_point.begin(), out.psi_point.end(),
                  [&](u64 v) { return v == out.psi_point[0]; });
  out.psi_pair_max = *std::max_element(pair.begin(), pair.end());

  const u32 nmon = curve::monomial_count(d);
  u64 power = 1;
  for (u32 k = 0; k + 2 < nmon; ++k) power *= q;
  out.pair_bound = (power - 1) / (q - 1);
  return out;
}

bool interpolation_rank_check(const std::vector<ProjPoint>& points, u32 d,
                              const FieldCtxPtr& ctx) {
  require(static_cast<bool>(ctx), "null field context");
  const std::size_t k = points.size();
  require(k >= 1, "at least one point required");
  require(d + 1 >= k, "too many points for this degree");
  std::vector<ProjPoint> norm;
  for (const auto& pt : points) {
    ProjPoint p;
    p.c = plane::normalize_triple(*ctx, pt.c);
    norm.push_back(p);
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      require(!(norm[i] == norm[j]), "duplicate points");

  const auto mons = curve::monomials(d);
  gf::MatrixFq mat = gf::make_matrix(k, mons.size());
  const gf::FieldCtx& F = *ctx;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < mons.size(); ++j) {
      Fq v = 1;
      for (u32 e = 0; e < mons[j][0]; ++e) v = F.mul(v, norm[i].c[0]);
      for (u32 e = 0; e < mons[j][1]; ++e) v = F.mul(v, norm[i].c[1]);
      for (u32 e = 0; e < mons[j][2]; ++e) v = F.mul(v, norm[i].c[2]);
      mat.at(i, j) = v;
    }
  return gf::rank_fq(F, mat) == k;
}

bool binom_convexity_check(u32 d) {
  require(d >= 2, "degree must be at least 2");
  auto binom2 = [](u64 x) { return (x + 2) * (x + 1) / 2; };
  const u64 rhs = binom2(d);
  for (u32 div = 1; div <= d; ++div) {
    if (d % div != 0) continue;
    if (static_cast<u64>(div) * binom2(d / div) > rhs) return false;
  }
  return true;
}

}  // namespace blockforge::cover
