#include "blockforge/pencil.hpp"

#include <algorithm>
#include <functional>

#include <boost/multiprecision/cpp_int.hpp>

namespace blockforge::pencil {

using boost::multiprecision::cpp_int;
using plane::Plane;

std::vector<u64> cover_target(const FieldCtxPtr& ctx, u32 d, Fq alpha) {
  require(static_cast<bool>(ctx), "null field context");
  require(d >= 2, "family degree must be >= 2");
  require(ctx->valid(alpha), "alpha out of range for this field");
  const FieldCtx& F = *ctx;
  const u32 q = F.q;
  std::vector<u8> hit(static_cast<std::size_t>(q) * q, 0);
  // alpha in value_set(u, v) iff v = alpha - a^d - u a for some a.
  for (u32 a = 0; a < q; ++a) {
    Fq base = F.sub(alpha, F.pow(a, d));
    for (u32 u = 0; u < q; ++u) {
      Fq v = F.sub(base, F.mul(static_cast<Fq>(u), a));
      hit[static_cast<std::size_t>(u) * q + v] = 1;
    }
  }
  std::vector<u64> out;
  for (std::size_t cell = 0; cell < hit.size(); ++cell)
    if (hit[cell]) out.push_back(cell);
  return out;
}

u64 greedy_size_bound(u32 d, u64 q) {
  require(d >= 2, "family degree must be >= 2");
  require(q >= 2, "field size must be >= 2");
  const cpp_int rhs_base = cpp_int(q) * q;
  cpp_int lhs = 1;   // d^l
  cpp_int rhs = rhs_base;  // q^2 (d-1)^l
  u64 l = 0;
  while (lhs * d <= rhs * (d - 1)) {
    lhs *= d;
    rhs *= (d - 1);
    ++l;
  }
  return 1 + l;
}

namespace {

// Exact per-step check: covered >= q^2 (1 - ((d-1)/d)^k), i.e.
// (q^2 - covered) d^k <= q^2 (d-1)^k.
struct StepInequality {
  cpp_int dk = 1;
  cpp_int d1k = 1;
  cpp_int q2;
  u32 d;
  StepInequality(u32 d_in, u64 q) : q2(cpp_int(q) * q), d(d_in) {}
  void advance_and_check(u64 covered_total, u64 step_index) {
    dk *= d;
    d1k *= (d - 1);
    invariant((q2 - covered_total) * dk <= q2 * d1k,
              "greedy coverage fell below the guaranteed rate");
    (void)step_index;
  }
};

}  // namespace

PencilResult greedy_construct(const FieldCtxPtr& ctx, u32 d, int threads,
                              u32 q_budget) {
  require(static_cast<bool>(ctx), "null field context");
  require(d >= 2, "family degree must be >= 2");
  const FieldCtx& F = *ctx;
  const u32 q = F.q;
  if (q > q_budget)
    throw BudgetExceeded("greedy construction beyond the field-size budget");
  int workers = resolve_threads(threads);

  PencilResult out;
  out.d = d;
  out.ctx = ctx;
  out.bound = greedy_size_bound(d, q);

  // Precompute a^d once; value rows are generated on the fly.
  std::vector<Fq> powd(q);
  for (u32 a = 0; a < q; ++a) powd[a] = F.pow(a, d);

  const std::size_t cells = static_cast<std::size_t>(q) * q;
  std::vector<u8> uncovered(cells, 1);
  u64 uncovered_count = cells;
  std::vector<u8> chosen(q, 0);
  StepInequality ineq(d, q);
  u64 covered_total = 0;

  // Per-worker tallies of how many uncovered cells each alpha would cover.
  std::vector<std::vector<u64>> tallies(
      static_cast<std::size_t>(workers < 1 ? 1 : workers));

  while (uncovered_count > 0) {
    invariant(out.alphas.size() < q, "ran out of candidate alphas");
    for (auto& t : tallies) t.assign(q, 0);

    // For each uncovered cell (u, v), the alphas it would accept are
    // { a^d + u a + v : a }; tally them with per-cell deduplication.
    parallel_for(q, workers, [&](int w, std::size_t ubegin, std::size_t uend) {
      auto& tally = tallies[static_cast<std::size_t>(w)];
      std::vector<u32> stamp(q, 0xFFFFFFFF);
      for (std::size_t u = ubegin; u < uend; ++u) {
        const std::size_t row = u * q;
        std::vector<Fq> row_val(q);
        for (u32 a = 0; a < q; ++a)
          row_val[a] = F.add(powd[a], F.mul(static_cast<Fq>(u), a));
        for (u32 v = 0; v < q; ++v) {
          if (!uncovered[row + v]) continue;
          const u32 cell_tag = static_cast<u32>(row + v);
          for (u32 a = 0; a < q; ++a) {
            Fq alpha = F.add(row_val[a], static_cast<Fq>(v));
            if (stamp[alpha] != cell_tag) {
              stamp[alpha] = cell_tag;
              ++tally[alpha];
            }
          }
        }
      }
    });

    u64 best_count = 0;
    u32 best_alpha = q;
    for (u32 alpha = 0; alpha < q; ++alpha) {
      if (chosen[alpha]) continue;
      u64 total = 0;
      for (const auto& t : tallies) total += t[alpha];
      if (total > best_count) {
        best_count = total;
        best_alpha = alpha;
      }
    }
    invariant(best_alpha < q && best_count > 0,
              "no candidate alpha covers an uncovered cell");

    chosen[best_alpha] = 1;
    // Remove the newly covered cells (single-threaded between steps).
    u64 removed = 0;
    for (u32 a = 0; a < q; ++a) {
      Fq base = F.sub(static_cast<Fq>(best_alpha), powd[a]);
      for (u32 u = 0; u < q; ++u) {
        Fq v = F.sub(base, F.mul(static_cast<Fq>(u), a));
        std::size_t cell = static_cast<std::size_t>(u) * q + v;
        if (uncovered[cell]) {
          uncovered[cell] = 0;
          ++removed;
        }
      }
    }
    invariant(removed == best_count, "tally disagrees with the removal pass");
    uncovered_count -= removed;
    covered_total += removed;
    out.alphas.push_back(static_cast<Fq>(best_alpha));
    out.steps.push_back({static_cast<Fq>(best_alpha), removed});
    ineq.advance_and_check(covered_total, out.steps.size());
  }

  invariant(out.alphas.size() <= out.bound,
            "greedy output exceeded the guaranteed size bound");

  for (Fq alpha : out.alphas)
    out.curves.push_back(curve::pencil_curve(ctx, d, alpha).curve);
  Plane pl(ctx);
  auto pts = blocking::union_rational_points(out.curves, pl);
  out.union_size = pts.size();
  invariant(out.union_size <= out.alphas.size() * static_cast<u64>(q) + 1,
            "curve union larger than the family can produce");
  out.report = blocking::analyze(pl, pts, workers);
  invariant(out.report.is_blocking,
            "grid cover complete but the curve union misses a line");
  return out;
}

bool verify_cover_equivalence(const FieldCtxPtr& ctx, u32 d,
                              const std::vector<Fq>& alphas, int threads) {
  require(static_cast<bool>(ctx), "null field context");
  require(d >= 2, "family degree must be >= 2");
  const FieldCtx& F = *ctx;
  const u32 q = F.q;
  for (Fq a : alphas) require(F.valid(a), "alpha out of range for this field");

  // Route one: the grid criterion.
  bool grid_ok;
  {
    std::vector<u8> covered(static_cast<std::size_t>(q) * q, 0);
    for (Fq alpha : alphas)
      for (u64 cell : cover_target(ctx, d, alpha)) covered[cell] = 1;
    grid_ok = std::all_of(covered.begin(), covered.end(),
                          [](u8 x) { return x != 0; });
  }

  // Route two: exhaustive line scan of the curve union.
  bool lines_ok;
  {
    std::vector<curve::PlaneCurve> curves;
    for (Fq alpha : alphas)
      curves.push_back(curve::pencil_curve(ctx, d, alpha).curve);
    Plane pl(ctx);
    auto pts = blocking::union_rational_points(curves, pl);
    lines_ok = blocking::analyze(pl, pts, resolve_threads(threads)).is_blocking;
  }

  invariant(grid_ok == lines_ok,
            "grid criterion and line scan disagree on the covering verdict");
  return grid_ok;
}

std::optional<u64> exact_min_cover(const FieldCtxPtr& ctx, u32 d,
                                   u64 node_budget, u32 q_budget) {
  require(static_cast<bool>(ctx), "null field context");
  require(d >= 2, "family degree must be >= 2");
  const u32 q = ctx->q;
  if (q > q_budget)
    throw BudgetExceeded("exact cover search beyond the field-size budget");

  const std::size_t cells = static_cast<std::size_t>(q) * q;
  const std::size_t words = (cells + 63) / 64;
  std::vector<std::vector<u64>> sets(q, std::vector<u64>(words, 0));
  std::vector<u32> set_size(q, 0);
  for (u32 alpha = 0; alpha < q; ++alpha) {
    for (u64 cell : cover_target(ctx, d, static_cast<Fq>(alpha)))
      sets[alpha][cell >> 6] |= u64(1) << (cell & 63);
    for (u64 w : sets[alpha])
      set_size[alpha] += static_cast<u32>(__builtin_popcountll(w));
  }
  u32 max_set = *std::max_element(set_size.begin(), set_size.end());
  if (max_set == 0) return std::nullopt;

  // Candidate sets covering each cell, for the branching rule.
  std::vector<std::vector<u32>> cell_candidates(cells);
  for (u32 alpha = 0; alpha < q; ++alpha)
    for (std::size_t cell = 0; cell < cells; ++cell)
      if (sets[alpha][cell >> 6] >> (cell & 63) & 1)
        cell_candidates[cell].push_back(alpha);
  for (const auto& cands : cell_candidates)
    if (cands.empty()) return std::nullopt;  // grid not coverable at all

  // Greedy upper bound first.
  u64 best;
  {
    std::vector<u64> uncov(words, u64(0) - 1);
    if (cells & 63) uncov[words - 1] = (u64(1) << (cells & 63)) - 1;
    u64 count = cells, picked = 0;
    while (count > 0) {
      u32 best_alpha = 0;
      u64 best_gain = 0;
      for (u32 alpha = 0; alpha < q; ++alpha) {
        u64 gain = 0;
        for (std::size_t w = 0; w < words; ++w)
          gain += static_cast<u64>(
              __builtin_popcountll(uncov[w] & sets[alpha][w]));
        if (gain > best_gain) {
          best_gain = gain;
          best_alpha = alpha;
        }
      }
      for (std::size_t w = 0; w < words; ++w) uncov[w] &= ~sets[best_alpha][w];
      count -= best_gain;
      ++picked;
    }
    best = picked;
  }

  u64 nodes = 0;
  bool budget_hit = false;
  std::vector<u64> uncov(words, u64(0) - 1);
  if (cells & 63) uncov[words - 1] = (u64(1) << (cells & 63)) - 1;

  std::function<void(u64, u64)> dfs = [&](u64 depth, u64 uncovered_count) {
    if (budget_hit) return;
    if (++nodes > node_budget) {
      budget_hit = true;
      return;
    }
    if (uncovered_count == 0) {
      best = std::min(best, depth);
      return;
    }
    // Admissible lower bound: every set covers at most max_set cells.
    if (depth + (uncovered_count + max_set - 1) / max_set >= best) return;
    // Branch on the uncovered cell with the fewest candidate sets.
    std::size_t pick = cells;
    std::size_t fewest = static_cast<std::size_t>(q) + 1;
    for (std::size_t w = 0; w < words; ++w) {
      u64 word = uncov[w];
      while (word) {
        std::size_t cell = (w << 6) + static_cast<std::size_t>(
                                          __builtin_ctzll(word));
        word &= word - 1;
        if (cell_candidates[cell].size() < fewest) {
          fewest = cell_candidates[cell].size();
          pick = cell;
        }
      }
    }
    if (pick == cells) return;
    for (u32 alpha : cell_candidates[pick]) {
      std::vector<u64> saved = uncov;
      u64 removed = 0;
      for (std::size_t w = 0; w < words; ++w) {
        removed += static_cast<u64>(
            __builtin_popcountll(uncov[w] & sets[alpha][w]));
        uncov[w] &= ~sets[alpha][w];
      }
      dfs(depth + 1, uncovered_count - removed);
      uncov = std::move(saved);
      if (budget_hit) return;
    }
  };
  dfs(0, cells);
  if (budget_hit) return std::nullopt;
  return best;
}

std::optional<Fq> nonresidue_witness(const FieldCtxPtr& ctx,
                                     const std::vector<Fq>& alphas, u32 d) {
  require(static_cast<bool>(ctx), "null field context");
  const FieldCtx& F = *ctx;
  require(gf::gcd_u64(d, F.q - 1) > 1,
          "witness search needs gcd(d, q-1) > 1");
  for (Fq s : alphas) require(F.valid(s), "alpha out of range for this field");
  for (u32 x = 0; x < F.q; ++x) {
    bool all_nonpower = true;
    for (Fq s : alphas)
      if (F.is_dth_power(F.sub(s, static_cast<Fq>(x)), d)) {
        all_nonpower = false;
        break;
      }
    if (all_nonpower) return static_cast<Fq>(x);
  }
  return std::nullopt;
}

}  // namespace blockforge::pencil
