#include "blockforge/blocking.hpp"

#include <algorithm>

namespace blockforge::blocking {

using gf::Fq;

namespace {

constexpr u32 kAnalyzeQBudget = 1024;

struct Shard {
  u32 k = 0;
  u32 t = 0xFFFFFFFF;
  bool trivial = false;
  std::vector<u64> unblocked;
};

std::vector<u64> membership_bits(const Plane& pl,
                                 const std::vector<u64>& point_indices) {
  std::vector<u64> bits((pl.size() + 63) / 64, 0);
  for (u64 idx : point_indices) {
    require(idx < pl.size(), "point index out of range");
    bits[idx >> 6] |= u64(1) << (idx & 63);
  }
  return bits;
}

// Count of B-members on each line in [begin, end).
void scan_lines(const Plane& pl, const std::vector<u64>& bits, u64 begin,
                u64 end, const std::function<void(u64, u32)>& emit) {
  const gf::FieldCtx& F = pl.field();
  const u32 q = pl.q();
  for (u64 li = begin; li < end; ++li) {
    ProjLine ln = pl.line(li);
    const Fq a = ln.c[0], b = ln.c[1], c = ln.c[2];
    u32 count = 0;
    auto hit = [&](u64 pi) {
      if (bits[pi >> 6] >> (pi & 63) & 1) ++count;
    };
    // Same canonical case split as Plane::points_on_line, without
    // materializing the point list.
    if (c != 0) {
      hit(1 + static_cast<u64>(F.neg(F.div(b, c))));
      Fq cinv = F.inv(c);
      for (u32 y = 0; y < q; ++y) {
        Fq z = F.neg(F.mul(F.add(a, F.mul(b, static_cast<Fq>(y))), cinv));
        hit(1 + static_cast<u64>(q) + static_cast<u64>(y) * q + z);
      }
    } else if (b != 0) {
      hit(0);
      Fq y = F.neg(F.div(a, b));
      u64 base = 1 + static_cast<u64>(q) + static_cast<u64>(y) * q;
      for (u32 z = 0; z < q; ++z) hit(base + z);
    } else {
      hit(0);
      for (u32 z = 0; z < q; ++z) hit(1 + static_cast<u64>(z));
    }
    emit(li, count);
  }
}

}  // namespace

BlockingReport analyze(const Plane& pl, const std::vector<u64>& point_indices,
                       int threads, bool full_unblocked) {
  if (pl.q() > kAnalyzeQBudget)
    throw BudgetExceeded("line scan beyond the supported field size");
  auto bits = membership_bits(pl, point_indices);
  const u32 q = pl.q();
  const u64 lines = pl.size();
  int workers = resolve_threads(threads);

  std::vector<Shard> shards(static_cast<std::size_t>(workers < 1 ? 1 : workers));
  parallel_for(lines, workers, [&](int w, std::size_t begin, std::size_t end) {
    Shard& sh = shards[static_cast<std::size_t>(w)];
    scan_lines(pl, bits, begin, end, [&](u64 li, u32 count) {
      sh.k = std::max(sh.k, count);
      sh.t = std::min(sh.t, count);
      if (count == q + 1) sh.trivial = true;
      if (count == 0) sh.unblocked.push_back(li);
    });
  });

  BlockingReport out;
  out.set_size = 0;
  for (u64 w : bits) out.set_size += static_cast<u64>(__builtin_popcountll(w));
  u32 tmin = 0xFFFFFFFF;
  for (const Shard& sh : shards) {
    out.k_value = std::max(out.k_value, sh.k);
    tmin = std::min(tmin, sh.t);
    out.is_trivial = out.is_trivial || sh.trivial;
    for (u64 li : sh.unblocked) {
      ++out.unblocked_count;
      if (full_unblocked || out.unblocked_lines.size() < kUnblockedSampleCap)
        out.unblocked_lines.push_back(li);
    }
  }
  out.t_level = tmin == 0xFFFFFFFF ? 0 : tmin;
  out.is_blocking = out.t_level >= 1;
  out.unblocked_is_full =
      full_unblocked || out.unblocked_count == out.unblocked_lines.size();
  return out;
}

std::vector<u64> skew_lines(const Plane& pl,
                            const std::vector<u64>& point_indices,
                            int threads) {
  BlockingReport rep = analyze(pl, point_indices, threads, true);
  return rep.unblocked_lines;
}

std::vector<u64> union_rational_points(
    const std::vector<curve::PlaneCurve>& curves, const Plane& pl) {
  std::vector<u64> bits((pl.size() + 63) / 64, 0);
  for (const auto& c : curves) {
    invariant(c.ctx.get() == pl.ctx().get(), "curve and plane field mismatch");
    for (u64 idx : curve::rational_points(c, pl))
      bits[idx >> 6] |= u64(1) << (idx & 63);
  }
  std::vector<u64> out;
  for (u64 idx = 0; idx < pl.size(); ++idx)
    if (bits[idx >> 6] >> (idx & 63) & 1) out.push_back(idx);
  return out;
}

u64 bezout_k_bound(const std::vector<curve::PlaneCurve>& curves) {
  require(!curves.empty(), "empty curve list");
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const auto& a = curves[i].degree <= curves[j].degree ? curves[i]
                                                           : curves[j];
      const auto& b = curves[i].degree <= curves[j].degree ? curves[j]
                                                           : curves[i];
      require(!curve::divides(a, b),
              "curves share a component; the degree bound needs distinct "
              "components");
    }
  u64 sum = 0;
  for (const auto& c : curves) sum += c.degree;
  return sum;
}

}  // namespace blockforge::blocking
