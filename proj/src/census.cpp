#include "blockforge/census.hpp"

#include <algorithm>
#include <cmath>

namespace blockforge::census {

namespace {

void check_certified(const std::vector<CertifiedCurve>& cs) {
  require(!cs.empty(), "at least one curve required");
  for (const auto& c : cs)
    require(c.cert.status ==
                curve::IrreducibilityCertificate::GeomIrreducible,
            "every census curve needs a geometric-irreducibility certificate");
  for (std::size_t i = 1; i < cs.size(); ++i)
    require(cs[i].curve.ctx == cs[0].curve.ctx,
            "census curves must share one field");
}

struct LineData {
  bool transverse = true;
  ClassKey key;        // only when transverse
  u64 rational = 0;    // distinct rational points, summed over components
  std::vector<u32> per_component_rational;
  bool full_cycle = true;
};

LineData line_data(const std::vector<CertifiedCurve>& cs, const Plane& pl,
                   const ProjLine& ln) {
  LineData out;
  out.per_component_rational.reserve(cs.size());
  for (const auto& c : cs) {
    auto parts = curve::restriction_factor_degrees(c.curve, pl, ln);
    if (parts.empty()) {  // line contained in the component
      out.transverse = false;
      out.full_cycle = false;
      out.per_component_rational.push_back(pl.q() + 1);
      out.rational += pl.q() + 1;
      continue;
    }
    u32 rational = 0;
    bool squarefree = true;
    std::vector<u32> partition;
    for (auto [deg, mult] : parts) {
      if (deg == 1) ++rational;
      if (mult > 1) squarefree = false;
      for (u32 k = 0; k < mult; ++k) partition.push_back(deg);
    }
    out.per_component_rational.push_back(rational);
    out.rational += rational;
    if (!squarefree) {
      out.transverse = false;
      out.full_cycle = false;
      continue;
    }
    std::sort(partition.rbegin(), partition.rend());
    if (partition.size() != 1) out.full_cycle = false;
    out.key.push_back(std::move(partition));
  }
  if (!out.transverse) out.key.clear();
  return out;
}

}  // namespace

u64 partition_centralizer(const std::vector<u32>& partition) {
  u64 z = 1;
  u32 prev = 0;
  u64 run = 0;
  for (u32 part : partition) {
    require(part >= 1, "partition parts must be positive");
    if (part == prev) {
      ++run;
    } else {
      prev = part;
      run = 1;
    }
    z *= part * run;  // accumulates k^{m_k} m_k! over each run of equal parts
  }
  return z;
}

std::optional<ClassKey> frobenius_class(const std::vector<CertifiedCurve>& cs,
                                        const Plane& pl, const ProjLine& ln) {
  check_certified(cs);
  LineData data = line_data(cs, pl, ln);
  if (!data.transverse) return std::nullopt;
  return data.key;
}

CensusResult chebotarev_census(const std::vector<CertifiedCurve>& cs,
                               int threads) {
  check_certified(cs);
  CensusResult out;
  out.ctx = cs[0].curve.ctx;
  for (const auto& c : cs) out.degrees.push_back(c.curve.degree);
  Plane pl(out.ctx);
  const u64 n = pl.size();
  out.total_lines = n;
  const u32 q = pl.q();
  int workers = resolve_threads(threads);

  struct Shard {
    std::map<ClassKey, u64> counts;
    u64 non_transverse = 0;
    u64 full_cycle = 0;
    std::vector<u64> point_sum;     // per component
    std::vector<u64> skew_lines;    // ascending within the shard
  };
  std::vector<Shard> shard(static_cast<std::size_t>(workers < 1 ? 1 : workers));
  for (auto& s : shard) s.point_sum.assign(cs.size(), 0);

  parallel_for(n, workers, [&](int w, std::size_t begin, std::size_t end) {
    Shard& s = shard[static_cast<std::size_t>(w)];
    for (std::size_t idx = begin; idx < end; ++idx) {
      LineData data = line_data(cs, pl, pl.line(idx));
      for (std::size_t i = 0; i < cs.size(); ++i)
        s.point_sum[i] += data.per_component_rational[i];
      if (data.rational == 0) s.skew_lines.push_back(idx);
      if (!data.transverse) {
        ++s.non_transverse;
        continue;
      }
      ++s.counts[data.key];
      if (data.full_cycle) ++s.full_cycle;
    }
  });

  std::map<ClassKey, u64> counts;
  std::vector<u64> point_sum(cs.size(), 0);
  std::vector<u64> census_skew_lines;
  for (const auto& s : shard) {
    for (const auto& [key, cnt] : s.counts) counts[key] += cnt;
    out.non_transverse += s.non_transverse;
    out.full_cycle_observed += s.full_cycle;
    for (std::size_t i = 0; i < cs.size(); ++i) point_sum[i] += s.point_sum[i];
    census_skew_lines.insert(census_skew_lines.end(), s.skew_lines.begin(),
                             s.skew_lines.end());
  }

  u64 class_total = 0;
  for (const auto& [key, cnt] : counts) class_total += cnt;
  invariant(class_total + out.non_transverse == n,
            "census line totals do not add up");

  // Per-component incidence double counting: every rational point of C_i
  // lies on exactly q + 1 lines.
  for (std::size_t i = 0; i < cs.size(); ++i) {
    u64 pts = curve::rational_points(cs[i].curve, pl).size();
    out.component_points.push_back(pts);
    invariant(point_sum[i] == pts * (q + 1),
              "incidence double counting failed for a component");
  }

  // The direct route: lines missing every rational point of the union.
  std::vector<curve::PlaneCurve> plain;
  for (const auto& c : cs) plain.push_back(c.curve);
  auto union_pts = blocking::union_rational_points(plain, pl);
  auto direct_skew = blocking::skew_lines(pl, union_pts, workers);
  invariant(direct_skew == census_skew_lines,
            "class-based and point-based skew line sets differ");
  out.observed_skew = direct_skew.size();

  const double q32 = std::pow(static_cast<double>(q), 1.5);
  for (const auto& [key, cnt] : counts) {
    ClassStat stat;
    stat.observed = cnt;
    stat.z = 1;
    for (const auto& partition : key) stat.z *= partition_centralizer(partition);
    stat.predicted =
        static_cast<double>(q) * static_cast<double>(q) / static_cast<double>(stat.z);
    stat.deviation = static_cast<double>(cnt) - stat.predicted;
    stat.normalized = stat.deviation / q32;
    stat.tolerance = 10.0 * q32 / std::sqrt(static_cast<double>(stat.z));
    double mag = stat.deviation < 0 ? -stat.deviation : stat.deviation;
    stat.verdict = mag <= stat.tolerance ? 0 : (mag <= 3 * stat.tolerance ? 1 : 2);
    if (stat.verdict == 1) ++out.warn_count;
    if (stat.verdict == 2) ++out.fail_count;
    out.classes.emplace(key, stat);
  }

  double inv = 1.0;
  for (u32 d : out.degrees) inv /= static_cast<double>(d);
  out.full_cycle_predicted =
      static_cast<double>(q) * static_cast<double>(q) * inv;
  return out;
}

SkewBoundReport skew_line_bound_check(const CensusResult& census) {
  SkewBoundReport out;
  out.observed_skew = census.observed_skew;
  out.full_cycle_observed = census.full_cycle_observed;
  out.full_cycle_predicted = census.full_cycle_predicted;
  const double q = static_cast<double>(census.ctx->q);
  out.tolerance = 10.0 * std::pow(q, 1.5);
  double dev = static_cast<double>(census.full_cycle_observed) -
               census.full_cycle_predicted;
  out.within_tolerance = (dev < 0 ? -dev : dev) <= out.tolerance;
  out.skew_positive = census.observed_skew > 0;
  return out;
}

}  // namespace blockforge::census
