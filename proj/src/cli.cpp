#include "blockforge/cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockforge/census.hpp"
#include "blockforge/conics.hpp"
#include "blockforge/cover.hpp"
#include "blockforge/pencil.hpp"

namespace blockforge::cli {

using gf::Fq;
using nlohmann::json;
using plane::Plane;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// ---- field selection ----

struct FieldFlags {
  u64 p = 0;
  u64 q = 0;
  u32 r = 1;
  bool p_given = false;
  bool q_given = false;
};

std::pair<u32, u32> factor_prime_power(u64 q) {
  require(q >= 2, "field size must be at least 2");
  u64 p = 0;
  for (u64 d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  if (p == 0) p = q;  // q prime
  u32 r = 0;
  u64 rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++r;
  }
  require(rest == 1, "field size must be a prime power");
  return {static_cast<u32>(p), r};
}

gf::FieldCtxPtr resolve_field(const FieldFlags& f, json& params) {
  u32 p, r;
  if (f.q_given) {
    require(!f.p_given, "give either --q or --p/--r, not both");
    std::tie(p, r) = factor_prime_power(f.q);
  } else {
    require(f.p_given, "a field is required: --q or --p (with optional --r)");
    require(f.p >= 2 && f.p <= (u64(1) << 20), "characteristic out of range");
    p = static_cast<u32>(f.p);
    r = f.r;
  }
  auto ctx = gf::make_field(p, r);
  params["p"] = ctx->p;
  params["r"] = ctx->r;
  params["q"] = ctx->q;
  return ctx;
}

// ---- serialization helpers ----

json blocking_json(const blocking::BlockingReport& r) {
  json j;
  j["is_blocking"] = r.is_blocking;
  j["is_trivial"] = r.is_trivial;
  j["k_value"] = r.k_value;
  j["t_level"] = r.t_level;
  j["set_size"] = r.set_size;
  j["unblocked_count"] = r.unblocked_count;
  j["unblocked_sample"] = r.unblocked_lines;
  j["unblocked_is_full"] = r.unblocked_is_full;
  return j;
}

json domination_json(const cover::DominationResult& d) {
  json j;
  j["selected"] = d.selected;
  j["bound"] = d.bound;
  j["delta"] = d.delta;
  j["sample_p"] = d.sample_p;
  j["attempts"] = d.attempts;
  j["sampled_count"] = d.sampled_count;
  j["patched_count"] = d.patched_count;
  j["verified"] = d.verified;
  return j;
}

json conic_json(const conics::ConicForm& c) {
  return json::array({c.a200, c.a020, c.a002, c.a110, c.a101, c.a011});
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

std::string csv_num(double v) { return json(v).dump(); }

std::string csv_rows(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

// ---- curve and pool descriptors ----

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

u64 parse_u64(const std::string& s, const char* what) {
  require(!s.empty(), what);
  u64 v = 0;
  for (char ch : s) {
    require(ch >= '0' && ch <= '9', what);
    require(v <= (~u64(0) - 9) / 10, what);
    v = v * 10 + static_cast<u64>(ch - '0');
  }
  return v;
}

Fq parse_code(const std::string& s, const gf::FieldCtxPtr& ctx,
              const char* what) {
  u64 v = parse_u64(s, what);
  require(v < ctx->q, "element code out of range");
  return static_cast<Fq>(v);
}

curve::CertifiedCurve parse_curve_descriptor(const std::string& desc,
                                       const gf::FieldCtxPtr& ctx,
                                       std::optional<Rng>& rng) {
  auto parts = split(desc, ':');
  require(!parts.empty(), "empty curve descriptor");
  const std::string& kind = parts[0];
  if (kind == "pencil") {
    require(parts.size() == 3, "pencil descriptor is pencil:D:ALPHA");
    u32 d = static_cast<u32>(parse_u64(parts[1], "bad degree"));
    return curve::pencil_curve(ctx, d, parse_code(parts[2], ctx, "bad alpha"));
  }
  if (kind == "fermat") {
    require(parts.size() == 5, "fermat descriptor is fermat:D:A:B:C");
    u32 d = static_cast<u32>(parse_u64(parts[1], "bad degree"));
    return curve::fermat_curve(ctx, d, parse_code(parts[2], ctx, "bad a"),
                               parse_code(parts[3], ctx, "bad b"),
                               parse_code(parts[4], ctx, "bad c"));
  }
  if (kind == "graph") {
    require(parts.size() == 2, "graph descriptor is graph:D");
    require(rng.has_value(), "graph curves need --seed");
    u32 d = static_cast<u32>(parse_u64(parts[1], "bad degree"));
    return curve::graph_curve(ctx, d, *rng);
  }
  throw InvalidInput("unknown curve kind: " + kind);
}

std::vector<curve::CertifiedCurve> build_pool(const std::string& desc,
                                              const gf::FieldCtxPtr& ctx,
                                              u32 d, std::optional<Rng>& rng) {
  auto parts = split(desc, ':');
  const std::string& kind = parts[0];
  std::vector<curve::CertifiedCurve> pool;
  if (kind == "pencil") {
    require(parts.size() == 1, "pencil pool descriptor is just 'pencil'");
    for (u32 alpha = 0; alpha < ctx->q; ++alpha)
      pool.push_back(curve::pencil_curve(ctx, d, static_cast<Fq>(alpha)));
    return pool;
  }
  require(parts.size() == 2, "pool descriptor is pencil | graph:N | fermat:N");
  u64 n = parse_u64(parts[1], "bad pool size");
  require(n >= 1 && n <= 100000, "pool size out of range");
  require(rng.has_value(), "sampled pools need --seed");
  if (kind == "graph") {
    for (u64 i = 0; i < n; ++i)
      pool.push_back(curve::graph_curve(ctx, d, *rng));
    return pool;
  }
  if (kind == "fermat") {
    require(d % ctx->p != 0,
            "fermat pool needs the degree coprime to the characteristic");
    for (u64 i = 0; i < n; ++i) {
      Fq a = static_cast<Fq>(1 + rng->bounded(ctx->q - 1));
      Fq b = static_cast<Fq>(1 + rng->bounded(ctx->q - 1));
      Fq c = static_cast<Fq>(1 + rng->bounded(ctx->q - 1));
      pool.push_back(curve::fermat_curve(ctx, d, a, b, c));
    }
    return pool;
  }
  throw InvalidInput("unknown pool kind: " + kind);
}

// ---- command handlers; each returns the result object ----

json cmd_field_info(const gf::FieldCtxPtr& ctx) {
  json res;
  res["p"] = ctx->p;
  res["r"] = ctx->r;
  res["q"] = ctx->q;
  res["modulus"] = ctx->modulus;  // constant coefficient first
  return res;
}

json cmd_pencil_construct(const gf::FieldCtxPtr& ctx, u32 d, int threads) {
  auto result = pencil::greedy_construct(ctx, d, threads);
  bool agree = pencil::verify_cover_equivalence(ctx, d, result.alphas, threads);
  invariant(agree, "constructed family failed the covering criterion");
  json res;
  res["d"] = d;
  res["q"] = ctx->q;
  res["alphas"] = result.alphas;
  res["family_size"] = result.alphas.size();
  res["bound"] = result.bound;
  json steps = json::array();
  for (const auto& s : result.steps)
    steps.push_back({{"alpha", s.alpha}, {"newly_covered", s.newly_covered}});
  res["steps"] = steps;
  res["union_size"] = result.union_size;
  res["blocking"] = blocking_json(result.report);
  res["cover_equivalence"] = agree;
  return res;
}

json cmd_pencil_mincover(const gf::FieldCtxPtr& ctx, u32 d, u64 node_budget,
                         int threads) {
  auto greedy = pencil::greedy_construct(ctx, d, threads);
  auto minimum = pencil::exact_min_cover(ctx, d, node_budget);
  json res;
  res["d"] = d;
  res["q"] = ctx->q;
  res["greedy_size"] = greedy.alphas.size();
  res["bound"] = greedy.bound;
  if (minimum) {
    res["minimum"] = *minimum;
    res["budget_exhausted"] = false;
    invariant(*minimum <= greedy.alphas.size(),
              "exact minimum exceeded the greedy size");
  } else {
    res["minimum"] = nullptr;
    res["budget_exhausted"] = true;
  }
  return res;
}

json cmd_verify(const gf::FieldCtxPtr& ctx, const std::string& points_file,
                const std::string& curves_file, int threads, json& params) {
  require(points_file.empty() != curves_file.empty(),
          "verify needs exactly one of --points or --curves");
  Plane pl(ctx);
  json res;
  std::vector<u64> point_indices;
  if (!points_file.empty()) {
    std::ifstream in(points_file);
    require(static_cast<bool>(in), "cannot open the points file");
    json doc;
    try {
      doc = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("points file: ") + e.what());
    }
    require(doc.contains("points") && doc["points"].is_array(),
            "points file needs a top-level points array");
    std::vector<u8> seen(pl.size(), 0);
    for (const auto& entry : doc["points"]) {
      require(entry.is_array() && entry.size() == 3,
              "each point is a coordinate triple");
      std::array<Fq, 3> v{};
      for (int i = 0; i < 3; ++i) {
        require(entry[i].is_number_unsigned(),
                "coordinates are nonnegative element codes");
        u64 code = entry[i].get<u64>();
        require(code < ctx->q, "coordinate code out of range");
        v[static_cast<std::size_t>(i)] = static_cast<Fq>(code);
      }
      require(v[0] || v[1] || v[2], "the zero triple is not a point");
      plane::ProjPoint pt;
      pt.c = plane::normalize_triple(*ctx, v);
      seen[pl.point_index(pt)] = 1;
    }
    for (u64 i = 0; i < pl.size(); ++i)
      if (seen[i]) point_indices.push_back(i);
    params["input_kind"] = "points";
    params["input_count"] = doc["points"].size();
    res["input_kind"] = "points";
  } else {
    std::ifstream in(curves_file);
    require(static_cast<bool>(in), "cannot open the curves file");
    json doc;
    try {
      doc = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("curves file: ") + e.what());
    }
    require(doc.contains("curves") && doc["curves"].is_array(),
            "curves file needs a top-level curves array");
    std::vector<curve::PlaneCurve> curves;
    for (const auto& entry : doc["curves"]) {
      require(entry.contains("degree") && entry.contains("coeffs"),
              "each curve needs degree and coeffs");
      require(entry["degree"].is_number_unsigned(), "degree is an integer");
      u32 d = entry["degree"].get<u32>();
      require(entry["coeffs"].is_array(), "coeffs is an array");
      std::vector<Fq> coeffs;
      for (const auto& c : entry["coeffs"]) {
        require(c.is_number_unsigned(),
                "coefficients are nonnegative element codes");
        u64 code = c.get<u64>();
        require(code < ctx->q, "coefficient code out of range");
        coeffs.push_back(static_cast<Fq>(code));
      }
      curves.push_back(curve::make_curve(ctx, d, std::move(coeffs)));
    }
    require(!curves.empty(), "at least one curve required");
    point_indices = blocking::union_rational_points(curves, pl);
    params["input_kind"] = "curves";
    params["input_count"] = doc["curves"].size();
    res["input_kind"] = "curves";
    res["curve_count"] = curves.size();
  }
  res["q"] = ctx->q;
  res["blocking"] = blocking_json(
      blocking::analyze(pl, point_indices, threads));
  return res;
}

json cmd_conic_skew_census(const gf::FieldCtxPtr& ctx, u32 ell, u64 seed,
                           int threads, std::string* csv) {
  Rng rng(seed);
  std::vector<conics::ConicForm> cs;
  u64 guard = 0;
  while (cs.size() < ell) {
    require(++guard <= 100000, "cannot sample enough distinct conics");
    auto c = conics::random_nonsingular_conic(ctx, rng);
    bool dup = false;
    for (const auto& other : cs) dup = dup || c == other;
    if (!dup) cs.push_back(c);
  }
  auto census = conics::simultaneous_nonsquare_census(ctx, cs, threads);
  json res;
  res["q"] = census.q;
  res["ell"] = census.ell;
  json list = json::array();
  for (const auto& c : cs) list.push_back(conic_json(c));
  res["conics"] = list;
  res["nonsquare_count"] = census.nonsquare_count;
  res["skew_all_count"] = census.skew_all_count;
  res["main_term"] = census.main_term;
  res["tolerance"] = census.tolerance;
  res["within_tolerance"] = census.within_tolerance;
  res["positive"] = census.positive;
  if (csv) {
    *csv = csv_rows(
        {{"q", "ell", "nonsquare_count", "skew_all_count", "main_term",
          "tolerance", "within_tolerance", "positive"},
         {std::to_string(census.q), std::to_string(census.ell),
          std::to_string(census.nonsquare_count),
          std::to_string(census.skew_all_count), csv_num(census.main_term),
          csv_num(census.tolerance),
          census.within_tolerance ? "true" : "false",
          census.positive ? "true" : "false"}});
  }
  return res;
}

std::string class_key_text(const census::ClassKey& key) {
  return json(key).dump();
}

json cmd_chebotarev(const gf::FieldCtxPtr& ctx,
                    const std::vector<std::string>& descs,
                    std::optional<Rng>& rng, int threads, std::string* csv) {
  require(!descs.empty(), "at least one --curve descriptor required");
  std::vector<curve::CertifiedCurve> cs;
  for (const auto& desc : descs) cs.push_back(parse_curve_descriptor(desc, ctx, rng));
  auto cen = census::chebotarev_census(cs, threads);
  json res;
  res["q"] = ctx->q;
  res["degrees"] = cen.degrees;
  res["total_lines"] = cen.total_lines;
  res["non_transverse"] = cen.non_transverse;
  json classes = json::array();
  std::vector<std::vector<std::string>> rows = {
      {"class", "observed", "z", "predicted", "deviation", "normalized",
       "tolerance", "verdict"}};
  for (const auto& [key, stat] : cen.classes) {
    json cj;
    cj["key"] = key;
    cj["observed"] = stat.observed;
    cj["z"] = stat.z;
    cj["predicted"] = stat.predicted;
    cj["deviation"] = stat.deviation;
    cj["normalized"] = stat.normalized;
    cj["tolerance"] = stat.tolerance;
    cj["verdict"] = stat.verdict == 0 ? "ok" : (stat.verdict == 1 ? "warn"
                                                                  : "fail");
    classes.push_back(cj);
    rows.push_back({class_key_text(key), std::to_string(stat.observed),
                    std::to_string(stat.z), csv_num(stat.predicted),
                    csv_num(stat.deviation), csv_num(stat.normalized),
                    csv_num(stat.tolerance),
                    stat.verdict == 0 ? "ok"
                                      : (stat.verdict == 1 ? "warn" : "fail")});
  }
  res["classes"] = classes;
  res["warn_count"] = cen.warn_count;
  res["fail_count"] = cen.fail_count;
  res["observed_skew"] = cen.observed_skew;
  res["full_cycle_observed"] = cen.full_cycle_observed;
  res["full_cycle_predicted"] = cen.full_cycle_predicted;
  res["component_points"] = cen.component_points;
  auto bound = census::skew_line_bound_check(cen);
  json bj;
  bj["observed_skew"] = bound.observed_skew;
  bj["full_cycle_observed"] = bound.full_cycle_observed;
  bj["full_cycle_predicted"] = bound.full_cycle_predicted;
  bj["tolerance"] = bound.tolerance;
  bj["within_tolerance"] = bound.within_tolerance;
  bj["skew_positive"] = bound.skew_positive;
  res["skew_bound"] = bj;
  if (csv) *csv = csv_rows(rows);
  return res;
}

json cmd_build(const gf::FieldCtxPtr& ctx, u32 d, u32 t,
               const std::string& pool_desc, u64 seed, int threads) {
  // Fork with a fixed tag so pool sampling never shares a stream with the
  // retry streams used inside the domination engine.
  std::optional<Rng> rng(Rng(seed).fork(0x706F6F6C));
  auto pool = build_pool(pool_desc, ctx, d, rng);
  auto built = t == 1 ? cover::build_blocking_family(ctx, d, pool, seed,
                                                     threads)
                      : cover::build_tfold_family(ctx, d, t, pool, seed,
                                                  threads);
  json res;
  res["q"] = ctx->q;
  res["d"] = d;
  res["t"] = built.t;
  res["pool_size"] = pool.size();
  res["selected"] = built.selected;
  res["family_size"] = built.selected.size();
  res["domination"] = domination_json(built.dom);
  res["blocking"] = blocking_json(built.report);
  res["log_reference"] = built.log_reference;
  return res;
}

json cmd_count_curves(const gf::FieldCtxPtr& ctx, u32 d, int threads,
                      std::string* csv) {
  auto cert = cover::psi_survey(ctx, d, false, threads);
  auto direct = cover::psi_survey(ctx, d, true, threads);
  bool agree = cert.psi_empty == direct.psi_empty &&
               cert.psi_point == direct.psi_point &&
               cert.psi_pair_max == direct.psi_pair_max;
  invariant(agree, "the two irreducibility routes disagree");
  json res;
  res["d"] = cert.d;
  res["q"] = cert.q;
  res["psi_empty"] = cert.psi_empty;
  res["psi_point"] = cert.psi_point;
  res["psi_point_constant"] = cert.psi_point_constant;
  res["psi_pair_max"] = cert.psi_pair_max;
  res["pair_bound"] = cert.pair_bound;
  res["routes_agree"] = agree;
  if (csv) {
    std::vector<std::vector<std::string>> rows = {{"point_index", "psi"}};
    for (std::size_t i = 0; i < cert.psi_point.size(); ++i)
      rows.push_back({std::to_string(i), std::to_string(cert.psi_point[i])});
    *csv = csv_rows(rows);
  }
  return res;
}

json cmd_k_table(u32 d, const std::vector<u64>& qs, int threads,
                 std::string* csv) {
  require(!qs.empty(), "at least one --q value required");
  json res;
  res["d"] = d;
  json rows = json::array();
  std::vector<std::vector<std::string>> table = {
      {"d", "q", "family_size", "bound", "k_value", "t_level", "union_size",
       "degree_sum_bound"}};
  for (u64 q : qs) {
    auto [p, r] = factor_prime_power(q);
    auto ctx = gf::make_field(p, r);
    auto result = pencil::greedy_construct(ctx, d, threads);
    u64 degree_sum = static_cast<u64>(result.alphas.size()) * d;
    json row;
    row["q"] = q;
    row["family_size"] = result.alphas.size();
    row["bound"] = result.bound;
    row["k_value"] = result.report.k_value;
    row["t_level"] = result.report.t_level;
    row["union_size"] = result.union_size;
    row["degree_sum_bound"] = degree_sum;
    rows.push_back(row);
    table.push_back({std::to_string(d), std::to_string(q),
                     std::to_string(result.alphas.size()),
                     std::to_string(result.bound),
                     std::to_string(result.report.k_value),
                     std::to_string(result.report.t_level),
                     std::to_string(result.union_size),
                     std::to_string(degree_sum)});
  }
  res["rows"] = rows;
  if (csv) *csv = csv_rows(table);
  return res;
}

}  // namespace

RunOutcome run_cli(const std::vector<std::string>& args) {
  RunOutcome out;
  CLI::App app{"blocking sets in the projective plane from unions of curves"};
  app.require_subcommand(1);

  FieldFlags field;
  u32 d = 3;
  u32 ell = 1;
  u32 t = 1;
  u64 seed = 0;
  bool seed_given = false;
  u64 node_budget = 2'000'000;
  int threads = 0;
  bool timing = false;
  std::string pool_desc = "pencil";
  std::vector<std::string> curve_descs;
  std::vector<u64> q_list;
  std::string points_file, curves_file;

  auto add_field = [&](CLI::App* cmd) {
    cmd->add_option("--p", field.p, "characteristic (prime)")
        ->each([&](const std::string&) { field.p_given = true; });
    cmd->add_option("--r", field.r, "extension degree (default 1)");
    cmd->add_option("--q", field.q, "field size p^r, as an alternative")
        ->each([&](const std::string&) { field.q_given = true; });
  };
  auto add_common = [&](CLI::App* cmd, bool with_csv) {
    cmd->add_option("--threads", threads,
                    "worker cap; BLOCKFORGE_THREADS otherwise");
    cmd->add_option("--out", out.out_path, "JSON destination (- = stdout)");
    if (with_csv)
      cmd->add_option("--csv", out.csv_path, "CSV summary destination");
    cmd->add_flag("--timing", timing, "include wall time in the payload");
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* c_field = app.add_subcommand("field-info", "describe a field");
  add_field(c_field);
  add_common(c_field, false);

  CLI::App* c_pencil =
      app.add_subcommand("pencil-construct", "greedy blocking family");
  add_field(c_pencil);
  c_pencil->add_option("--d", d, "curve degree (>= 2)");
  add_common(c_pencil, false);

  CLI::App* c_min = app.add_subcommand("pencil-mincover",
                                       "exact minimum cover (small fields)");
  add_field(c_min);
  c_min->add_option("--d", d, "curve degree (>= 2)");
  c_min->add_option("--node-budget", node_budget, "search node budget");
  add_common(c_min, false);

  CLI::App* c_verify =
      app.add_subcommand("verify", "blocking report for points or curves");
  add_field(c_verify);
  c_verify->add_option("--points", points_file, "JSON file with points");
  c_verify->add_option("--curves", curves_file, "JSON file with curves");
  add_common(c_verify, false);

  CLI::App* c_conic = app.add_subcommand("conic-skew-census",
                                         "simultaneous skew-line census");
  add_field(c_conic);
  c_conic->add_option("--ell", ell, "number of conics");
  add_seed(c_conic);
  add_common(c_conic, true);

  CLI::App* c_cheb = app.add_subcommand("chebotarev-census",
                                        "splitting-type census over lines");
  add_field(c_cheb);
  c_cheb->add_option("--curve", curve_descs,
                     "curve descriptor: pencil:D:A | fermat:D:A:B:C | graph:D");
  add_seed(c_cheb);
  add_common(c_cheb, true);

  CLI::App* c_stein =
      app.add_subcommand("stein-build", "randomized blocking family");
  add_field(c_stein);
  c_stein->add_option("--d", d, "curve degree");
  c_stein->add_option("--pool", pool_desc,
                      "pool descriptor: pencil | graph:N | fermat:N");
  add_seed(c_stein);
  add_common(c_stein, false);

  CLI::App* c_tfold =
      app.add_subcommand("tfold-build", "randomized level-t family");
  add_field(c_tfold);
  c_tfold->add_option("--d", d, "curve degree");
  c_tfold->add_option("--t", t, "required level");
  c_tfold->add_option("--pool", pool_desc,
                      "pool descriptor: pencil | graph:N | fermat:N");
  add_seed(c_tfold);
  add_common(c_tfold, false);

  CLI::App* c_count =
      app.add_subcommand("count-curves", "irreducible-form counts");
  add_field(c_count);
  c_count->add_option("--d", d, "form degree (2 or 3)");
  add_common(c_count, true);

  CLI::App* c_ktab =
      app.add_subcommand("k-table", "greedy family survey across fields");
  c_ktab->add_option("--d", d, "curve degree");
  c_ktab->add_option("--q", q_list, "field sizes (repeatable)");
  add_common(c_ktab, true);

  std::vector<const char*> argv;
  argv.push_back("blockforge");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out.exit_code = 0;
    out.error = app.help();
    return out;
  } catch (const CLI::ParseError& e) {
    out.exit_code = 2;
    out.error = e.what();
    return out;
  }

  const auto started = std::chrono::steady_clock::now();
  json record;
  record["schema_version"] = 1;
  record["tool"] = "blockforge";
  record["tool_version"] = kToolVersion;
  json params;
  try {
    if (app.got_subcommand(c_field)) {
      record["command"] = "field-info";
      auto ctx = resolve_field(field, params);
      record["result"] = cmd_field_info(ctx);
    } else if (app.got_subcommand(c_pencil)) {
      record["command"] = "pencil-construct";
      auto ctx = resolve_field(field, params);
      params["d"] = d;
      record["result"] = cmd_pencil_construct(ctx, d, threads);
    } else if (app.got_subcommand(c_min)) {
      record["command"] = "pencil-mincover";
      auto ctx = resolve_field(field, params);
      params["d"] = d;
      params["node_budget"] = node_budget;
      record["result"] = cmd_pencil_mincover(ctx, d, node_budget, threads);
    } else if (app.got_subcommand(c_verify)) {
      record["command"] = "verify";
      auto ctx = resolve_field(field, params);
      record["result"] =
          cmd_verify(ctx, points_file, curves_file, threads, params);
    } else if (app.got_subcommand(c_conic)) {
      record["command"] = "conic-skew-census";
      auto ctx = resolve_field(field, params);
      require(seed_given, "conic-skew-census needs --seed");
      params["ell"] = ell;
      params["seed"] = seed;
      std::string csv;
      record["result"] = cmd_conic_skew_census(
          ctx, ell, seed, threads, out.csv_path.empty() ? nullptr : &csv);
      out.csv_text = csv;
    } else if (app.got_subcommand(c_cheb)) {
      record["command"] = "chebotarev-census";
      auto ctx = resolve_field(field, params);
      params["curves"] = curve_descs;
      std::optional<Rng> rng;
      if (seed_given) {
        rng.emplace(seed);
        params["seed"] = seed;
      }
      std::string csv;
      record["result"] =
          cmd_chebotarev(ctx, curve_descs, rng, threads,
                         out.csv_path.empty() ? nullptr : &csv);
      out.csv_text = csv;
    } else if (app.got_subcommand(c_stein)) {
      record["command"] = "stein-build";
      auto ctx = resolve_field(field, params);
      require(seed_given, "stein-build needs --seed");
      params["d"] = d;
      params["pool"] = pool_desc;
      params["seed"] = seed;
      record["result"] = cmd_build(ctx, d, 1, pool_desc, seed, threads);
    } else if (app.got_subcommand(c_tfold)) {
      record["command"] = "tfold-build";
      auto ctx = resolve_field(field, params);
      require(seed_given, "tfold-build needs --seed");
      params["d"] = d;
      params["t"] = t;
      params["pool"] = pool_desc;
      params["seed"] = seed;
      record["result"] = cmd_build(ctx, d, t, pool_desc, seed, threads);
    } else if (app.got_subcommand(c_count)) {
      record["command"] = "count-curves";
      auto ctx = resolve_field(field, params);
      params["d"] = d;
      std::string csv;
      record["result"] = cmd_count_curves(
          ctx, d, threads, out.csv_path.empty() ? nullptr : &csv);
      out.csv_text = csv;
    } else if (app.got_subcommand(c_ktab)) {
      record["command"] = "k-table";
      params["d"] = d;
      params["q_list"] = q_list;
      std::string csv;
      record["result"] = cmd_k_table(
          d, q_list, threads, out.csv_path.empty() ? nullptr : &csv);
      out.csv_text = csv;
    } else {
      throw InvalidInput("no command selected");
    }
  } catch (const InvalidInput& e) {
    out.exit_code = 2;
    out.error = e.what();
    return out;
  } catch (const BudgetExceeded& e) {
    out.exit_code = 3;
    out.error = e.what();
    return out;
  } catch (const InternalInvariant& e) {
    out.exit_code = 4;
    out.error = e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = 4;
    out.error = e.what();
    return out;
  }

  record["params"] = params;
  if (timing) {
    const auto ended = std::chrono::steady_clock::now();
    record["wall_ms"] =
        std::chrono::duration<double, std::milli>(ended - started).count();
  }
  out.json_text = record.dump(2);
  out.json_text += '\n';
  return out;
}

}  // namespace blockforge::cli
