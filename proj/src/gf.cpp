#include "blockforge/gf.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>

namespace blockforge {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BLOCKFORGE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(int, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  if (workers > n) workers = n;
  if (workers == 1) {
    fn(0, 0, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * chunk;
    std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, w, b, e] { fn(static_cast<int>(w), b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace blockforge

namespace blockforge::gf {

namespace {

bool is_prime_u32(u32 n) {
  if (n < 2) return false;
  for (u32 d = 2; static_cast<u64>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

u64 ipow_u64(u64 b, u32 e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

u64 gcd_u64(u64 a, u64 b) {
  while (b) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// ---------------------------------------------------------------- FieldCtx

std::vector<u32> FieldCtx::digits(Fq a) const {
  std::vector<u32> ds(r);
  for (u32 i = 0; i < r; ++i) {
    ds[i] = a % p;
    a /= p;
  }
  return ds;
}

Fq FieldCtx::from_digits(const std::vector<u32>& ds) const {
  require(ds.size() == r, "digit vector length must equal extension degree");
  u64 code = 0;
  for (u32 i = r; i-- > 0;) {
    require(ds[i] < p, "digit out of range");
    code = code * p + ds[i];
  }
  return static_cast<Fq>(code);
}

Fq FieldCtx::add_slow(Fq a, Fq b) const {
  // Digit-wise addition mod p; codes are base-p digit vectors.
  Fq out = 0;
  u32 shift = 1;
  for (u32 i = 0; i < r; ++i) {
    u32 s = (a % p + b % p) % p;
    out += s * shift;
    a /= p;
    b /= p;
    shift *= p;
  }
  return out;
}

Fq FieldCtx::mul_slow(Fq a, Fq b) const {
  if (r == 1) return static_cast<Fq>((static_cast<u64>(a) * b) % p);
  u32 da[32], db[32];
  for (u32 i = 0; i < r; ++i) {
    da[i] = a % p;
    a /= p;
    db[i] = b % p;
    b /= p;
  }
  // Schoolbook product, then fold t^(r+k) via precomputed reduction rows.
  u64 prod[63] = {0};
  for (u32 i = 0; i < r; ++i) {
    if (!da[i]) continue;
    for (u32 j = 0; j < r; ++j) prod[i + j] += static_cast<u64>(da[i]) * db[j];
  }
  // Accumulators stay far below 2^64: p <= 2^10 whenever r >= 2, each cell
  // sees at most r initial products plus r folded contributions < p^2 each.
  for (u32 k = 2 * r - 2; k >= r; --k) {
    u64 c = prod[k] % p;
    prod[k] = 0;
    if (!c) continue;
    // reduce_[k - r] is the full reduction of t^k, so it lands at degree 0.
    const auto& row = reduce_[k - r];
    for (u32 i = 0; i < r; ++i) prod[i] += c * row[i];
  }
  Fq out = 0;
  u32 shift = 1;
  for (u32 i = 0; i < r; ++i) {
    out += static_cast<u32>(prod[i] % p) * shift;
    shift *= p;
  }
  return out;
}

Fq FieldCtx::inv(Fq a) const {
  require(a != 0, "division by zero");
  if (!inv_table_.empty()) return inv_table_[a];
  return pow(a, static_cast<u64>(q) - 2);
}

Fq FieldCtx::pow(Fq a, u64 e) const {
  Fq base = a;
  Fq out = 1;
  while (e) {
    if (e & 1) out = mul(out, base);
    base = mul(base, base);
    e >>= 1;
  }
  return out;
}

bool FieldCtx::is_dth_power(Fq x, u64 d) const {
  require(d >= 1, "power index must be positive");
  require(valid(x), "element out of range for this field");
  if (x == 0) return true;
  u64 dprime = gcd_u64(d, q - 1);
  if (dprime == 1) return true;
  return pow(x, (q - 1) / dprime) == 1;
}

void FieldCtx::build(u32 p_in, u32 r_in, std::vector<u32> mod) {
  p = p_in;
  r = r_in;
  q = static_cast<u32>(ipow_u64(p, r));
  modulus = std::move(mod);

  if (r > 1) {
    // reduce_[k] = t^(r+k) mod modulus. Row 0 comes straight from the monic
    // modulus; subsequent rows are shifts reduced by row 0.
    reduce_.assign(r - 1, std::vector<u32>(r, 0));
    for (u32 i = 0; i < r; ++i)
      reduce_[0][i] = (p - modulus[i] % p) % p;
    for (u32 k = 1; k + 1 < r; ++k) {
      const auto& prev = reduce_[k - 1];
      auto& row = reduce_[k];
      u32 carry = prev[r - 1];
      for (u32 i = r; i-- > 1;) row[i] = prev[i - 1];
      row[0] = 0;
      if (carry)
        for (u32 i = 0; i < r; ++i)
          row[i] = (row[i] + carry * reduce_[0][i]) % p;
    }
  }

  neg_table_.resize(q);
  for (u32 a = 0; a < q; ++a) {
    Fq out = 0;
    u32 v = a, shift = 1;
    for (u32 i = 0; i < r; ++i) {
      out += ((p - v % p) % p) * shift;
      v /= p;
      shift *= p;
    }
    neg_table_[a] = out;
  }

  if (q <= kOpTableLimit) {
    add_table_.resize(static_cast<std::size_t>(q) * q);
    mul_table_.resize(static_cast<std::size_t>(q) * q);
    for (u32 a = 0; a < q; ++a)
      for (u32 b = 0; b < q; ++b) {
        add_table_[a * q + b] = add_slow(a, b);
        mul_table_[a * q + b] = mul_slow(a, b);
      }
  }
  if (q <= kInvTableLimit) {
    inv_table_.resize(q);
    inv_table_[0] = 0;
    for (u32 a = 1; a < q; ++a) inv_table_[a] = pow(a, static_cast<u64>(q) - 2);
  }
  if (q <= kCharTableLimit) {
    square_table_.resize(q);
    for (u32 a = 0; a < q; ++a)
      square_table_[a] = is_dth_power(a, 2) ? 1 : 0;
  }
}

// ------------------------------------------------------------- make_field

namespace {

// Irreducibility over F_p for the modulus scan: f monic of degree r.
// f is irreducible iff x^(p^r) == x mod f and gcd(x^(p^(r/t)) - x, f) = 1
// for every prime t | r.
bool modulus_irreducible(const FieldCtx& Fp, const Poly& f) {
  u32 rdeg = static_cast<u32>(f.deg());
  Poly x = poly_x();
  u64 p = Fp.p;
  Poly xq = poly_powmod(Fp, x, ipow_u64(p, rdeg), f);
  if (!poly_equal(xq, poly_mod(Fp, x, f))) return false;
  u32 rem = rdeg;
  for (u32 t = 2; t <= rem; ++t) {
    if (rem % t) continue;
    while (rem % t == 0) rem /= t;
    Poly xs = poly_powmod(Fp, x, ipow_u64(p, rdeg / t), f);
    Poly g = poly_gcd(Fp, poly_sub(Fp, xs, x), f);
    if (g.deg() > 0) return false;
  }
  return true;
}

std::map<std::pair<u32, u32>, FieldCtxPtr>& ctx_cache() {
  static std::map<std::pair<u32, u32>, FieldCtxPtr> cache;
  return cache;
}
std::mutex& ctx_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FieldCtxPtr make_field(u32 p, u32 r, u64 size_cap) {
  require(is_prime_u32(p), "characteristic must be prime");
  require(r >= 1, "extension degree must be >= 1");
  u64 q = 1;
  for (u32 i = 0; i < r; ++i) {
    q *= p;
    if (q > size_cap) throw BudgetExceeded("field size exceeds the size cap");
  }

  {
    std::lock_guard<std::mutex> lock(ctx_mutex());
    auto it = ctx_cache().find({p, r});
    if (it != ctx_cache().end()) return it->second;
  }

  std::vector<u32> mod;
  if (r == 1) {
    mod = {0, 1};  // t
  } else {
    // Scan monic degree-r polynomials so that the non-leading coefficient
    // vector ascends lexicographically low-degree-first: the constant term
    // is the most significant digit of the counter.
    auto fp = std::make_shared<FieldCtx>();
    fp->build(p, 1, {0, 1});
    u64 total = ipow_u64(p, r);
    for (u64 code = 0;; ++code) {
      invariant(code < total, "no irreducible modulus found in scan");
      std::vector<Fq> coeffs(r + 1, 0);
      u64 v = code;
      for (u32 i = r; i-- > 0;) {
        coeffs[i] = static_cast<Fq>(v % p);
        v /= p;
      }
      coeffs[r] = 1;
      Poly f = poly_from(coeffs);
      if (modulus_irreducible(*fp, f)) {
        mod.assign(coeffs.begin(), coeffs.end());
        break;
      }
    }
  }

  auto ctx = std::make_shared<FieldCtx>();
  ctx->build(p, r, std::move(mod));
  FieldCtxPtr out = ctx;
  {
    std::lock_guard<std::mutex> lock(ctx_mutex());
    auto [it, inserted] = ctx_cache().emplace(std::make_pair(p, r), out);
    if (!inserted) return it->second;
  }
  return out;
}

namespace {
std::map<std::array<u32, 3>, std::pair<FieldCtxPtr, FieldEmbedding>>&
embedding_cache() {
  static std::map<std::array<u32, 3>, std::pair<FieldCtxPtr, FieldEmbedding>>
      cache;
  return cache;
}
}  // namespace

std::pair<FieldCtxPtr, FieldEmbedding> extend_field(const FieldCtxPtr& ctx,
                                                    u32 m, u64 size_cap) {
  require(static_cast<bool>(ctx), "null field context");
  require(m >= 1, "extension degree must be >= 1");
  u64 qm = 1;
  for (u32 i = 0; i < ctx->r * m; ++i) {
    qm *= ctx->p;
    if (qm > size_cap)
      throw BudgetExceeded("extension field size exceeds the size cap");
  }
  {
    std::lock_guard<std::mutex> lock(ctx_mutex());
    auto it = embedding_cache().find({ctx->p, ctx->r, m});
    if (it != embedding_cache().end()) return it->second;
  }
  FieldCtxPtr big = make_field(ctx->p, ctx->r * m, size_cap);

  FieldEmbedding emb;
  emb.src = ctx;
  emb.dst = big;
  // Smallest root (canonical order) of the small modulus in the big field.
  // Coefficients of the modulus live in F_p, whose codes coincide in both
  // contexts.
  Fq root = 0;
  bool found = false;
  for (u32 x = 0; x < big->q; ++x) {
    Fq acc = 0;
    for (u32 i = static_cast<u32>(ctx->modulus.size()); i-- > 0;) {
      acc = big->add(big->mul(acc, x), big->from_int(ctx->modulus[i]));
    }
    if (acc == 0) {
      root = x;
      found = true;
      break;
    }
  }
  invariant(found, "modulus has no root in the extension field");
  emb.root = root;

  emb.table.resize(ctx->q);
  std::vector<Fq> pow_root(ctx->r);
  pow_root[0] = 1;
  for (u32 i = 1; i < ctx->r; ++i) pow_root[i] = big->mul(pow_root[i - 1], root);
  for (u32 a = 0; a < ctx->q; ++a) {
    Fq acc = 0;
    u32 v = a;
    for (u32 i = 0; i < ctx->r; ++i) {
      u32 digit = v % ctx->p;
      v /= ctx->p;
      if (digit)
        acc = big->add(acc, big->mul(big->from_int(digit), pow_root[i]));
    }
    emb.table[a] = acc;
  }
  invariant(emb.table[0] == 0 && emb.table[1] == 1,
            "embedding must fix 0 and 1");
  std::pair<FieldCtxPtr, FieldEmbedding> out{big, std::move(emb)};
  {
    std::lock_guard<std::mutex> lock(ctx_mutex());
    embedding_cache().emplace(std::array<u32, 3>{ctx->p, ctx->r, m}, out);
  }
  return out;
}

// ------------------------------------------------------------ polynomials

namespace {
void trim(Poly& a) {
  while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
}
}  // namespace

Poly poly_from(std::vector<Fq> coeffs) {
  Poly out;
  out.c = std::move(coeffs);
  trim(out);
  return out;
}
Poly poly_x() { return poly_from({0, 1}); }
Poly poly_const(Fq a) { return poly_from({a}); }

bool poly_equal(const Poly& a, const Poly& b) { return a.c == b.c; }

Poly poly_add(const FieldCtx& F, const Poly& a, const Poly& b) {
  Poly out;
  out.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    Fq x = i < a.c.size() ? a.c[i] : 0;
    Fq y = i < b.c.size() ? b.c[i] : 0;
    out.c[i] = F.add(x, y);
  }
  trim(out);
  return out;
}

Poly poly_sub(const FieldCtx& F, const Poly& a, const Poly& b) {
  Poly out;
  out.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    Fq x = i < a.c.size() ? a.c[i] : 0;
    Fq y = i < b.c.size() ? b.c[i] : 0;
    out.c[i] = F.sub(x, y);
  }
  trim(out);
  return out;
}

Poly poly_scale(const FieldCtx& F, const Poly& a, Fq s) {
  if (s == 0) return Poly{};
  Poly out = a;
  for (auto& x : out.c) x = F.mul(x, s);
  return out;
}

Poly poly_mul(const FieldCtx& F, const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly{};
  Poly out;
  out.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      out.c[i + j] = F.add(out.c[i + j], F.mul(a.c[i], b.c[j]));
  }
  trim(out);
  return out;
}

std::pair<Poly, Poly> poly_divrem(const FieldCtx& F, const Poly& a,
                                  const Poly& b) {
  require(!b.is_zero(), "polynomial division by zero");
  if (a.deg() < b.deg()) return {Poly{}, a};
  Poly rem = a;
  Poly quo;
  quo.c.assign(a.c.size() - b.c.size() + 1, 0);
  Fq lead_inv = F.inv(b.c.back());
  for (int k = rem.deg(); k >= b.deg(); --k) {
    std::size_t ku = static_cast<std::size_t>(k);
    if (ku >= rem.c.size() || rem.c[ku] == 0) continue;
    Fq coef = F.mul(rem.c[ku], lead_inv);
    std::size_t shift = ku - b.c.size() + 1;
    quo.c[shift] = coef;
    for (std::size_t i = 0; i < b.c.size(); ++i)
      rem.c[shift + i] = F.sub(rem.c[shift + i], F.mul(coef, b.c[i]));
  }
  trim(quo);
  trim(rem);
  return {quo, rem};
}

Poly poly_mod(const FieldCtx& F, const Poly& a, const Poly& b) {
  return poly_divrem(F, a, b).second;
}

Poly poly_monic(const FieldCtx& F, const Poly& a) {
  if (a.is_zero()) return a;
  return poly_scale(F, a, F.inv(a.c.back()));
}

Poly poly_gcd(const FieldCtx& F, Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = poly_mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(F, a);
}

Poly poly_derivative(const FieldCtx& F, const Poly& a) {
  if (a.deg() < 1) return Poly{};
  Poly out;
  out.c.assign(a.c.size() - 1, 0);
  for (std::size_t i = 1; i < a.c.size(); ++i)
    out.c[i - 1] = F.mul(a.c[i], F.from_int(i));
  trim(out);
  return out;
}

Poly poly_powmod(const FieldCtx& F, const Poly& base, u64 e, const Poly& mod) {
  Poly acc = poly_mod(F, poly_const(1), mod);
  Poly b = poly_mod(F, base, mod);
  while (e) {
    if (e & 1) acc = poly_mod(F, poly_mul(F, acc, b), mod);
    b = poly_mod(F, poly_mul(F, b, b), mod);
    e >>= 1;
  }
  return acc;
}

Fq poly_eval(const FieldCtx& F, const Poly& a, Fq x) {
  Fq acc = 0;
  for (std::size_t i = a.c.size(); i-- > 0;) acc = F.add(F.mul(acc, x), a.c[i]);
  return acc;
}

namespace {

// p-th root deflation: g(x) = h(x^p) with h coefficients the p-th roots
// (c -> c^(q/p), the inverse Frobenius).
Poly pth_root_deflate(const FieldCtx& F, const Poly& g) {
  u64 root_exp = 1;
  for (u32 i = 0; i + 1 < F.r; ++i) root_exp *= F.p;  // p^(r-1)
  Poly h;
  h.c.assign(g.c.size() / F.p + 1, 0);
  for (std::size_t i = 0; i < g.c.size(); ++i) {
    if (g.c[i] == 0) continue;
    invariant(i % F.p == 0, "deflation input has stray exponent");
    h.c[i / F.p] = F.pow(g.c[i], root_exp);
  }
  trim(h);
  return h;
}

// Squarefree decomposition in characteristic p: list of (squarefree part,
// multiplicity), multiplicities distinct.
void squarefree_parts(const FieldCtx& F, const Poly& f, u32 mult_scale,
                      std::vector<std::pair<Poly, u32>>& out) {
  Poly fp = poly_derivative(F, f);
  if (fp.is_zero()) {
    // f = h(x^p): recurse with multiplicities scaled by p.
    squarefree_parts(F, pth_root_deflate(F, f), mult_scale * F.p, out);
    return;
  }
  Poly g = poly_gcd(F, f, fp);
  Poly w = poly_divrem(F, f, g).first;
  u32 i = 1;
  while (w.deg() > 0) {
    Poly y = poly_gcd(F, w, g);
    Poly fac = poly_divrem(F, w, y).first;
    if (fac.deg() > 0) out.emplace_back(poly_monic(F, fac), i * mult_scale);
    g = poly_divrem(F, g, y).first;
    w = std::move(y);
    ++i;
  }
  // Residual part: every remaining multiplicity is divisible by p.
  if (g.deg() > 0)
    squarefree_parts(F, pth_root_deflate(F, g), mult_scale * F.p, out);
}

}  // namespace

std::vector<std::pair<u32, u32>> factor_degrees(const FieldCtx& F,
                                                const Poly& f_in) {
  require(!f_in.is_zero(), "factor_degrees of the zero polynomial");
  std::vector<std::pair<u32, u32>> out;
  if (f_in.deg() == 0) return out;
  Poly f = poly_monic(F, f_in);

  std::vector<std::pair<Poly, u32>> parts;
  squarefree_parts(F, f, 1, parts);

  for (auto& [sf, mult] : parts) {
    // Distinct-degree splitting of the squarefree part.
    Poly g = sf;
    Poly x = poly_x();
    Poly h = poly_mod(F, x, g);
    u32 k = 0;
    while (g.deg() > 0 && 2 * (k + 1) <= static_cast<u32>(g.deg())) {
      ++k;
      h = poly_powmod(F, h, F.q, g);
      Poly d = poly_gcd(F, poly_sub(F, h, poly_mod(F, x, g)), g);
      if (d.deg() > 0) {
        u32 count = static_cast<u32>(d.deg()) / k;
        for (u32 c = 0; c < count; ++c) out.emplace_back(k, mult);
        g = poly_divrem(F, g, d).first;
        h = poly_mod(F, h, g);
      }
    }
    if (g.deg() > 0) out.emplace_back(static_cast<u32>(g.deg()), mult);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool poly_irreducible(const FieldCtx& F, const Poly& f) {
  require(f.deg() >= 1, "irreducibility needs degree >= 1");
  auto fd = factor_degrees(F, f);
  return fd.size() == 1 && fd[0].first == static_cast<u32>(f.deg()) &&
         fd[0].second == 1;
}

// ---------------------------------------------------------------- matrices

MatrixFq make_matrix(std::size_t rows, std::size_t cols) {
  MatrixFq m;
  m.rows = rows;
  m.cols = cols;
  m.a.assign(rows * cols, 0);
  return m;
}

std::size_t rank_fq(const FieldCtx& F, MatrixFq m) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < m.rows && m.at(pivot, col) == 0) ++pivot;
    if (pivot == m.rows) continue;
    if (pivot != rank)
      for (std::size_t j = col; j < m.cols; ++j)
        std::swap(m.at(pivot, j), m.at(rank, j));
    Fq piv_inv = F.inv(m.at(rank, col));
    for (std::size_t j = col; j < m.cols; ++j)
      m.at(rank, j) = F.mul(m.at(rank, j), piv_inv);
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == rank || m.at(i, col) == 0) continue;
      Fq factor = m.at(i, col);
      for (std::size_t j = col; j < m.cols; ++j)
        m.at(i, j) = F.sub(m.at(i, j), F.mul(factor, m.at(rank, j)));
    }
    ++rank;
  }
  return rank;
}

std::optional<std::vector<Fq>> linear_solve(const FieldCtx& F,
                                            const MatrixFq& m,
                                            const std::vector<Fq>& b) {
  require(b.size() == m.rows, "rhs length mismatch");
  MatrixFq aug = make_matrix(m.rows, m.cols + 1);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols) = b[i];
  }
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < aug.rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < aug.rows && aug.at(pivot, col) == 0) ++pivot;
    if (pivot == aug.rows) continue;
    if (pivot != rank)
      for (std::size_t j = col; j <= m.cols; ++j)
        std::swap(aug.at(pivot, j), aug.at(rank, j));
    Fq piv_inv = F.inv(aug.at(rank, col));
    for (std::size_t j = col; j <= m.cols; ++j)
      aug.at(rank, j) = F.mul(aug.at(rank, j), piv_inv);
    for (std::size_t i = 0; i < aug.rows; ++i) {
      if (i == rank || aug.at(i, col) == 0) continue;
      Fq factor = aug.at(i, col);
      for (std::size_t j = col; j <= m.cols; ++j)
        aug.at(i, j) = F.sub(aug.at(i, j), F.mul(factor, aug.at(rank, j)));
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (std::size_t i = rank; i < aug.rows; ++i)
    if (aug.at(i, m.cols) != 0) return std::nullopt;
  std::vector<Fq> x(m.cols, 0);
  for (std::size_t i = 0; i < rank; ++i) x[pivot_col[i]] = aug.at(i, m.cols);
  return x;
}

}  // namespace blockforge::gf
