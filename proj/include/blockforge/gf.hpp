#pragma once

#include <array>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "blockforge/common.hpp"

namespace blockforge::gf {

// Field elements are canonical integer codes in [0, q): an element with
// digit vector (e_0, ..., e_{r-1}) over F_p (e_i = coefficient of t^i in the
// residue representative) has code sum e_i * p^i. Code order is the canonical
// element order used for every deterministic tie-break in the project.
using Fq = u32;

class FieldCtx;
using FieldCtxPtr = std::shared_ptr<const FieldCtx>;

class FieldCtx {
 public:
  u32 p = 0;  // characteristic, prime
  u32 r = 0;  // extension degree over F_p
  u32 q = 0;  // p^r
  // Monic modulus of degree r over F_p, constant coefficient first. For r > 1
  // it is the lexicographically smallest irreducible choice, comparing
  // coefficient vectors low-degree-first; for r = 1 it is t itself.
  std::vector<u32> modulus;

  Fq zero() const { return 0; }
  Fq one() const { return 1; }

  // Constant from the prime subfield (reduces v mod p).
  Fq from_int(u64 v) const { return static_cast<Fq>(v % p); }

  bool valid(Fq a) const { return a < q; }

  Fq add(Fq a, Fq b) const {
    return add_table_.empty() ? add_slow(a, b) : add_table_[a * q + b];
  }
  Fq neg(Fq a) const { return neg_table_[a]; }
  Fq sub(Fq a, Fq b) const { return add(a, neg(b)); }
  Fq mul(Fq a, Fq b) const {
    return mul_table_.empty() ? mul_slow(a, b) : mul_table_[a * q + b];
  }
  Fq inv(Fq a) const;
  Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }
  Fq pow(Fq a, u64 e) const;
  Fq frobenius(Fq a) const { return pow(a, p); }

  // x is a d-th power in F_q. 0 counts as a power; otherwise the test is
  // x^((q-1)/d') == 1 with d' = gcd(d, q-1). Computed by exponentiation; for
  // d = 2 a precomputed residue table (small q only) short-circuits it and is
  // built by the same exponentiation path.
  bool is_dth_power(Fq x, u64 d) const;
  bool is_square(Fq x) const {
    return square_table_.empty() ? is_dth_power(x, 2) : square_table_[x] != 0;
  }

  std::vector<u32> digits(Fq a) const;
  Fq from_digits(const std::vector<u32>& ds) const;

  Fq add_slow(Fq a, Fq b) const;
  Fq mul_slow(Fq a, Fq b) const;

 private:
  friend FieldCtxPtr make_field(u32 p, u32 r, u64 size_cap);

  void build(u32 p, u32 r, std::vector<u32> mod);

  std::vector<Fq> add_table_;     // q*q, only when q <= kOpTableLimit
  std::vector<Fq> mul_table_;     // q*q, only when q <= kOpTableLimit
  std::vector<Fq> neg_table_;     // q
  std::vector<Fq> inv_table_;     // q, only when q <= kInvTableLimit
  std::vector<u8> square_table_;  // q, only when q <= kCharTableLimit
  // reduce_[k] = digits of t^(r+k) mod modulus, k in [0, r-1).
  std::vector<std::vector<u32>> reduce_;
};

// Default size cap: contexts (and extension scans) beyond this fail loudly
// instead of degrading.
constexpr u64 kSizeCap = u64(1) << 20;
constexpr u32 kOpTableLimit = 1u << 10;
constexpr u32 kInvTableLimit = 1u << 16;
constexpr u32 kCharTableLimit = 1u << 12;

// Context for F_{p^r}. Deterministic: the modulus is the lexicographically
// smallest monic irreducible of degree r (coefficients compared from the
// constant term up). Contexts are cached and shared.
FieldCtxPtr make_field(u32 p, u32 r, u64 size_cap = kSizeCap);

// Ring homomorphism F_q -> F_{q^m} sending t to the smallest root (canonical
// element order) of the small modulus in the big field.
struct FieldEmbedding {
  FieldCtxPtr src;
  FieldCtxPtr dst;
  Fq root = 0;                // image of t
  std::vector<Fq> table;      // size src->q, code -> code
  Fq operator()(Fq a) const { return table[a]; }
};

// Big context is make_field(p, r*m); the embedding is precomputed for all of
// F_q. Fails loudly when q^m exceeds the size cap.
std::pair<FieldCtxPtr, FieldEmbedding> extend_field(const FieldCtxPtr& ctx,
                                                    u32 m,
                                                    u64 size_cap = kSizeCap);

// ---- dense univariate polynomials over F_q (constant coefficient first) ----

struct Poly {
  std::vector<Fq> c;  // c[i] multiplies x^i; no trailing zeros
  bool is_zero() const { return c.empty(); }
  int deg() const { return static_cast<int>(c.size()) - 1; }
};

Poly poly_from(std::vector<Fq> coeffs);
Poly poly_x();
Poly poly_const(Fq a);
Poly poly_add(const FieldCtx& F, const Poly& a, const Poly& b);
Poly poly_sub(const FieldCtx& F, const Poly& a, const Poly& b);
Poly poly_scale(const FieldCtx& F, const Poly& a, Fq s);
Poly poly_mul(const FieldCtx& F, const Poly& a, const Poly& b);
// Division with remainder; divisor must be nonzero.
std::pair<Poly, Poly> poly_divrem(const FieldCtx& F, const Poly& a,
                                  const Poly& b);
Poly poly_mod(const FieldCtx& F, const Poly& a, const Poly& b);
Poly poly_monic(const FieldCtx& F, const Poly& a);
Poly poly_gcd(const FieldCtx& F, Poly a, Poly b);  // monic (or zero)
Poly poly_derivative(const FieldCtx& F, const Poly& a);
Poly poly_powmod(const FieldCtx& F, const Poly& base, u64 e, const Poly& mod);
Fq poly_eval(const FieldCtx& F, const Poly& a, Fq x);
bool poly_equal(const Poly& a, const Poly& b);

// Multiset of (degree, multiplicity) over the monic irreducible factors of f,
// one entry per factor, sorted by (degree, multiplicity). No explicit factors
// are produced: squarefree decomposition (with p-th root deflation) followed
// by distinct-degree splitting.
std::vector<std::pair<u32, u32>> factor_degrees(const FieldCtx& F,
                                                const Poly& f);

// Exact irreducibility of a monic-normalizable univariate (used for modulus
// scans and tests): deg >= 1.
bool poly_irreducible(const FieldCtx& F, const Poly& f);

// ---- dense matrices over F_q ----

struct MatrixFq {
  std::size_t rows = 0, cols = 0;
  std::vector<Fq> a;  // row-major
  Fq& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  Fq at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

MatrixFq make_matrix(std::size_t rows, std::size_t cols);
std::size_t rank_fq(const FieldCtx& F, MatrixFq m);
// One solution of M x = b, if consistent.
std::optional<std::vector<Fq>> linear_solve(const FieldCtx& F,
                                            const MatrixFq& m,
                                            const std::vector<Fq>& b);

u64 gcd_u64(u64 a, u64 b);

}  // namespace blockforge::gf
