#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lmd/algebra.hpp"
#include "lmd/poly.hpp"
#include "lmd/spanspace.hpp"

namespace lmd {

// Coefficients (a_0, ..., a_{k-1}) of a(z) = sum a_i z^i over GF(p).
using Univariate = std::vector<std::uint32_t>;

std::uint32_t eval_univariate(const Univariate& a, std::uint32_t z, std::uint32_t p);

// All p^k univariates of degree < k, ordered lexicographically by coefficient vector.
std::vector<Univariate> all_univariates(std::uint32_t p, std::uint32_t k, std::uint64_t budget);

// Field element e of GF(p) is identified with the index e + 1 in {1..p}.
inline std::uint32_t field_to_index(std::uint32_t e) { return e + 1; }

// ---------------------------------------------------------------------------
// Design polynomial

struct NwParams {
  std::uint32_t n = 0;  // prime field size
  std::uint32_t k = 0;  // degree bound: a(z) has degree < k
};

// n^2 variables x{i}_{j}, precedence x1_1 > x1_2 > ... > x{n}_{n}.
VarTablePtr nw_table(std::uint32_t n);

// Monomial of a(z): x_{1,a(0)+1} x_{2,a(1)+1} ... x_{n,a(n-1)+1}.
Monomial nw_monomial(const NwParams& p, const Univariate& a);

SparsePoly nw_poly(const NwParams& p, Field field = Field::rationals(),
                   std::uint64_t budget = kDefaultBudgetCells);

// Derivative of the design polynomial by the first k variables of a's
// monomial. Throws InvariantViolation unless it is a lone monomial with
// coefficient 1.
Monomial nw_prefix_derivative(const SparsePoly& nw, const NwParams& p, const Univariate& a);
Monomial nw_prefix_derivative(const NwParams& p, const Univariate& a);

// ---------------------------------------------------------------------------
// Iterated matrix multiplication

struct ImmParams {
  std::uint32_t n = 0;  // matrix dimension
  std::uint32_t d = 0;  // number of matrices
};

// Variable id of x^{(t)}_{ij} in any IMM table with at least t matrices.
inline VarId imm_var(std::uint32_t n, std::uint32_t t, std::uint32_t i, std::uint32_t j) {
  return (t - 1) * n * n + (i - 1) * n + (j - 1);
}

// n^2 d variables x{t}_{i}_{j}; matrix-major, then row-major precedence.
VarTablePtr imm_table(std::uint32_t n, std::uint32_t d);

// Entry (1,1) of X^(1) ... X^(d); exactly n^(d-1) monomials.
SparsePoly imm_poly(const ImmParams& p, Field field = Field::rationals(),
                    std::uint64_t budget = kDefaultBudgetCells);

// Entry (i,j) of X^(a) ... X^(b) over an IMM table with at least b matrices.
// Variables for which `zeroed` holds are dropped. An empty range (a > b) is
// the identity.
using ZeroPattern = std::function<bool(std::uint32_t q, std::uint32_t i, std::uint32_t j)>;

SparsePoly imm_segment_poly(std::uint32_t n, std::uint32_t d, std::uint32_t a, std::uint32_t b,
                            std::uint32_t i, std::uint32_t j, const ZeroPattern& zeroed,
                            Field field = Field::rationals(), std::uint64_t budget = kDefaultBudgetCells);

// Leading monomial of the segment entry above without expanding it; nullopt
// when every path is zeroed. Variable ids follow imm_var(n, ...).
std::optional<Monomial> lm_of_segment(std::uint32_t n, const ZeroPattern& zeroed, std::uint32_t a,
                                      std::uint32_t b, std::uint32_t i, std::uint32_t j);

// Leading monomial of d/d(vars) of restricted IMM_{n,d}, by composing segment
// LMs. nullopt when the derivative vanishes.
std::optional<Monomial> lm_of_imm_derivative(std::uint32_t n, std::uint32_t d, const ZeroPattern& zeroed,
                                             std::span<const VarLabel> vars);

// Zero pattern for IMM_{n,n} with 2k chosen matrices spaced n/4k apart:
// x^{(q)}_{ij} = 0 when i != j and r + (r-2)n/4k < q < (r+1) + (r-1)n/4k - 1
// for some 2 <= r <= 2k.
class RestrictionPlan {
 public:
  // Throws PreconditionError when n/4k is not a positive integer or the last
  // chosen index is not below n.
  RestrictionPlan(std::uint32_t n, std::uint32_t k);

  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }
  std::uint32_t spacing() const { return spacing_; }
  // Matrix indices 2, 3 + n/4k, ..., 2k+1 + (2k-1)n/4k.
  const std::vector<std::uint32_t>& chosen() const { return chosen_; }

  bool zeroed(std::uint32_t q, std::uint32_t i, std::uint32_t j) const;
  bool frozen(std::uint32_t q) const;
  // Matrices neither chosen nor carrying a zero pattern.
  std::vector<std::uint32_t> unconstrained() const;

  ZeroPattern pattern() const;

 private:
  std::uint32_t n_;
  std::uint32_t k_;
  std::uint32_t spacing_;
  std::vector<std::uint32_t> chosen_;
};

struct LmFamilyMember {
  Univariate a;
  std::vector<VarLabel> s_set;  // S_a, one variable per chosen matrix
  Monomial lm;                  // LM of the derivative of the restriction by S_a
};

struct ImmLmFamily {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t p = 0;
  std::vector<std::uint32_t> chosen;
  std::vector<std::uint32_t> unconstrained;
  std::vector<LmFamilyMember> members;
};

// S_a = { x^{(c_r)}_{r, a(r-1)+1} : r = 1..2k } with c_r the chosen matrices.
std::vector<VarLabel> imm_s_set(const RestrictionPlan& plan, const Univariate& a);

// One member per univariate a of degree < k over GF(p), p the largest prime in
// [n/2, n]. Members are ordered by coefficient vector.
ImmLmFamily imm_restricted_lm_family(std::uint32_t n, std::uint32_t k,
                                     std::uint64_t budget = kDefaultBudgetCells);

// ---------------------------------------------------------------------------
// Depth-4 circuits

// sum_i Q_i1 Q_i2 ... Q_iD over a fixed table.
class Depth4Circuit {
 public:
  Depth4Circuit(VarTablePtr table, Field field);

  void add_product(std::vector<SparsePoly> factors);

  const std::vector<std::vector<SparsePoly>>& products() const { return products_; }
  const VarTablePtr& table_ptr() const { return table_; }
  const Field& field() const { return field_; }

  std::size_t top_fanin() const { return products_.size(); }  // s'
  std::size_t product_fanin() const;                          // D
  std::uint32_t bottom_degree() const;                        // t
  std::size_t num_vars() const { return table_->size(); }     // N

 private:
  VarTablePtr table_;
  Field field_;
  std::vector<std::vector<SparsePoly>> products_;
};

SparsePoly depth4_expand(const Depth4Circuit& c, std::uint64_t budget = kDefaultBudgetCells);

// s' C(D+k, k) C(N + ell + k(t-1), N). Throws PreconditionError when k > D.
BigInt depth4_upper_bound(std::uint64_t top_fanin, std::uint64_t product_fanin, std::uint64_t k,
                          std::uint64_t t, std::uint64_t n_vars, std::uint64_t ell);

}  // namespace lmd
