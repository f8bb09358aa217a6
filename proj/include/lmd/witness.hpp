#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmd/algebra.hpp"
#include "lmd/poly.hpp"

namespace lmd {

// Square integer matrix of second derivatives with labelled rows/columns.
class HessianMatrix {
 public:
  explicit HessianMatrix(std::vector<VarLabel> labels);

  std::size_t dim() const { return labels_.size(); }
  const VarLabel& label(std::size_t r) const { return labels_[r]; }

  BigInt& at(std::size_t r, std::size_t c) { return data_[r * dim() + c]; }
  const BigInt& at(std::size_t r, std::size_t c) const { return data_[r * dim() + c]; }

  bool is_symmetric() const;
  // True when every entry whose row and column share a label.t is zero.
  bool zero_diagonal_blocks() const;

 private:
  std::vector<VarLabel> labels_;
  std::vector<BigInt> data_;
};

std::size_t rank_mod_p(const HessianMatrix& h, const PrimeField& field = PrimeField{});
std::size_t rank_exact(const HessianMatrix& h);

// Values of x^{(t)}_{ij} indexed by imm_var(n, t, i, j).
using ImmPoint = std::vector<BigInt>;

// Hessian of IMM_{n,d} at a point, assembled from prefix, middle and suffix
// matrix products. Rows/columns follow the IMM variable order.
HessianMatrix imm_hessian_at(std::uint32_t n, std::uint32_t d, std::span<const BigInt> point);

// X^(1) ... X^(d) evaluated at the point, entry (1,1).
BigInt imm_value_at(std::uint32_t n, std::uint32_t d, std::span<const BigInt> point);

struct WitnessStep {
  std::uint32_t level = 0;  // number of matrices after this step
  std::uint32_t pivot = 0;  // row i* of X^(level-1) set to ones beyond column 1
  std::vector<BigInt> s_values;  // s_2 .. s_n
};

struct WitnessPoint {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  ImmPoint values;
  std::vector<WitnessStep> steps;

  const BigInt& value(std::uint32_t t, std::uint32_t i, std::uint32_t j) const;
  BigInt& value(std::uint32_t t, std::uint32_t i, std::uint32_t j);
};

// Inductive zero of IMM_{n,d} with Hessian rank >= d(n-1). Requires n, d >= 2.
WitnessPoint construct_witness(std::uint32_t n, std::uint32_t d);

struct WitnessReport {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  BigInt imm_value;
  bool zero_ok = false;
  std::size_t rank_mod_p = 0;
  std::optional<std::size_t> rank_exact;
  std::size_t rank_required = 0;  // d(n-1)
  bool rank_ok = false;
  bool prefix_ok = false;
  // First prefix length d' whose entries (1,2..n) all vanish.
  std::optional<std::uint32_t> failing_prefix;
  bool pass = false;
};

// Never throws on failed checks; the report carries them.
WitnessReport verify_witness(const WitnessPoint& w, bool exact_rank = false,
                             const PrimeField& field = PrimeField{});

std::string witness_to_json(const WitnessPoint& w);
// Throws PreconditionError on malformed input or an incomplete assignment.
WitnessPoint witness_from_json(std::string_view text);

// Hessian of det(Y) at a scalar m x m matrix, from the Leibniz expansion.
// Rows/columns are labelled (0, i, j) for y_ij. Throws BudgetExceeded for m > 8.
HessianMatrix det_hessian_at(std::uint32_t m, const std::vector<std::vector<BigInt>>& y);

// diag(0, 1, ..., 1)
std::vector<std::vector<BigInt>> singular_diagonal(std::uint32_t m);

// Nonzero entries of a determinant Hessian whose index pair (ij, kl) is not
// one of (11,tt), (tt,11), (t1,1t), (1t,t1) with t > 1.
std::size_t det_pattern_violations(const HessianMatrix& h);

struct HessianRankComparison {
  std::size_t imm_rank = 0;  // at the witness point
  std::size_t det_rank = 0;  // at diag(0,1,...,1) of size m
  bool consistent = false;   // imm_rank <= det_rank
};

// A determinantal representation of size m would force imm_rank <= det_rank.
HessianRankComparison compare_hessian_ranks(std::uint32_t n, std::uint32_t d, std::uint32_t m);

}  // namespace lmd
