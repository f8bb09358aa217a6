#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lmd/algebra.hpp"
#include "lmd/poly.hpp"

namespace lmd {

inline constexpr std::uint64_t kDefaultBudgetCells = 20'000'000;

struct SpanOptions {
  PrimeField field{};
  // Upper limit on dense matrix cells (and on enumerated shift products).
  std::uint64_t budget_cells = kDefaultBudgetCells;
};

// Dense matrix over GF(p). When built from polynomials, rows follow the input
// order and columns enumerate the union of supports in decreasing lex order,
// so column 0 is the greatest monomial.
class CoeffMatrix {
 public:
  using Element = PrimeField::Element;

  CoeffMatrix(PrimeField field, std::size_t rows, std::size_t cols);

  static CoeffMatrix from_polys(std::span<const SparsePoly> polys, const SpanOptions& opts);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const PrimeField& field() const { return field_; }

  Element& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Element at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<Element> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Element> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  // Column labels; empty for matrices not built from polynomials.
  const std::vector<Monomial>& columns() const { return columns_; }

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Element> data_;
  std::vector<Monomial> columns_;
};

// Rank by fraction-free forward elimination, pivot columns taken left to right.
std::size_t rank_ff(CoeffMatrix m);

// Exact rank over the rationals by Gaussian elimination.
std::size_t rank_rational(std::vector<std::vector<BigRational>> rows);

struct SpanBasis {
  // Reduced row-echelon basis over GF(p), one polynomial per pivot.
  std::vector<SparsePoly> basis;
  // leading[i] is LM(basis[i]); pairwise distinct, sorted decreasingly.
  std::vector<Monomial> leading;

  std::size_t rank() const { return basis.size(); }
};

SpanBasis span_basis(std::span<const SparsePoly> polys, const SpanOptions& opts = {});

// All nonzero derivatives of order k, deduplicated and sorted canonically.
std::vector<SparsePoly> order_k_derivatives(const SparsePoly& f, std::uint32_t k);

SpanBasis derivative_span(const SparsePoly& f, std::uint32_t k, const SpanOptions& opts = {});

// Every monomial of total degree <= ell in the first n variables.
std::vector<Monomial> monomials_up_to(std::size_t n, std::uint32_t ell, std::uint64_t budget);

// dim span { x^i * d^j f : |i| <= ell, |j| = k } over GF(p), with shifts
// ranging over all variables of f's table.
std::size_t shifted_span_dimension(const SparsePoly& f, std::uint32_t k, std::uint32_t ell,
                                   const SpanOptions& opts = {});

// |{ x^i * m : |i| <= ell, m in lms }| with x^i over n variables.
BigInt lm_shift_count(std::span<const Monomial> lms, std::uint32_t ell, std::size_t n,
                      std::uint64_t budget = kDefaultBudgetCells);

}  // namespace lmd
