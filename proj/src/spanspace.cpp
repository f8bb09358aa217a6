#include "lmd/spanspace.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace lmd {

namespace {

void check_budget(std::uint64_t cells, std::uint64_t budget, const char* what) {
  if (cells > budget) {
    throw BudgetExceeded(std::string(what) + " needs " + std::to_string(cells) +
                         " cells, budget is " + std::to_string(budget));
  }
}

// Term-by-term comparison giving a total order on polynomials of one table.
bool poly_less(const SparsePoly& a, const SparsePoly& b) {
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
    if (int c = lex_compare(ia->first, ib->first); c != 0) return c > 0;
    if (ia->second != ib->second) return ia->second < ib->second;
  }
  return ia == a.terms().end() && ib != b.terms().end();
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return UINT64_MAX;
  return r;
}

// Degree-k sub-multisets of m's variables.
void divisors_of_degree(std::span<const Monomial::Factor> f, std::size_t idx, std::uint32_t left,
                        std::vector<Monomial::Factor>& cur, std::unordered_set<Monomial, MonomialHash>& out) {
  if (left == 0) {
    out.insert(Monomial::from_factors(cur));
    return;
  }
  if (idx == f.size()) return;
  std::uint32_t remaining = 0;
  for (std::size_t i = idx; i < f.size(); ++i) remaining += f[i].exp;
  if (remaining < left) return;
  for (std::uint32_t e = 0; e <= std::min(left, f[idx].exp); ++e) {
    if (e > 0) cur.push_back({f[idx].var, e});
    divisors_of_degree(f, idx + 1, left - e, cur, out);
    if (e > 0) cur.pop_back();
  }
}

}  // namespace

CoeffMatrix::CoeffMatrix(PrimeField field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

CoeffMatrix CoeffMatrix::from_polys(std::span<const SparsePoly> polys, const SpanOptions& opts) {
  std::map<Monomial, std::size_t, LexGreater> index;
  for (const auto& p : polys) {
    for (const auto& [m, c] : p.terms()) index.emplace(m, 0);
  }
  check_budget(saturating_mul(polys.size(), index.size()), opts.budget_cells, "coefficient matrix");
  std::vector<Monomial> columns;
  columns.reserve(index.size());
  for (auto& [m, col] : index) {
    col = columns.size();
    columns.push_back(m);
  }
  CoeffMatrix out(opts.field, polys.size(), columns.size());
  for (std::size_t r = 0; r < polys.size(); ++r) {
    for (const auto& [m, c] : polys[r].terms()) out.at(r, index.at(m)) = opts.field.reduce(c);
  }
  out.columns_ = std::move(columns);
  return out;
}

std::size_t rank_ff(CoeffMatrix m) {
  const PrimeField& F = m.field();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < m.rows() && m.at(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != rank) {
      auto a = m.row(piv);
      auto b = m.row(rank);
      std::swap_ranges(a.begin(), a.end(), b.begin());
    }
    const auto pivot = m.at(rank, col);
    auto prow = m.row(rank);
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      const auto lead = m.at(r, col);
      if (lead == 0) continue;
      // row_r <- pivot * row_r - lead * row_pivot
      auto row = m.row(r);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (row[c] == 0 && prow[c] == 0) continue;
        row[c] = F.sub(F.mul(pivot, row[c]), F.mul(lead, prow[c]));
      }
    }
    ++rank;
  }
  return rank;
}

std::size_t rank_rational(std::vector<std::vector<BigRational>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][col] == 0) continue;
      BigRational factor = rows[r][col] / rows[rank][col];
      for (std::size_t c = col; c < cols; ++c) {
        if (rows[rank][c] != 0) rows[r][c] -= factor * rows[rank][c];
      }
    }
    ++rank;
  }
  return rank;
}

SpanBasis span_basis(std::span<const SparsePoly> polys, const SpanOptions& opts) {
  SpanBasis out;
  if (polys.empty()) return out;
  const PrimeField& F = opts.field;
  CoeffMatrix m = CoeffMatrix::from_polys(polys, opts);

  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < m.rows() && m.at(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != rank) {
      auto a = m.row(piv);
      auto b = m.row(rank);
      std::swap_ranges(a.begin(), a.end(), b.begin());
    }
    auto prow = m.row(rank);
    const auto inv = F.inv(prow[col]);
    for (std::size_t c = col; c < m.cols(); ++c) prow[c] = F.mul(prow[c], inv);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank) continue;
      const auto lead = m.at(r, col);
      if (lead == 0) continue;
      auto row = m.row(r);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (prow[c] != 0) row[c] = F.sub(row[c], F.mul(lead, prow[c]));
      }
    }
    pivot_cols.push_back(col);
    ++rank;
  }

  const Field gf = Field::prime(F.modulus());
  const auto& table = polys.front().table_ptr();
  for (std::size_t r = 0; r < rank; ++r) {
    SparsePoly p(table, gf);
    for (std::size_t c = pivot_cols[r]; c < m.cols(); ++c) {
      if (m.at(r, c) != 0) p.add_term(m.columns()[c], Scalar(BigInt(static_cast<unsigned long>(m.at(r, c)))));
    }
    out.leading.push_back(m.columns()[pivot_cols[r]]);
    out.basis.push_back(std::move(p));
  }
  return out;
}

std::vector<SparsePoly> order_k_derivatives(const SparsePoly& f, std::uint32_t k) {
  std::unordered_set<Monomial, MonomialHash> by;
  std::vector<Monomial::Factor> cur;
  for (const auto& [m, c] : f.terms()) {
    if (m.degree() >= k) divisors_of_degree(m.factors(), 0, k, cur, by);
  }
  std::vector<SparsePoly> out;
  out.reserve(by.size());
  for (const auto& m : by) {
    SparsePoly d = derive(f, m);
    if (!d.is_zero()) out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), poly_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SpanBasis derivative_span(const SparsePoly& f, std::uint32_t k, const SpanOptions& opts) {
  auto ders = order_k_derivatives(f, k);
  return span_basis(ders, opts);
}

std::vector<Monomial> monomials_up_to(std::size_t n, std::uint32_t ell, std::uint64_t budget) {
  BigInt count = binomial_exact(n + ell, ell);
  if (count > BigInt(static_cast<unsigned long>(budget))) {
    throw BudgetExceeded("enumerating " + count.get_str() + " shift monomials exceeds budget " +
                         std::to_string(budget));
  }
  std::vector<Monomial> out;
  out.reserve(count.get_ui());
  std::vector<std::uint32_t> exps(n, 0);
  // Depth-first over exponent vectors with total degree <= ell.
  auto rec = [&](auto&& self, std::size_t var, std::uint32_t left) -> void {
    if (var == n) {
      out.push_back(Monomial::from_exponents(exps));
      return;
    }
    for (std::uint32_t e = 0; e <= left; ++e) {
      exps[var] = e;
      self(self, var + 1, left - e);
    }
    exps[var] = 0;
  };
  rec(rec, 0, ell);
  return out;
}

std::size_t shifted_span_dimension(const SparsePoly& f, std::uint32_t k, std::uint32_t ell,
                                   const SpanOptions& opts) {
  SpanBasis base = derivative_span(f, k, opts);
  if (base.rank() == 0) return 0;
  auto shifts = monomials_up_to(f.table().size(), ell, opts.budget_cells);
  check_budget(saturating_mul(base.rank(), shifts.size()), opts.budget_cells, "shifted derivative rows");
  std::vector<SparsePoly> rows;
  rows.reserve(base.rank() * shifts.size());
  for (const auto& g : base.basis) {
    for (const auto& s : shifts) rows.push_back(g.shifted(s));
  }
  std::sort(rows.begin(), rows.end(), poly_less);
  return rank_ff(CoeffMatrix::from_polys(rows, opts));
}

BigInt lm_shift_count(std::span<const Monomial> lms, std::uint32_t ell, std::size_t n, std::uint64_t budget) {
  if (lms.empty()) return 0;
  auto shifts = monomials_up_to(n, ell, budget);
  check_budget(saturating_mul(lms.size(), shifts.size()), budget, "shifted leading monomials");
  std::unordered_set<Monomial, MonomialHash> seen;
  seen.reserve(lms.size() * shifts.size());
  for (const auto& m : lms) {
    for (const auto& s : shifts) seen.insert(m * s);
  }
  return BigInt(static_cast<unsigned long>(seen.size()));
}

}  // namespace lmd
