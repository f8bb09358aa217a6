#include "lmd/suites.hpp"

#include <algorithm>

namespace lmd {

Monomial random_monomial(Rng& rng, std::size_t n, std::uint32_t deg) {
  std::vector<std::uint32_t> exps(n, 0);
  for (std::uint32_t i = 0; i < deg; ++i) ++exps[rng.range(0, static_cast<std::int64_t>(n) - 1)];
  return Monomial::from_exponents(exps);
}

SparsePoly random_poly(Rng& rng, const VarTablePtr& table, std::uint32_t max_deg, std::uint32_t max_terms,
                       std::uint32_t min_deg) {
  SparsePoly f(table, Field::rationals());
  if (max_terms == 0) return f;
  const auto terms = rng.range(1, max_terms);
  for (std::int64_t i = 0; i < terms; ++i) {
    const auto deg = static_cast<std::uint32_t>(rng.range(min_deg, max_deg));
    f.add_term(random_monomial(rng, table->size(), deg), rng.nonzero(5));
  }
  // cancellation can empty it
  if (f.is_zero()) f.add_term(random_monomial(rng, table->size(), max_deg), 1);
  return f;
}

DistanceInstance random_distance_instance(Rng& rng, const DistanceLimits& lim) {
  DistanceInstance inst;
  inst.n_vars = static_cast<std::size_t>(rng.range(1, lim.max_vars));
  inst.ell = static_cast<std::uint32_t>(rng.range(0, lim.max_ell));
  const auto target = static_cast<std::size_t>(rng.range(1, lim.max_s));
  const auto deg = static_cast<std::uint32_t>(rng.range(1, lim.max_deg));
  inst.d = static_cast<std::uint32_t>(rng.range(1, deg));
  for (int attempt = 0; attempt < 200 && inst.monomials.size() < target; ++attempt) {
    Monomial m = random_monomial(rng, inst.n_vars, deg);
    const bool far = std::all_of(inst.monomials.begin(), inst.monomials.end(),
                                 [&](const Monomial& o) { return mono_distance(m, o) >= inst.d; });
    if (far) inst.monomials.push_back(std::move(m));
  }
  return inst;
}

ShiftInstance random_shift_instance(Rng& rng, const ShiftLimits& lim) {
  const auto n = static_cast<std::size_t>(rng.range(1, lim.max_vars));
  auto table = make_indexed_table(n);
  ShiftInstance inst{random_poly(rng, table, lim.max_deg, lim.max_terms)};
  inst.k = static_cast<std::uint32_t>(rng.range(0, lim.max_k));
  inst.ell = static_cast<std::uint32_t>(rng.range(0, lim.max_ell));
  return inst;
}

ShiftOutcome check_shift_instance(const ShiftInstance& inst, const SpanOptions& opts) {
  ShiftOutcome out;
  out.dimension = shifted_span_dimension(inst.f, inst.k, inst.ell, opts);
  const SpanBasis basis = derivative_span(inst.f, inst.k, opts);
  out.lm_count = lm_shift_count(basis.leading, inst.ell, inst.f.table().size(), opts.budget_cells);
  out.ok = BigInt(static_cast<unsigned long>(out.dimension)) >= out.lm_count;
  return out;
}

CircuitInstance random_circuit_instance(Rng& rng, const CircuitLimits& lim) {
  const auto n = static_cast<std::size_t>(rng.range(1, lim.max_vars));
  auto table = make_indexed_table(n);
  CircuitInstance inst{Depth4Circuit(table, Field::rationals())};
  inst.top_fanin = static_cast<std::uint32_t>(rng.range(1, lim.max_top));
  inst.product_fanin = static_cast<std::uint32_t>(rng.range(1, lim.max_product));
  inst.bottom_degree = static_cast<std::uint32_t>(rng.range(1, lim.max_bottom));
  inst.k = static_cast<std::uint32_t>(rng.range(0, std::min(lim.max_k, inst.product_fanin)));
  inst.ell = static_cast<std::uint32_t>(rng.range(0, lim.max_ell));
  for (std::uint32_t i = 0; i < inst.top_fanin; ++i) {
    std::vector<SparsePoly> factors;
    for (std::uint32_t j = 0; j < inst.product_fanin; ++j) {
      factors.push_back(random_poly(rng, table, inst.bottom_degree, 3, 1));
    }
    inst.circuit.add_product(std::move(factors));
  }
  return inst;
}

CircuitOutcome check_circuit_instance(const CircuitInstance& inst, const SpanOptions& opts) {
  CircuitOutcome out;
  const SparsePoly f = depth4_expand(inst.circuit, opts.budget_cells);
  out.dimension = f.is_zero() ? 0 : shifted_span_dimension(f, inst.k, inst.ell, opts);
  out.bound = depth4_upper_bound(inst.top_fanin, inst.product_fanin, inst.k, inst.bottom_degree,
                                 inst.circuit.num_vars(), inst.ell);
  out.ok = BigInt(static_cast<unsigned long>(out.dimension)) <= out.bound;
  return out;
}

}  // namespace lmd
