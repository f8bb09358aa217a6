#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lmd/bounds.hpp"
#include "lmd/families.hpp"
#include "lmd/poly.hpp"
#include "lmd/spanspace.hpp"

namespace lmd {

// Seeded generator. Bounded draws use plain modular reduction so a seed
// gives the same stream under every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform-ish in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  // Nonzero integer in [-mag, mag].
  std::int64_t nonzero(std::int64_t mag) {
    const auto v = range(1, mag);
    return engine_() & 1 ? v : -v;
  }

 private:
  std::mt19937_64 engine_;
};

// Random monomial of exact degree deg over the first n variables.
Monomial random_monomial(Rng& rng, std::size_t n, std::uint32_t deg);

// Random polynomial with up to max_terms terms of degree <= max_deg and
// integer coefficients in [-5, 5]; may be zero only when max_terms == 0.
SparsePoly random_poly(Rng& rng, const VarTablePtr& table, std::uint32_t max_deg, std::uint32_t max_terms,
                       std::uint32_t min_deg = 0);

struct DistanceInstance {
  std::size_t n_vars = 0;
  std::uint32_t ell = 0;
  std::uint32_t d = 0;
  std::vector<Monomial> monomials;  // pairwise distance >= d
};

struct DistanceLimits {
  std::uint32_t max_s = 6;
  std::uint32_t max_vars = 6;
  std::uint32_t max_ell = 6;
  std::uint32_t max_deg = 4;
};

// Monomials are drawn by rejection until the target count is met or the
// attempt limit runs out; at least one monomial is always present.
DistanceInstance random_distance_instance(Rng& rng, const DistanceLimits& lim = {});

struct ShiftInstance {
  SparsePoly f;
  std::uint32_t k = 0;
  std::uint32_t ell = 0;
};

struct ShiftLimits {
  std::uint32_t max_vars = 4;
  std::uint32_t max_deg = 4;
  std::uint32_t max_terms = 5;
  std::uint32_t max_k = 2;
  std::uint32_t max_ell = 3;
};

ShiftInstance random_shift_instance(Rng& rng, const ShiftLimits& lim = {});

struct ShiftOutcome {
  std::size_t dimension = 0;  // dim of the shifted derivative span
  BigInt lm_count;            // shifted leading monomials of the derivative span
  bool ok = false;            // dimension >= lm_count
};

ShiftOutcome check_shift_instance(const ShiftInstance& inst, const SpanOptions& opts = {});

struct CircuitInstance {
  Depth4Circuit circuit;
  std::uint32_t top_fanin = 0;   // s'
  std::uint32_t product_fanin = 0;  // D
  std::uint32_t bottom_degree = 0;  // t
  std::uint32_t k = 0;
  std::uint32_t ell = 0;
};

struct CircuitLimits {
  std::uint32_t max_top = 3;
  std::uint32_t max_product = 3;
  std::uint32_t max_bottom = 2;
  std::uint32_t max_vars = 4;
  std::uint32_t max_k = 2;
  std::uint32_t max_ell = 3;
};

// Every product has exactly D factors of degree between 1 and t; k <= D.
CircuitInstance random_circuit_instance(Rng& rng, const CircuitLimits& lim = {});

struct CircuitOutcome {
  std::size_t dimension = 0;
  BigInt bound;
  bool ok = false;  // dimension <= bound
};

CircuitOutcome check_circuit_instance(const CircuitInstance& inst, const SpanOptions& opts = {});

}  // namespace lmd
