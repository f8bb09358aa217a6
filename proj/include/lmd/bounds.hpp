#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmd/algebra.hpp"
#include "lmd/poly.hpp"
#include "lmd/spanspace.hpp"

namespace lmd {

// s * C(N+ell, N) - s^2 * C(N+ell-d, N); may be negative.
BigInt extension_lower_bound(const BigInt& s, std::uint64_t n_vars, std::uint64_t ell, std::uint64_t d);

struct DistanceLemmaCheck {
  BigInt exact;  // number of distinct padded monomials
  BigInt bound;  // extension_lower_bound
  bool ok = false;
};

// Checks the extension count against the formula. Throws PreconditionError
// naming the first pair closer than d.
DistanceLemmaCheck verify_distance_lemma(std::span<const Monomial> monomials, std::size_t n_vars,
                                         std::uint32_t ell, std::uint32_t d,
                                         std::uint64_t budget = kDefaultBudgetCells);

// Parameters of the size lower bound. k, d, s describe the derivative family;
// delta, c, c_prime, epsilon, mu are the constants of the argument.
struct BoundParams {
  std::uint64_t N = 0;  // variables
  std::uint64_t n = 0;  // degree
  std::uint64_t k = 0;  // derivative order
  std::uint64_t d = 0;  // pairwise LM distance
  BigInt s = 0;         // family size
  double ell = 0.0;     // shift
  double delta = 1.0;
  double c = 2.0;
  double c_prime = 1.0;
  double epsilon = 0.05;
  double mu = 0.5;
  double pexp = 1.0;  // slack polynomial p(N) = N^pexp

  // Throws PreconditionError when 0 < epsilon < 1, c > 1, 0 < mu < 1 or
  // positivity of the counts fails.
  void validate() const;
};

struct ShiftWindow {
  double ell_min = 0.0;  // N sqrt(n) / (mu delta ln n)
  double ell_max = 0.0;  // N sqrt(n) / (4 c delta epsilon ln n)
  bool feasible = false;  // epsilon < mu / 4c
};

ShiftWindow shift_window(const BoundParams& p);

struct SPrimeBound {
  double ln_bound = 0.0;  // lower bound on ln s'
  bool kt_guard = false;  // (kt - k)^2 <= ell / 10
  bool d_guard = false;   // d^2 <= (N + ell) / 10
  bool in_window = false;
};

// ln s' >= ln s + ln(1 - N^-pexp) - ln C(D+k, k) - (N/ell)(kt - k).
SPrimeBound sprime_lower_bound(const BoundParams& p, std::uint64_t t, std::uint64_t D);

struct BoundReport {
  ShiftWindow window;
  std::optional<BigInt> exact_extension_bound;  // when it fits in 4096 bits
  SPrimeBound sprime;
  bool feasible = false;  // window nonempty and epsilon < min(c', mu/4c)
};

BoundReport bound_report(const BoundParams& p, std::uint64_t t, std::uint64_t D);

struct ChainCheck {
  double ell = 0.0;         // floor(N d / (2 ln(s N^pexp)))
  double lhs_ln = 0.0;      // ln s + d ln(ell / (N + ell))
  double rhs_ln = 0.0;      // -pexp ln N
  bool holds = false;
  bool exact = false;       // decided by big-integer comparison
  bool guards_pass = false;
};

// s (ell/(N+ell))^d <= N^-pexp at the largest ell allowed by
// ell <= N d / (2 ln(s N^pexp)).
ChainCheck chain_inequality(const BoundParams& p);

// ---------------------------------------------------------------------------
// Calibrated sweeps

struct SweepConstants {
  double epsilon = 0.05;
  double mu = 0.5;
  double c_prime = 0.1;
  double pexp = 1.0;
};

struct SweepRow {
  std::string family;
  BoundParams params;
  std::uint64_t t = 0;
  std::uint64_t D = 0;
  BoundReport report;
  double ratio = 0.0;  // ln bound / (sqrt(n) ln n)
};

// Design family: N = n^2, s = n^k, d = n - 2k, delta = 1, c = 2.
SweepRow nw_calibrated(std::uint64_t n, const SweepConstants& k);
// Restricted IMM: N = n^2(n-2) + 2n, s = p^k, d = n/4, delta = 1/4, c = 4.
SweepRow imm_calibrated(std::uint64_t n, const SweepConstants& k);
// Caller-supplied delta and c; d = ceil(n/c), s = ceil(n^(delta k)), N = n^2.
SweepRow custom_calibrated(std::uint64_t n, double delta, double c, const SweepConstants& k);

inline constexpr const char* kSweepCsvHeader =
    "family,n,N,k,d,s,ell,delta,c,c_prime,epsilon,mu,pexp,t,D,ell_min,ell_max,feasible,"
    "exact_extension_bound,ln_sprime_bound,ratio,kt_guard,d_guard";

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace lmd
