#include "lmd/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lmd {

namespace {

constexpr double kExactBits = 4096.0;

double ln_u(std::uint64_t v) { return std::log(static_cast<double>(v)); }

BigInt big_u(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

BigInt big_pow(std::uint64_t base, std::uint64_t e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), big_u(base).get_mpz_t(), e);
  return r;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ln C(a, b) via lgamma; used only to decide whether exact arithmetic fits.
double ln_binomial_approx(double a, double b) {
  return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
}

}  // namespace

BigInt extension_lower_bound(const BigInt& s, std::uint64_t n_vars, std::uint64_t ell, std::uint64_t d) {
  const auto N = static_cast<std::int64_t>(n_vars);
  const auto L = static_cast<std::int64_t>(ell);
  const auto D = static_cast<std::int64_t>(d);
  return s * binomial_or_zero(N + L, N) - s * s * binomial_or_zero(N + L - D, N);
}

DistanceLemmaCheck verify_distance_lemma(std::span<const Monomial> monomials, std::size_t n_vars,
                                         std::uint32_t ell, std::uint32_t d, std::uint64_t budget) {
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    for (std::size_t j = i + 1; j < monomials.size(); ++j) {
      const auto dist = mono_distance(monomials[i], monomials[j]);
      if (dist < d) {
        throw PreconditionError("monomials " + std::to_string(i) + " and " + std::to_string(j) +
                                " are at distance " + std::to_string(dist) + " < " + std::to_string(d));
      }
    }
  }
  DistanceLemmaCheck out;
  out.exact = lm_shift_count(monomials, ell, n_vars, budget);
  out.bound = extension_lower_bound(big_u(monomials.size()), n_vars, ell, d);
  out.ok = out.exact >= out.bound;
  return out;
}

void BoundParams::validate() const {
  if (!(epsilon > 0 && epsilon < 1)) throw PreconditionError("epsilon must lie in (0, 1)");
  if (!(c > 1)) throw PreconditionError("c must exceed 1");
  if (!(mu > 0 && mu < 1)) throw PreconditionError("mu must lie in (0, 1)");
  if (!(delta > 0) || !(c_prime > 0)) throw PreconditionError("delta and c' must be positive");
  if (N == 0 || n < 2 || s <= 0) throw PreconditionError("N, n and s must be positive (n >= 2)");
}

ShiftWindow shift_window(const BoundParams& p) {
  p.validate();
  const double N = static_cast<double>(p.N);
  const double root = std::sqrt(static_cast<double>(p.n));
  const double ln_n = ln_u(p.n);
  ShiftWindow w;
  w.ell_max = N * root / (4 * p.c * p.delta * p.epsilon * ln_n);
  w.ell_min = N * root / (p.mu * p.delta * ln_n);
  // ell_min < ell_max is equivalent to this; comparing the constants avoids
  // rounding noise at the boundary.
  w.feasible = p.epsilon < p.mu / (4 * p.c);
  return w;
}

SPrimeBound sprime_lower_bound(const BoundParams& p, std::uint64_t t, std::uint64_t D) {
  p.validate();
  if (!(p.ell > 0)) throw PreconditionError("shift ell must be positive");
  SPrimeBound out;
  const double N = static_cast<double>(p.N);
  const double kt_k = static_cast<double>(p.k) * (static_cast<double>(t) - 1.0);
  out.ln_bound = ln_big(p.s) + std::log1p(-std::pow(N, -p.pexp)) -
                 ln_big(binomial_exact(D + p.k, p.k)) - (N / p.ell) * kt_k;
  out.kt_guard = kt_k * kt_k <= p.ell / 10.0;
  const double dd = static_cast<double>(p.d);
  out.d_guard = dd * dd <= (N + p.ell) / 10.0;
  const ShiftWindow w = shift_window(p);
  out.in_window = w.feasible && p.ell > w.ell_min && p.ell <= w.ell_max;
  return out;
}

BoundReport bound_report(const BoundParams& p, std::uint64_t t, std::uint64_t D) {
  BoundReport r;
  r.window = shift_window(p);
  r.sprime = sprime_lower_bound(p, t, D);
  r.feasible = r.window.feasible && p.epsilon < std::min(p.c_prime, p.mu / (4 * p.c));
  const double ell = std::floor(p.ell);
  if (ell <= 9007199254740992.0) {
    const double bits = (ln_binomial_approx(static_cast<double>(p.N) + ell, static_cast<double>(p.N)) +
                         2 * ln_big(p.s)) / std::log(2.0);
    if (bits <= kExactBits) {
      r.exact_extension_bound = extension_lower_bound(p.s, p.N, static_cast<std::uint64_t>(ell), p.d);
    }
  }
  return r;
}

ChainCheck chain_inequality(const BoundParams& p) {
  p.validate();
  ChainCheck out;
  const double N = static_cast<double>(p.N);
  const double d = static_cast<double>(p.d);
  const double ln_s = ln_big(p.s);
  out.ell = std::floor(N * d / (2.0 * (ln_s + p.pexp * std::log(N))));
  if (out.ell < 1) out.ell = 1;
  out.lhs_ln = ln_s + d * std::log(out.ell / (N + out.ell));
  out.rhs_ln = -p.pexp * std::log(N);
  out.guards_pass = d * d <= (N + out.ell) / 10.0;

  const double bits = (d * std::log2(N + out.ell) + std::log2(N) * p.pexp + ln_s / std::log(2.0));
  if (bits <= kExactBits && out.ell <= 9007199254740992.0 && p.pexp == std::floor(p.pexp)) {
    // s * ell^d * N^pexp <= (N + ell)^d
    const auto L = static_cast<std::uint64_t>(out.ell);
    BigInt lhs = p.s * big_pow(L, p.d) * big_pow(p.N, static_cast<std::uint64_t>(p.pexp));
    BigInt rhs = big_pow(p.N + L, p.d);
    out.holds = lhs <= rhs;
    out.exact = true;
  } else {
    out.holds = out.lhs_ln <= out.rhs_ln;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibrated sweeps

namespace {

std::uint64_t derivative_order(std::uint64_t n, double epsilon) {
  const auto k = static_cast<std::uint64_t>(std::llround(epsilon * std::sqrt(static_cast<double>(n))));
  return std::max<std::uint64_t>(1, k);
}

SweepRow finish_row(std::string family, BoundParams p, const SweepConstants& k) {
  SweepRow row;
  row.family = std::move(family);
  const double root = std::sqrt(static_cast<double>(p.n));
  row.t = static_cast<std::uint64_t>(std::ceil(root));
  row.D = std::max<std::uint64_t>(p.k, static_cast<std::uint64_t>(std::ceil(k.c_prime * root)));
  const ShiftWindow w = shift_window(p);
  p.ell = std::max(1.0, std::floor(w.ell_max));
  row.report = bound_report(p, row.t, row.D);
  row.ratio = row.report.sprime.ln_bound / (root * std::log(static_cast<double>(p.n)));
  row.params = std::move(p);
  return row;
}

BoundParams base_params(std::uint64_t n, const SweepConstants& k) {
  BoundParams p;
  p.n = n;
  p.k = derivative_order(n, k.epsilon);
  p.epsilon = k.epsilon;
  p.mu = k.mu;
  p.c_prime = k.c_prime;
  p.pexp = k.pexp;
  return p;
}

}  // namespace

SweepRow nw_calibrated(std::uint64_t n, const SweepConstants& k) {
  BoundParams p = base_params(n, k);
  p.N = n * n;
  p.delta = 1.0;
  p.c = 2.0;
  p.d = n > 2 * p.k ? n - 2 * p.k : 0;
  p.s = big_pow(n, p.k);
  return finish_row("nw", std::move(p), k);
}

SweepRow imm_calibrated(std::uint64_t n, const SweepConstants& k) {
  if (n < 4) throw PreconditionError("IMM calibration needs n >= 4");
  BoundParams p = base_params(n, k);
  p.N = n * n * (n - 2) + 2 * n;
  p.delta = 0.25;
  p.c = 4.0;
  p.d = n / 4;
  auto prime = largest_prime_in((n + 1) / 2, n);
  if (!prime) throw PreconditionError("no prime in [n/2, n]");
  p.s = big_pow(*prime, p.k);
  return finish_row("imm", std::move(p), k);
}

SweepRow custom_calibrated(std::uint64_t n, double delta, double c, const SweepConstants& k) {
  BoundParams p = base_params(n, k);
  p.N = n * n;
  p.delta = delta;
  p.c = c;
  p.d = static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) / c));
  p.s = big_pow(n, static_cast<std::uint64_t>(std::ceil(delta * static_cast<double>(p.k))));
  return finish_row("custom", std::move(p), k);
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& p = r.params;
    out << r.family << ',' << p.n << ',' << p.N << ',' << p.k << ',' << p.d << ',' << p.s.get_str() << ','
        << fmt_real(p.ell) << ',' << fmt_real(p.delta) << ',' << fmt_real(p.c) << ',' << fmt_real(p.c_prime)
        << ',' << fmt_real(p.epsilon) << ',' << fmt_real(p.mu) << ',' << fmt_real(p.pexp) << ',' << r.t << ','
        << r.D << ',' << fmt_real(r.report.window.ell_min) << ',' << fmt_real(r.report.window.ell_max) << ','
        << (r.report.feasible ? "true" : "false") << ','
        << (r.report.exact_extension_bound ? r.report.exact_extension_bound->get_str() : "") << ','
        << fmt_real(r.report.sprime.ln_bound) << ',' << fmt_real(r.ratio) << ','
        << (r.report.sprime.kt_guard ? "true" : "false") << ',' << (r.report.sprime.d_guard ? "true" : "false")
        << '\n';
  }
  return out.str();
}

}  // namespace lmd
