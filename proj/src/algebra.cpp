#include "lmd/algebra.hpp"

#include <cmath>

namespace lmd {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // These bases are a deterministic witness set for n < 3.3e24.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::optional<std::uint64_t> largest_prime_in(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) return std::nullopt;
  for (u64 c = hi;; --c) {
    if (is_prime(c)) return c;
    if (c == lo) break;
  }
  return std::nullopt;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus) {
  if (!is_prime(modulus)) {
    throw PreconditionError("field modulus " + std::to_string(modulus) + " is not prime");
  }
  if (modulus > kMersenne61) {
    throw PreconditionError("field modulus must be below 2^61");
  }
}

PrimeField::Element PrimeField::reduce(std::int64_t v) const {
  const std::int64_t p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  return static_cast<Element>(r < 0 ? r + p : r);
}

PrimeField::Element PrimeField::reduce(const BigInt& v) const {
  BigInt r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), p_);
  return r.get_ui();
}

PrimeField::Element PrimeField::reduce(const BigRational& v) const {
  Element num = reduce(v.get_num());
  Element den = reduce(v.get_den());
  if (den == 0) {
    throw PreconditionError("rational denominator vanishes modulo " + std::to_string(p_));
  }
  return mul(num, inv(den));
}

PrimeField::Element PrimeField::pow(Element a, std::uint64_t e) const { return powmod(a, e, p_); }

PrimeField::Element PrimeField::inv(Element a) const {
  if (a % p_ == 0) throw PreconditionError("inverse of zero in GF(p)");
  return powmod(a, p_ - 2, p_);
}

const PrimeField& Field::prime_field() const {
  if (!gf_) throw PreconditionError("field of rationals has no prime field");
  return *gf_;
}

Scalar Field::normalize(const Scalar& v) const {
  if (!gf_) {
    Scalar r = v;
    r.canonicalize();
    return r;
  }
  return Scalar(BigInt(static_cast<unsigned long>(gf_->reduce(v))));
}

Scalar Field::inv(const Scalar& a) const {
  if (!gf_) {
    if (a == 0) throw PreconditionError("inverse of zero");
    return Scalar(1) / a;
  }
  return Scalar(BigInt(static_cast<unsigned long>(gf_->inv(gf_->reduce(a)))));
}

std::string Field::name() const { return gf_ ? "GF(" + std::to_string(gf_->modulus()) + ")" : "Q"; }

BigInt binomial_exact(std::uint64_t a, std::uint64_t b) {
  if (b > a) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), a, b);
  return r;
}

BigInt binomial_or_zero(std::int64_t top, std::int64_t b) {
  if (b < 0 || top < b) return 0;
  return binomial_exact(static_cast<u64>(top), static_cast<u64>(b));
}

double ln_big(const BigInt& v) {
  if (v <= 0) throw PreconditionError("logarithm of a non-positive integer");
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

double ln_factorial_ratio_exact(std::int64_t a, std::int64_t f, std::int64_t g) {
  if (a - g < 0) throw PreconditionError("ln_factorial_ratio_exact requires a - g >= 0");
  if (f < -g) throw PreconditionError("ln_factorial_ratio_exact requires f + g >= 0");
  double sum = 0.0;
  for (std::int64_t j = a - g + 1; j <= a + f; ++j) sum += std::log(static_cast<double>(j));
  return sum;
}

FactorialRatioEstimate ln_factorial_ratio_estimate(std::int64_t a, std::int64_t f, std::int64_t g) {
  if (f < 0 || g < 0) throw PreconditionError("f and g must be non-negative");
  if (f + g >= a) {
    throw RegimeError("estimate requires f + g < a (got f + g = " + std::to_string(f + g) +
                      ", a = " + std::to_string(a) + ")");
  }
  const double fg = static_cast<double>(f + g);
  return {fg * std::log(static_cast<double>(a)), fg * fg / static_cast<double>(a)};
}

}  // namespace lmd
