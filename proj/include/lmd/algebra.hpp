#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "lmd/error.hpp"

namespace lmd {

using BigInt = mpz_class;
using BigRational = mpq_class;

// Scalars are carried as rationals in lowest terms. Prime-field elements use
// the integer representative in [0, p).
using Scalar = BigRational;

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

// Largest prime in [lo, hi], if any.
std::optional<std::uint64_t> largest_prime_in(std::uint64_t lo, std::uint64_t hi);

// Arithmetic in GF(p) for a word-sized prime p.
class PrimeField {
 public:
  using Element = std::uint64_t;

  explicit PrimeField(std::uint64_t modulus = kMersenne61);

  std::uint64_t modulus() const { return p_; }

  Element reduce(std::int64_t v) const;
  Element reduce(const BigInt& v) const;
  // Throws PreconditionError when the denominator is divisible by p.
  Element reduce(const BigRational& v) const;

  Element add(Element a, Element b) const {
    Element s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Element sub(Element a, Element b) const { return a >= b ? a - b : a + (p_ - b); }
  Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
  Element mul(Element a, Element b) const {
    return static_cast<Element>((static_cast<unsigned __int128>(a) * b) % p_);
  }
  Element pow(Element a, std::uint64_t e) const;
  // Throws PreconditionError on zero.
  Element inv(Element a) const;

  bool operator==(const PrimeField& o) const { return p_ == o.p_; }

 private:
  std::uint64_t p_;
};

// Coefficient domain of a polynomial: the rationals, or GF(p).
class Field {
 public:
  static Field rationals() { return Field(std::nullopt); }
  static Field prime(std::uint64_t p) { return Field(PrimeField(p)); }

  bool is_rational() const { return !gf_; }
  const PrimeField& prime_field() const;
  // 0 for the rationals.
  std::uint64_t characteristic() const { return gf_ ? gf_->modulus() : 0; }

  // Canonical representative of v in this domain.
  Scalar normalize(const Scalar& v) const;
  Scalar add(const Scalar& a, const Scalar& b) const { return normalize(a + b); }
  Scalar sub(const Scalar& a, const Scalar& b) const { return normalize(a - b); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return normalize(a * b); }
  // Throws PreconditionError on zero.
  Scalar inv(const Scalar& a) const;

  std::string name() const;

  bool operator==(const Field& o) const { return characteristic() == o.characteristic(); }

 private:
  explicit Field(std::optional<PrimeField> gf) : gf_(gf) {}
  std::optional<PrimeField> gf_;
};

// C(a, b); zero when b > a.
BigInt binomial_exact(std::uint64_t a, std::uint64_t b);

// C(top, b) with the convention C(top, b) = 0 for top < b, including negative top.
BigInt binomial_or_zero(std::int64_t top, std::int64_t b);

// Natural log of a positive big integer, accurate to double precision.
double ln_big(const BigInt& v);

// ln((a+f)!/(a-g)!) as an exact sum of ln j over a-g < j <= a+f.
double ln_factorial_ratio_exact(std::int64_t a, std::int64_t f, std::int64_t g);

struct FactorialRatioEstimate {
  double estimate = 0.0;      // (f+g) ln a
  double error_budget = 0.0;  // (f+g)^2 / a
};

// First-order estimate of ln((a+f)!/(a-g)!). Requires f + g < a.
FactorialRatioEstimate ln_factorial_ratio_estimate(std::int64_t a, std::int64_t f, std::int64_t g);

}  // namespace lmd
