#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "lmd/algebra.hpp"

namespace lmd {

using VarId = std::uint32_t;

// Position of a variable inside a family of matrices: matrix t, row i, column j
// (all 1-based).
struct VarLabel {
  int t = 0;
  int i = 0;
  int j = 0;
  bool operator==(const VarLabel&) const = default;
};

// Ordered variable names. Position is precedence: id 0 is the greatest
// variable in the lexicographic order.
class VarTable {
 public:
  explicit VarTable(std::vector<std::string> names);
  VarTable(std::vector<std::string> names, std::vector<VarLabel> labels);

  std::size_t size() const { return names_.size(); }
  const std::string& name(VarId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<VarId> find(std::string_view name) const;
  // Throws PreconditionError for unknown names.
  VarId id(std::string_view name) const;

  bool has_labels() const { return !labels_.empty(); }
  const VarLabel& label(VarId v) const { return labels_.at(v); }
  std::optional<VarId> find(const VarLabel& label) const;

  bool operator==(const VarTable& o) const { return names_ == o.names_ && labels_ == o.labels_; }

 private:
  std::vector<std::string> names_;
  std::vector<VarLabel> labels_;
  std::unordered_map<std::string, VarId> by_name_;
  std::map<std::tuple<int, int, int>, VarId> by_label_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

// x_1, ..., x_n with precedence x_1 > x_2 > ... > x_n.
VarTablePtr make_indexed_table(std::size_t n, const std::string& prefix = "x");

// Power product with exponents stored sparsely by ascending variable id.
class Monomial {
 public:
  struct Factor {
    VarId var;
    std::uint32_t exp;
    bool operator==(const Factor&) const = default;
  };

  Monomial() = default;
  static Monomial variable(VarId v, std::uint32_t exp = 1);
  // Merges repeated variables and drops zero exponents.
  static Monomial from_factors(std::vector<Factor> factors);
  // Dense exponent vector indexed by variable id.
  static Monomial from_exponents(std::span<const std::uint32_t> exps);

  std::span<const Factor> factors() const { return factors_; }
  std::uint32_t degree() const { return degree_; }
  std::uint32_t exponent(VarId v) const;
  bool is_one() const { return factors_.empty(); }
  // Largest variable id used, or nullopt for 1.
  std::optional<VarId> max_var() const;

  Monomial operator*(const Monomial& o) const;
  bool divides(const Monomial& o) const;

  bool operator==(const Monomial& o) const { return factors_ == o.factors_; }
  std::size_t hash() const;

  std::string to_string(const VarTable& table) const;

 private:
  std::vector<Factor> factors_;
  std::uint32_t degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

// Pure lexicographic comparison: the first variable (by precedence) whose
// exponents differ decides. Returns -1, 0 or 1.
int lex_compare(const Monomial& a, const Monomial& b);

struct LexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return lex_compare(a, b) > 0; }
};

// Multiset distance: min(|S1| - |S1 & S2|, |S2| - |S1 & S2|).
std::uint32_t mono_distance(const Monomial& a, const Monomial& b);
// Same, but rejects monomials that live over different variable tables.
std::uint32_t mono_distance(const VarTable& ta, const Monomial& a, const VarTable& tb, const Monomial& b);

// Sparse polynomial; terms are kept in decreasing lex order so the first
// term is the leading one.
class SparsePoly {
 public:
  using Terms = std::map<Monomial, Scalar, LexGreater>;

  SparsePoly(VarTablePtr table, Field field);

  static SparsePoly constant(VarTablePtr table, Field field, const Scalar& c);
  static SparsePoly term(VarTablePtr table, Field field, const Monomial& m, const Scalar& c = 1);

  const VarTable& table() const { return *table_; }
  const VarTablePtr& table_ptr() const { return table_; }
  const Field& field() const { return field_; }
  const Terms& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  std::size_t num_terms() const { return terms_.size(); }
  std::uint32_t degree() const;
  Scalar coefficient(const Monomial& m) const;

  // Accumulates c into the coefficient of m.
  void add_term(const Monomial& m, const Scalar& c);

  SparsePoly operator+(const SparsePoly& o) const;
  SparsePoly operator-(const SparsePoly& o) const;
  SparsePoly operator*(const SparsePoly& o) const;
  SparsePoly scaled(const Scalar& c) const;
  // Multiplies every term by m.
  SparsePoly shifted(const Monomial& m) const;

  bool operator==(const SparsePoly& o) const;

  std::string to_string() const;

 private:
  void check_compatible(const SparsePoly& o) const;

  VarTablePtr table_;
  Field field_;
  Terms terms_;
};

// Throws PreconditionError for the zero polynomial.
const Monomial& leading_monomial(const SparsePoly& f);

SparsePoly derive(const SparsePoly& f, VarId v);
SparsePoly derive(const SparsePoly& f, const Monomial& m);

using Assignment = std::map<VarId, Scalar>;

SparsePoly restrict(const SparsePoly& f, const Assignment& values);
// Throws PreconditionError when a variable of f has no value.
Scalar evaluate(const SparsePoly& f, const Assignment& point);

// Text format: terms joined by '+' (or '-'); a term is an optional integer
// coefficient followed by '*'-joined name^exp factors. Whitespace is ignored.
SparsePoly parse_poly(std::string_view text, VarTablePtr table, Field field);
// A single power product such as "x1^2*x3".
Monomial parse_monomial(std::string_view text, const VarTable& table);
// Variable names in order of first appearance in the given texts.
VarTablePtr collect_variables(std::span<const std::string> texts);

}  // namespace lmd
