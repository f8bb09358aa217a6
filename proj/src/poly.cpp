#include "lmd/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lmd {

VarTable::VarTable(std::vector<std::string> names) : VarTable(std::move(names), {}) {}

VarTable::VarTable(std::vector<std::string> names, std::vector<VarLabel> labels)
    : names_(std::move(names)), labels_(std::move(labels)) {
  if (!labels_.empty() && labels_.size() != names_.size()) {
    throw PreconditionError("variable labels must cover every variable");
  }
  for (VarId v = 0; v < names_.size(); ++v) {
    if (!by_name_.emplace(names_[v], v).second) {
      throw PreconditionError("duplicate variable name '" + names_[v] + "'");
    }
  }
  for (VarId v = 0; v < labels_.size(); ++v) {
    const auto& l = labels_[v];
    if (!by_label_.emplace(std::tuple{l.t, l.i, l.j}, v).second) {
      throw PreconditionError("duplicate variable label for '" + names_[v] + "'");
    }
  }
}

std::optional<VarId> VarTable::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarId VarTable::id(std::string_view name) const {
  auto v = find(name);
  if (!v) throw PreconditionError("unknown variable '" + std::string(name) + "'");
  return *v;
}

std::optional<VarId> VarTable::find(const VarLabel& label) const {
  auto it = by_label_.find({label.t, label.i, label.j});
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

VarTablePtr make_indexed_table(std::size_t n, const std::string& prefix) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
  return std::make_shared<const VarTable>(std::move(names));
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::variable(VarId v, std::uint32_t exp) {
  Monomial m;
  if (exp > 0) {
    m.factors_.push_back({v, exp});
    m.degree_ = exp;
  }
  return m;
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.var < b.var; });
  Monomial m;
  for (const auto& f : factors) {
    if (f.exp == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().var == f.var) {
      m.factors_.back().exp += f.exp;
    } else {
      m.factors_.push_back(f);
    }
    m.degree_ += f.exp;
  }
  return m;
}

Monomial Monomial::from_exponents(std::span<const std::uint32_t> exps) {
  Monomial m;
  for (VarId v = 0; v < exps.size(); ++v) {
    if (exps[v] == 0) continue;
    m.factors_.push_back({v, exps[v]});
    m.degree_ += exps[v];
  }
  return m;
}

std::uint32_t Monomial::exponent(VarId v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const Factor& f, VarId x) { return f.var < x; });
  return (it != factors_.end() && it->var == v) ? it->exp : 0;
}

std::optional<VarId> Monomial::max_var() const {
  if (factors_.empty()) return std::nullopt;
  return factors_.back().var;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.factors_.reserve(factors_.size() + o.factors_.size());
  auto a = factors_.begin();
  auto b = o.factors_.begin();
  while (a != factors_.end() || b != o.factors_.end()) {
    if (b == o.factors_.end() || (a != factors_.end() && a->var < b->var)) {
      r.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->var < a->var) {
      r.factors_.push_back(*b++);
    } else {
      r.factors_.push_back({a->var, a->exp + b->exp});
      ++a;
      ++b;
    }
  }
  r.degree_ = degree_ + o.degree_;
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  for (const auto& f : factors_) {
    if (o.exponent(f.var) < f.exp) return false;
  }
  return true;
}

std::size_t Monomial::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& f : factors_) {
    h ^= f.var;
    h *= 0x100000001b3ull;
    h ^= f.exp;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}

std::string Monomial::to_string(const VarTable& table) const {
  if (factors_.empty()) return "1";
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += '*';
    out += table.name(f.var);
    if (f.exp != 1) out += '^' + std::to_string(f.exp);
  }
  return out;
}

int lex_compare(const Monomial& a, const Monomial& b) {
  auto fa = a.factors();
  auto fb = b.factors();
  std::size_t i = 0;
  for (; i < fa.size() && i < fb.size(); ++i) {
    if (fa[i].var != fb[i].var) {
      // The side holding the higher-precedence variable is greater.
      return fa[i].var < fb[i].var ? 1 : -1;
    }
    if (fa[i].exp != fb[i].exp) return fa[i].exp > fb[i].exp ? 1 : -1;
  }
  if (i < fa.size()) return 1;
  if (i < fb.size()) return -1;
  return 0;
}

std::uint32_t mono_distance(const Monomial& a, const Monomial& b) {
  std::uint32_t shared = 0;
  auto fa = a.factors();
  auto fb = b.factors();
  std::size_t i = 0, j = 0;
  while (i < fa.size() && j < fb.size()) {
    if (fa[i].var < fb[j].var) {
      ++i;
    } else if (fb[j].var < fa[i].var) {
      ++j;
    } else {
      shared += std::min(fa[i].exp, fb[j].exp);
      ++i;
      ++j;
    }
  }
  return std::min(a.degree() - shared, b.degree() - shared);
}

std::uint32_t mono_distance(const VarTable& ta, const Monomial& a, const VarTable& tb, const Monomial& b) {
  if (&ta != &tb && !(ta == tb)) {
    throw PreconditionError("monomials are over different variable tables");
  }
  return mono_distance(a, b);
}

// ---------------------------------------------------------------------------
// SparsePoly

SparsePoly::SparsePoly(VarTablePtr table, Field field) : table_(std::move(table)), field_(field) {
  if (!table_) throw PreconditionError("polynomial needs a variable table");
}

SparsePoly SparsePoly::constant(VarTablePtr table, Field field, const Scalar& c) {
  SparsePoly p(std::move(table), field);
  p.add_term(Monomial{}, c);
  return p;
}

SparsePoly SparsePoly::term(VarTablePtr table, Field field, const Monomial& m, const Scalar& c) {
  SparsePoly p(std::move(table), field);
  p.add_term(m, c);
  return p;
}

std::uint32_t SparsePoly::degree() const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

Scalar SparsePoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Scalar(0) : it->second;
}

void SparsePoly::add_term(const Monomial& m, const Scalar& c) {
  if (auto mv = m.max_var(); mv && *mv >= table_->size()) {
    throw PreconditionError("monomial uses a variable outside the table");
  }
  Scalar v = field_.normalize(c);
  if (v == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, v);
  if (!inserted) {
    it->second = field_.add(it->second, v);
    if (it->second == 0) terms_.erase(it);
  }
}

void SparsePoly::check_compatible(const SparsePoly& o) const {
  if (table_ != o.table_ && !(*table_ == *o.table_)) {
    throw PreconditionError("polynomials are over different variable tables");
  }
  if (!(field_ == o.field_)) throw PreconditionError("polynomials are over different fields");
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const {
  check_compatible(o);
  SparsePoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const {
  check_compatible(o);
  SparsePoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
  check_compatible(o);
  SparsePoly r(table_, field_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
  }
  return r;
}

SparsePoly SparsePoly::scaled(const Scalar& c) const {
  SparsePoly r(table_, field_);
  for (const auto& [m, v] : terms_) r.add_term(m, v * c);
  return r;
}

SparsePoly SparsePoly::shifted(const Monomial& s) const {
  SparsePoly r(table_, field_);
  for (const auto& [m, v] : terms_) r.terms_.emplace_hint(r.terms_.end(), m * s, v);
  return r;
}

bool SparsePoly::operator==(const SparsePoly& o) const {
  return field_ == o.field_ && terms_ == o.terms_ &&
         (table_ == o.table_ || *table_ == *o.table_);
}

std::string SparsePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Scalar mag = c;
    bool negative = c < 0;
    if (negative) mag = -c;
    if (first) {
      if (negative) out << '-';
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;
    if (m.is_one()) {
      out << mag.get_str();
    } else if (mag == 1) {
      out << m.to_string(*table_);
    } else {
      out << mag.get_str() << '*' << m.to_string(*table_);
    }
  }
  return out.str();
}

const Monomial& leading_monomial(const SparsePoly& f) {
  if (f.is_zero()) throw PreconditionError("leading monomial of the zero polynomial");
  return f.terms().begin()->first;
}

SparsePoly derive(const SparsePoly& f, VarId v) { return derive(f, Monomial::variable(v)); }

SparsePoly derive(const SparsePoly& f, const Monomial& by) {
  SparsePoly r(f.table_ptr(), f.field());
  for (const auto& [m, c] : f.terms()) {
    if (!by.divides(m)) continue;
    BigInt mult = 1;
    std::vector<Monomial::Factor> rest;
    for (const auto& fac : m.factors()) {
      std::uint32_t k = by.exponent(fac.var);
      // falling factorial e (e-1) ... (e-k+1)
      for (std::uint32_t i = 0; i < k; ++i) mult *= fac.exp - i;
      if (fac.exp > k) rest.push_back({fac.var, fac.exp - k});
    }
    r.add_term(Monomial::from_factors(std::move(rest)), c * Scalar(mult));
  }
  return r;
}

SparsePoly restrict(const SparsePoly& f, const Assignment& values) {
  SparsePoly r(f.table_ptr(), f.field());
  for (const auto& [m, c] : f.terms()) {
    Scalar coeff = c;
    std::vector<Monomial::Factor> rest;
    for (const auto& fac : m.factors()) {
      auto it = values.find(fac.var);
      if (it == values.end()) {
        rest.push_back(fac);
        continue;
      }
      Scalar p = 1;
      for (std::uint32_t i = 0; i < fac.exp; ++i) p *= it->second;
      coeff *= p;
    }
    r.add_term(Monomial::from_factors(std::move(rest)), coeff);
  }
  return r;
}

Scalar evaluate(const SparsePoly& f, const Assignment& point) {
  Scalar total = 0;
  for (const auto& [m, c] : f.terms()) {
    Scalar term = c;
    for (const auto& fac : m.factors()) {
      auto it = point.find(fac.var);
      if (it == point.end()) {
        throw PreconditionError("no value for variable '" + f.table().name(fac.var) + "'");
      }
      for (std::uint32_t i = 0; i < fac.exp; ++i) term *= it->second;
    }
    total += term;
  }
  return f.field().normalize(total);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  std::size_t pos() const { return pos_; }

  std::string integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (start == pos_) throw ParseError(start, "expected an integer");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) {
      throw ParseError(start, "expected a variable name or integer");
    }
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

struct ParsedTerm {
  BigInt coeff = 1;
  std::vector<Monomial::Factor> factors;
};

ParsedTerm parse_term(Lexer& lex, const VarTable& table) {
  ParsedTerm t;
  do {
    char c = lex.peek();
    if (is_digit(c)) {
      t.coeff *= BigInt(lex.integer());
    } else {
      std::size_t at = lex.pos();
      std::string nm = lex.name();
      auto v = table.find(nm);
      if (!v) throw ParseError(at, "unknown variable '" + nm + "'");
      std::uint32_t e = 1;
      if (lex.accept('^')) {
        std::size_t eat = lex.pos();
        std::string digits = lex.integer();
        if (digits.size() > 9) throw ParseError(eat, "exponent too large");
        e = static_cast<std::uint32_t>(std::stoul(digits));
      }
      t.factors.push_back({*v, e});
    }
  } while (lex.accept('*'));
  return t;
}

}  // namespace

SparsePoly parse_poly(std::string_view text, VarTablePtr table, Field field) {
  Lexer lex(text);
  SparsePoly out(table, field);
  if (lex.at_end()) throw ParseError(0, "empty polynomial");
  bool negative = false;
  if (lex.accept('-')) {
    negative = true;
  } else {
    lex.accept('+');
  }
  while (true) {
    ParsedTerm t = parse_term(lex, *table);
    Scalar c(t.coeff);
    out.add_term(Monomial::from_factors(std::move(t.factors)), negative ? Scalar(-c) : c);
    if (lex.at_end()) break;
    if (lex.accept('+')) {
      negative = false;
    } else if (lex.accept('-')) {
      negative = true;
    } else {
      throw ParseError(lex.pos(), std::string("unexpected character '") + lex.peek() + "'");
    }
  }
  return out;
}

Monomial parse_monomial(std::string_view text, const VarTable& table) {
  Lexer lex(text);
  if (lex.at_end()) throw ParseError(0, "empty monomial");
  if (lex.peek() == '1') {
    std::size_t at = lex.pos();
    if (lex.integer() != "1") throw ParseError(at, "monomials carry no coefficient");
    if (!lex.at_end()) throw ParseError(lex.pos(), "trailing input after monomial");
    return Monomial{};
  }
  ParsedTerm t = parse_term(lex, table);
  if (t.coeff != 1) throw ParseError(0, "monomials carry no coefficient");
  if (!lex.at_end()) throw ParseError(lex.pos(), "trailing input after monomial");
  return Monomial::from_factors(std::move(t.factors));
}

VarTablePtr collect_variables(std::span<const std::string> texts) {
  std::vector<std::string> names;
  std::unordered_map<std::string, bool> seen;
  for (const auto& text : texts) {
    std::size_t i = 0;
    while (i < text.size()) {
      if (is_name_start(text[i])) {
        std::size_t start = i;
        while (i < text.size() && is_name_char(text[i])) ++i;
        std::string nm = text.substr(start, i - start);
        if (seen.emplace(nm, true).second) names.push_back(nm);
      } else if (is_digit(text[i])) {
        while (i < text.size() && is_name_char(text[i])) ++i;
      } else {
        ++i;
      }
    }
  }
  return std::make_shared<const VarTable>(std::move(names));
}

}  // namespace lmd
