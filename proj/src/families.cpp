#include "lmd/families.hpp"

#include <algorithm>

namespace lmd {

namespace {

std::uint64_t checked_power(std::uint64_t base, std::uint64_t exp, std::uint64_t budget, const char* what) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r) || r > budget) {
      throw BudgetExceeded(std::string(what) + " exceeds the expansion budget of " + std::to_string(budget));
    }
  }
  return r;
}

}  // namespace

std::uint32_t eval_univariate(const Univariate& a, std::uint32_t z, std::uint32_t p) {
  // Horner
  std::uint64_t acc = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = (acc * z + *it) % p;
  return static_cast<std::uint32_t>(acc);
}

std::vector<Univariate> all_univariates(std::uint32_t p, std::uint32_t k, std::uint64_t budget) {
  const std::uint64_t count = checked_power(p, k, budget, "univariate enumeration");
  std::vector<Univariate> out;
  out.reserve(count);
  Univariate cur(k, 0);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    out.push_back(cur);
    // odometer, last coefficient fastest
    for (std::size_t pos = k; pos-- > 0;) {
      if (++cur[pos] < p) break;
      cur[pos] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Design polynomial

VarTablePtr nw_table(std::uint32_t n) {
  std::vector<std::string> names;
  std::vector<VarLabel> labels;
  for (std::uint32_t i = 1; i <= n; ++i) {
    for (std::uint32_t j = 1; j <= n; ++j) {
      names.push_back("x" + std::to_string(i) + "_" + std::to_string(j));
      labels.push_back({1, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  return std::make_shared<const VarTable>(std::move(names), std::move(labels));
}

static void check_nw(const NwParams& p) {
  if (!is_prime(p.n)) throw PreconditionError(std::to_string(p.n) + " is not prime");
  if (p.k < 1 || p.k > p.n) throw PreconditionError("design degree bound must satisfy 1 <= k <= n");
}

Monomial nw_monomial(const NwParams& p, const Univariate& a) {
  std::vector<Monomial::Factor> f;
  f.reserve(p.n);
  for (std::uint32_t i = 1; i <= p.n; ++i) {
    const std::uint32_t col = field_to_index(eval_univariate(a, i - 1, p.n));
    f.push_back({(i - 1) * p.n + (col - 1), 1});
  }
  return Monomial::from_factors(std::move(f));
}

SparsePoly nw_poly(const NwParams& p, Field field, std::uint64_t budget) {
  check_nw(p);
  SparsePoly out(nw_table(p.n), field);
  for (const auto& a : all_univariates(p.n, p.k, budget)) out.add_term(nw_monomial(p, a), 1);
  return out;
}

Monomial nw_prefix_derivative(const SparsePoly& nw, const NwParams& p, const Univariate& a) {
  if (a.size() > p.k) throw PreconditionError("univariate has degree >= k");
  std::vector<Monomial::Factor> by;
  for (std::uint32_t i = 1; i <= p.k; ++i) {
    const std::uint32_t col = field_to_index(eval_univariate(a, i - 1, p.n));
    by.push_back({(i - 1) * p.n + (col - 1), 1});
  }
  SparsePoly d = derive(nw, Monomial::from_factors(std::move(by)));
  if (d.num_terms() != 1 || d.terms().begin()->second != 1) {
    throw InvariantViolation("prefix derivative of the design polynomial is not a lone monomial: " +
                             d.to_string());
  }
  return d.terms().begin()->first;
}

Monomial nw_prefix_derivative(const NwParams& p, const Univariate& a) {
  return nw_prefix_derivative(nw_poly(p), p, a);
}

// ---------------------------------------------------------------------------
// Iterated matrix multiplication

VarTablePtr imm_table(std::uint32_t n, std::uint32_t d) {
  std::vector<std::string> names;
  std::vector<VarLabel> labels;
  names.reserve(static_cast<std::size_t>(n) * n * d);
  for (std::uint32_t t = 1; t <= d; ++t) {
    for (std::uint32_t i = 1; i <= n; ++i) {
      for (std::uint32_t j = 1; j <= n; ++j) {
        names.push_back("x" + std::to_string(t) + "_" + std::to_string(i) + "_" + std::to_string(j));
        labels.push_back({static_cast<int>(t), static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return std::make_shared<const VarTable>(std::move(names), std::move(labels));
}

SparsePoly imm_poly(const ImmParams& p, Field field, std::uint64_t budget) {
  if (p.n < 1 || p.d < 2) throw PreconditionError("IMM needs n >= 1 and d >= 2");
  checked_power(p.n, p.d - 1, budget, "IMM expansion");
  SparsePoly out(imm_table(p.n, p.d), field);
  std::vector<std::uint32_t> idx(p.d - 1, 1);  // i_1 .. i_{d-1}
  while (true) {
    std::vector<Monomial::Factor> f;
    std::uint32_t row = 1;
    for (std::uint32_t t = 1; t <= p.d; ++t) {
      const std::uint32_t col = t == p.d ? 1 : idx[t - 1];
      f.push_back({imm_var(p.n, t, row, col), 1});
      row = col;
    }
    out.add_term(Monomial::from_factors(std::move(f)), 1);
    std::size_t pos = idx.size();
    while (pos > 0 && ++idx[pos - 1] > p.n) idx[--pos] = 1;
    if (pos == 0) break;
  }
  return out;
}

SparsePoly imm_segment_poly(std::uint32_t n, std::uint32_t d, std::uint32_t a, std::uint32_t b,
                            std::uint32_t i, std::uint32_t j, const ZeroPattern& zeroed, Field field,
                            std::uint64_t budget) {
  if (b > d) throw PreconditionError("segment extends past the last matrix");
  auto table = imm_table(n, d);
  std::vector<SparsePoly> row(n, SparsePoly(table, field));
  row[i - 1] = SparsePoly::constant(table, field, 1);
  for (std::uint32_t q = a; q <= b; ++q) {
    std::vector<SparsePoly> next(n, SparsePoly(table, field));
    std::uint64_t terms = 0;
    for (std::uint32_t r = 1; r <= n; ++r) {
      if (row[r - 1].is_zero()) continue;
      for (std::uint32_t c = 1; c <= n; ++c) {
        if (zeroed && zeroed(q, r, c)) continue;
        next[c - 1] = next[c - 1] + row[r - 1].shifted(Monomial::variable(imm_var(n, q, r, c)));
        terms += row[r - 1].num_terms();
      }
    }
    if (terms > budget) throw BudgetExceeded("segment expansion exceeds budget");
    row = std::move(next);
  }
  return row[j - 1];
}

std::optional<Monomial> lm_of_segment(std::uint32_t n, const ZeroPattern& zeroed, std::uint32_t a,
                                      std::uint32_t b, std::uint32_t i, std::uint32_t j) {
  if (a > b) {
    if (i == j) return Monomial{};
    return std::nullopt;
  }
  auto live = [&](std::uint32_t q, std::uint32_t r, std::uint32_t c) { return !(zeroed && zeroed(q, r, c)); };
  // best[r-1]: lex-greatest tail over layers q..b starting at row r, ending at column j
  std::vector<std::optional<Monomial>> best(n);
  for (std::uint32_t r = 1; r <= n; ++r) {
    if (live(b, r, j)) best[r - 1] = Monomial::variable(imm_var(n, b, r, j));
  }
  for (std::uint32_t q = b; q-- > a;) {
    std::vector<std::optional<Monomial>> next(n);
    for (std::uint32_t r = 1; r <= n; ++r) {
      for (std::uint32_t c = 1; c <= n; ++c) {
        if (!live(q, r, c) || !best[c - 1]) continue;
        Monomial cand = Monomial::variable(imm_var(n, q, r, c)) * *best[c - 1];
        if (!next[r - 1] || lex_compare(cand, *next[r - 1]) > 0) next[r - 1] = std::move(cand);
      }
    }
    best = std::move(next);
  }
  return best[i - 1];
}

std::optional<Monomial> lm_of_imm_derivative(std::uint32_t n, std::uint32_t d, const ZeroPattern& zeroed,
                                             std::span<const VarLabel> vars) {
  std::vector<VarLabel> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end(), [](const VarLabel& x, const VarLabel& y) { return x.t < y.t; });
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    const auto& v = sorted[s];
    if (v.t < 1 || static_cast<std::uint32_t>(v.t) > d) throw PreconditionError("matrix index out of range");
    // one variable per matrix in every monomial
    if (s > 0 && sorted[s - 1].t == v.t) return std::nullopt;
    if (zeroed && zeroed(v.t, v.i, v.j)) return std::nullopt;
  }
  Monomial lm;
  std::uint32_t prev = 0;
  std::uint32_t row = 1;
  for (const auto& v : sorted) {
    auto seg = lm_of_segment(n, zeroed, prev + 1, v.t - 1, row, v.i);
    if (!seg) return std::nullopt;
    lm = lm * *seg;
    prev = v.t;
    row = v.j;
  }
  auto tail = lm_of_segment(n, zeroed, prev + 1, d, row, 1);
  if (!tail) return std::nullopt;
  return lm * *tail;
}

RestrictionPlan::RestrictionPlan(std::uint32_t n, std::uint32_t k) : n_(n), k_(k), spacing_(0) {
  if (k < 1) throw PreconditionError("restriction needs k >= 1");
  if (n % (4 * k) != 0) {
    throw PreconditionError("spacing n/4k = " + std::to_string(n) + "/" + std::to_string(4 * k) +
                            " is not an integer");
  }
  spacing_ = n / (4 * k);
  for (std::uint32_t r = 1; r <= 2 * k; ++r) chosen_.push_back((r + 1) + (r - 1) * spacing_);
  if (chosen_.back() >= n) {
    throw PreconditionError("last chosen matrix " + std::to_string(chosen_.back()) + " is not below n = " +
                            std::to_string(n));
  }
}

bool RestrictionPlan::frozen(std::uint32_t q) const {
  const std::int64_t qq = q;
  const std::int64_t sp = spacing_;
  for (std::int64_t r = 2; r <= 2 * static_cast<std::int64_t>(k_); ++r) {
    if (r + (r - 2) * sp < qq && qq < (r + 1) + (r - 1) * sp - 1) return true;
  }
  return false;
}

bool RestrictionPlan::zeroed(std::uint32_t q, std::uint32_t i, std::uint32_t j) const {
  return i != j && frozen(q);
}

std::vector<std::uint32_t> RestrictionPlan::unconstrained() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t q = 1; q <= n_; ++q) {
    if (!frozen(q) && std::find(chosen_.begin(), chosen_.end(), q) == chosen_.end()) out.push_back(q);
  }
  return out;
}

ZeroPattern RestrictionPlan::pattern() const {
  return [plan = *this](std::uint32_t q, std::uint32_t i, std::uint32_t j) { return plan.zeroed(q, i, j); };
}

std::vector<VarLabel> imm_s_set(const RestrictionPlan& plan, const Univariate& a) {
  const auto p = static_cast<std::uint32_t>(largest_prime_in((plan.n() + 1) / 2, plan.n()).value_or(0));
  if (p == 0) throw PreconditionError("no prime in [n/2, n]");
  std::vector<VarLabel> s;
  for (std::uint32_t r = 1; r <= plan.chosen().size(); ++r) {
    const std::uint32_t col = field_to_index(eval_univariate(a, r - 1, p));
    s.push_back({static_cast<int>(plan.chosen()[r - 1]), static_cast<int>(r), static_cast<int>(col)});
  }
  return s;
}

ImmLmFamily imm_restricted_lm_family(std::uint32_t n, std::uint32_t k, std::uint64_t budget) {
  RestrictionPlan plan(n, k);
  auto prime = largest_prime_in((n + 1) / 2, n);
  if (!prime) throw PreconditionError("no prime p with n/2 <= p <= n");
  const auto p = static_cast<std::uint32_t>(*prime);
  if (2 * k > p) throw PreconditionError("need 2k distinct evaluation points in GF(p)");

  ImmLmFamily fam;
  fam.n = n;
  fam.k = k;
  fam.p = p;
  fam.chosen = plan.chosen();
  fam.unconstrained = plan.unconstrained();
  const ZeroPattern zero = plan.pattern();
  for (auto& a : all_univariates(p, k, budget)) {
    LmFamilyMember m;
    m.s_set = imm_s_set(plan, a);
    auto lm = lm_of_imm_derivative(n, n, zero, m.s_set);
    if (!lm) throw InvariantViolation("derivative of the restricted IMM by S_a vanishes");
    m.lm = std::move(*lm);
    m.a = std::move(a);
    fam.members.push_back(std::move(m));
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Depth-4 circuits

Depth4Circuit::Depth4Circuit(VarTablePtr table, Field field) : table_(std::move(table)), field_(field) {}

void Depth4Circuit::add_product(std::vector<SparsePoly> factors) {
  for (const auto& f : factors) {
    if (!(f.field() == field_) || !(f.table() == *table_)) {
      throw PreconditionError("circuit factor over a different table or field");
    }
  }
  products_.push_back(std::move(factors));
}

std::size_t Depth4Circuit::product_fanin() const {
  std::size_t d = 0;
  for (const auto& p : products_) d = std::max(d, p.size());
  return d;
}

std::uint32_t Depth4Circuit::bottom_degree() const {
  std::uint32_t t = 0;
  for (const auto& p : products_) {
    for (const auto& q : p) t = std::max(t, q.degree());
  }
  return t;
}

SparsePoly depth4_expand(const Depth4Circuit& c, std::uint64_t budget) {
  SparsePoly sum(c.table_ptr(), c.field());
  for (const auto& prod : c.products()) {
    SparsePoly acc = SparsePoly::constant(c.table_ptr(), c.field(), 1);
    for (const auto& q : prod) {
      std::uint64_t cost = 0;
      if (__builtin_mul_overflow(acc.num_terms(), q.num_terms(), &cost) || cost > budget) {
        throw BudgetExceeded("depth-4 expansion exceeds budget");
      }
      acc = acc * q;
    }
    sum = sum + acc;
  }
  return sum;
}

BigInt depth4_upper_bound(std::uint64_t top_fanin, std::uint64_t product_fanin, std::uint64_t k,
                          std::uint64_t t, std::uint64_t n_vars, std::uint64_t ell) {
  if (k > product_fanin) throw PreconditionError("derivative order k exceeds product fan-in D");
  const auto kk = static_cast<std::int64_t>(k);
  const std::int64_t top = static_cast<std::int64_t>(n_vars + ell) + kk * (static_cast<std::int64_t>(t) - 1);
  return BigInt(static_cast<unsigned long>(top_fanin)) * binomial_exact(product_fanin + k, k) *
         binomial_or_zero(top, static_cast<std::int64_t>(n_vars));
}

}  // namespace lmd
